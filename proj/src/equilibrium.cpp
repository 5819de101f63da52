#include "csma/equilibrium.hpp"

#include <algorithm>

namespace csma {

namespace {

constexpr int kMaxBisect = 200;
constexpr double kPTol = 1e-12;

// Active-subset view of the solve: targets restricted to nodes with
// positive demand, leader index within that subset.
struct ActiveProblem {
    std::vector<int> index;  // active -> original
    Vector targets;
    int leader = 0;
    double alpha = 0.0;

    // followers (and the leader itself) as a function of the leader's p
    RequestVector followers(double p_star) const {
        return follower_map(p_star, targets, leader, alpha);
    }

    double sum_p(double p_star) const { return followers(p_star).sum(); }

    // g(p) = ln p + sum_{j != leader} ln(1 - alpha p_j(p))
    double g(double p_star) const {
        if (p_star <= 0.0) return -std::numeric_limits<double>::infinity();
        RequestVector p = followers(p_star);
        double acc = std::log(p_star);
        for (int j = 0; j < static_cast<int>(p.size()); ++j)
            if (j != leader) acc += std::log1p(-alpha * p[j]);
        return acc;
    }
};

// Bisection for f(x) = y on [lo, hi], f monotone with f(lo), f(hi)
// bracketing y. increasing selects the branch orientation.
template <class F>
double bisect(F&& f, double lo, double hi, double y, bool increasing) {
    for (int it = 0; it < kMaxBisect && hi - lo > kPTol; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = f(mid);
        bool go_right = increasing ? (v < y) : (v > y);
        if (go_right)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

Equilibrium make_equilibrium(const ActiveProblem& prob, double p_star,
                             Equilibrium::Branch branch, int n,
                             const SystemParams& params,
                             const std::vector<NodeProfile>& profiles) {
    RequestVector active_p = prob.followers(p_star);
    Equilibrium eq;
    eq.p = RequestVector::Zero(n);
    for (int k = 0; k < static_cast<int>(prob.index.size()); ++k)
        eq.p[prob.index[k]] = active_p[k];
    eq.branch = branch;
    eq.sum_p = eq.p.sum();
    Performance perf = performance(eq.p, params, profiles);
    double res = 0.0;
    for (int i = 0; i < n; ++i)
        res = std::max(res, std::abs(perf.throughput[i] - profiles[i].demand));
    eq.residual = res;
    return eq;
}

}  // namespace

ReducedTargets reduced_targets(const SystemParams& params,
                               const std::vector<NodeProfile>& profiles) {
    DerivedConstants d = validate(params, profiles);
    ReducedTargets rt;
    rt.rho_tilde = Vector::Zero(params.n);
    const double scale = std::exp(params.b * params.noise_ratio) * params.t0 /
                         (1.0 - d.rho_t);
    for (int i = 0; i < params.n; ++i)
        rt.rho_tilde[i] = scale * d.rho_hat[i] / profiles[i].period;
    rt.rho_tilde.maxCoeff(&rt.leader);
    // ties and argmax resolution: lowest index wins
    for (int i = 0; i < params.n; ++i) {
        if (rt.rho_tilde[i] == rt.rho_tilde[rt.leader]) {
            rt.leader = i;
            break;
        }
    }
    return rt;
}

RequestVector follower_map(double p_star, const Vector& targets, int leader,
                           double alpha) {
    const int n = static_cast<int>(targets.size());
    RequestVector p = RequestVector::Zero(n);
    const double t_lead = targets[leader];
    for (int j = 0; j < n; ++j) {
        if (j == leader) {
            p[j] = p_star;
            continue;
        }
        if (targets[j] == 0.0 || p_star == 0.0) continue;
        const double r = targets[j] / t_lead;
        p[j] = r * p_star / (1.0 - alpha * p_star + alpha * r * p_star);
    }
    return p;
}

double solver_objective(double p_star, const Vector& targets, int leader,
                        double alpha) {
    if (p_star <= 0.0) return -std::numeric_limits<double>::infinity();
    RequestVector p = follower_map(p_star, targets, leader, alpha);
    double acc = std::log(p_star);
    for (int j = 0; j < static_cast<int>(p.size()); ++j)
        if (j != leader) acc += std::log1p(-alpha * p[j]);
    return acc;
}

FeasibilityVerdict solve(const SystemParams& params,
                         const std::vector<NodeProfile>& profiles,
                         bool want_worse) {
    validate(params, profiles);
    ReducedTargets rt = reduced_targets(params, profiles);

    FeasibilityVerdict verdict;

    ActiveProblem prob;
    prob.alpha = params.alpha();
    for (int i = 0; i < params.n; ++i)
        if (rt.rho_tilde[i] > 0.0) prob.index.push_back(i);

    if (prob.index.empty()) {
        // no demand at all: p = 0 is the (trivial) better equilibrium
        verdict.feasible = true;
        Equilibrium eq;
        eq.p = RequestVector::Zero(params.n);
        verdict.better = eq;
        verdict.margin = std::numeric_limits<double>::infinity();
        return verdict;
    }

    const int na = static_cast<int>(prob.index.size());
    prob.targets = Vector::Zero(na);
    for (int k = 0; k < na; ++k) prob.targets[k] = rt.rho_tilde[prob.index[k]];
    prob.targets.maxCoeff(&prob.leader);
    for (int k = 0; k < na; ++k) {
        if (prob.targets[k] == prob.targets[prob.leader]) {
            prob.leader = k;
            break;
        }
    }

    // mode of g: where sum_j p_j reaches 1/alpha, or the boundary p = 1
    const double sum_limit = 1.0 / prob.alpha;  // (b+1)/b
    double p_mode;
    if (prob.sum_p(1.0) <= sum_limit)
        p_mode = 1.0;
    else
        p_mode = bisect([&](double x) { return prob.sum_p(x); }, 0.0, 1.0,
                        sum_limit, true);

    const double target = std::log(prob.targets[prob.leader]);
    verdict.margin = prob.g(p_mode) - target;
    verdict.feasible = verdict.margin >= -1e-12;
    if (!verdict.feasible) return verdict;

    // Near the mode g is flat (quadratic), so a margin within rounding
    // noise would make the bisection ill-conditioned; the mode itself
    // then satisfies the equations within the residual tolerance.
    constexpr double kCoincident = 1e-12;

    // better branch: g increasing on (0, p_mode]
    double p_better;
    if (verdict.margin <= kCoincident) {
        p_better = p_mode;
    } else {
        double lo = p_mode;
        int guard = 0;
        while (prob.g(lo) > target) {
            lo *= 0.5;
            if (++guard > kMaxBisect)
                throw NoConvergence("cannot bracket the better equilibrium");
        }
        p_better = bisect([&](double x) { return prob.g(x); }, lo, p_mode,
                          target, true);
    }
    verdict.better = make_equilibrium(prob, p_better,
                                      Equilibrium::Branch::Better, params.n,
                                      params, profiles);

    if (want_worse && p_mode < 1.0) {
        if (verdict.margin <= kCoincident) {
            // equilibria coincide at the mode
            verdict.worse = verdict.better;
            verdict.worse->branch = Equilibrium::Branch::Worse;
        } else if (prob.g(1.0) <= target) {
            double p_worse = bisect([&](double x) { return prob.g(x); },
                                    p_mode, 1.0, target, false);
            verdict.worse = make_equilibrium(prob, p_worse,
                                             Equilibrium::Branch::Worse,
                                             params.n, params, profiles);
        }
    }
    return verdict;
}

RequestVector successive_update(const SystemParams& params,
                                const std::vector<NodeProfile>& profiles_from,
                                const std::vector<NodeProfile>& profiles_to,
                                const RequestVector& p0,
                                std::vector<RequestVector>* trace) {
    const int n = params.n;
    for (int i = 0; i < n; ++i)
        if (profiles_to[i].period < profiles_from[i].period)
            throw Error("periods may only increase in successive_update");

    ReducedTargets from = reduced_targets(params, profiles_from);
    const double alpha = params.alpha();

    // p0 must solve the reduced equations for the old periods
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        double lhs = p0[i];
        for (int j = 0; j < n; ++j)
            if (j != i) lhs *= 1.0 - alpha * p0[j];
        res = std::max(res, std::abs(lhs - from.rho_tilde[i]));
    }
    if (res > 1e-9)
        throw NotAnEquilibrium("p0 residual " + std::to_string(res) +
                               " for the source periods");

    ReducedTargets to = reduced_targets(params, profiles_to);

    RequestVector p = p0;
    for (int sweep = 0; sweep < 1000000; ++sweep) {
        double change = 0.0;
        for (int i = 0; i < n; ++i) {
            if (to.rho_tilde[i] == 0.0) {
                change = std::max(change, p[i]);
                p[i] = 0.0;
                continue;
            }
            double others = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) others *= 1.0 - alpha * p[j];
            double next = to.rho_tilde[i] / others;
            change = std::max(change, std::abs(next - p[i]));
            p[i] = next;
        }
        if (trace) trace->push_back(p);
        if (change < 1e-12) return p;
    }
    throw NoConvergence("successive_update did not converge");
}

bool region_membership(const SystemParams& params,
                       const std::vector<NodeProfile>& profiles) {
    return solve(params, profiles).feasible;
}

}  // namespace csma
