#include "csma/bounds.hpp"

#include <algorithm>

namespace csma {

double phi(double b, int n, double x) {
    if (n < 2) throw DomainError("phi requires n >= 2");
    const double xmax = 1.0 / ((n - 1) * b);
    if (x < -1e-15 || x > xmax * (1.0 + 1e-12))
        throw DomainError("phi argument outside [0, 1/((n-1)b)]");
    const double alpha = b / (1.0 + b);
    return (1.0 + (n - 1) * x - n * alpha * x) *
           std::pow(1.0 - alpha * x, n - 2);
}

double psi(double b, int n) {
    if (n < 2) throw DomainError("psi requires n >= 2");
    const double num = (n - 1) * (1.0 + b) * (1.0 + b) - n * b;
    const double den = b * (1.0 + b) * (n - 1);
    const double base = (b * n + n - b - 2.0) / ((1.0 + b) * (n - 1));
    return num / den * std::pow(base, n - 2);
}

double gamma_fn(double b, int n) {
    if (n < 1) throw DomainError("gamma requires n >= 1");
    return (b + 1.0) / b * std::pow(1.0 - 1.0 / n, n - 1);
}

BoundReport power_bound(const SystemParams& params,
                        const std::vector<NodeProfile>& profiles) {
    if (params.b <= 2.0)
        throw CaptureRatioTooSmall("the power bound requires b > 2");
    DerivedConstants d = validate(params, profiles);
    const int n = params.n;
    const double b = params.b;
    const double beta = d.beta;
    const double over_alpha = (b + 1.0) / b;

    BoundReport rep;
    rep.threshold_high = b / (b + 1.0);

    if (n == 1) {
        const double mp = d.m_prime[0];
        rep.threshold_low = rep.threshold_high;
        rep.regime = BoundReport::Regime::Low;
        rep.bound = (mp + beta) / (mp + 1.0);
        rep.extremal_p = RequestVector::Ones(1);
        return rep;
    }

    const double Psi = psi(b, n);
    const double Gamma = gamma_fn(b, n);
    bool equal_periods = true;
    for (int i = 1; i < n; ++i)
        if (profiles[i].period != profiles[0].period) equal_periods = false;

    // unequal periods fall back to the max/min period systems
    const double m_hi = d.m_prime.maxCoeff();
    const double m_lo = d.m_prime.minCoeff();
    const double mp = equal_periods ? d.m_prime[0] : m_hi;

    rep.threshold_low =
        mp * b * (1.0 - Psi) / (1.0 + mp + mp * b * (1.0 - Psi));

    if (beta <= rep.threshold_low) {
        rep.regime = BoundReport::Regime::Low;
        rep.bound = (m_hi + beta) / (m_hi + 1.0);
        if (equal_periods) {
            rep.extremal_p = RequestVector::Zero(n);
            rep.extremal_p[0] = 1.0;
        }
    } else if (beta < rep.threshold_high) {
        rep.regime = BoundReport::Regime::Mid;
        rep.bound = (m_hi * Psi + beta * over_alpha) / (m_hi * Psi + 1.0);
        if (equal_periods) {
            rep.extremal_p =
                RequestVector::Constant(n, 1.0 / ((n - 1) * b));
            rep.extremal_p[0] = 1.0;
        }
    } else {
        rep.regime = BoundReport::Regime::High;
        rep.bound = (m_lo * Gamma + beta * over_alpha) / (m_lo * Gamma + 1.0);
        if (equal_periods)
            rep.extremal_p = RequestVector::Constant(n, over_alpha / n);
    }
    return rep;
}

double bound_tightness_check(const SystemParams& params,
                             const std::vector<NodeProfile>& profiles) {
    if (params.b <= 2.0)
        throw CaptureRatioTooSmall("the power bound requires b > 2");
    const int n = params.n;
    for (int i = 1; i < n; ++i)
        if (profiles[i].period != profiles[0].period)
            throw Error("tightness check needs equal periods");

    std::vector<RequestVector> candidates;
    if (n == 1) {
        candidates.push_back(RequestVector::Ones(1));
    } else {
        RequestVector one_hot = RequestVector::Zero(n);
        one_hot[0] = 1.0;
        candidates.push_back(one_hot);
        RequestVector mid = RequestVector::Constant(n, 1.0 / ((n - 1) * params.b));
        mid[0] = 1.0;
        candidates.push_back(mid);
        candidates.push_back(
            RequestVector::Constant(n, (params.b + 1.0) / (n * params.b)));
    }
    double best = 0.0;
    for (const auto& p : candidates)
        best = std::max(best, total_power(p, params, profiles));
    return best;
}

Lemma1Extrema lemma1_oracle(int n, double b, double C, int grid) {
    if (n < 2 || n > 4) throw TooManyNodes("lemma1_oracle supports 2 <= n <= 4");
    if (grid < 200) throw DomainError("grid must be at least 200");
    if (C <= 0.0 || C > (b + 1.0) / b)
        throw DomainError("C must lie in (0, (b+1)/b]");
    const double alpha = b / (1.0 + b);
    const double step = 1.0 / grid;

    Lemma1Extrema ex;
    ex.min = std::numeric_limits<double>::infinity();
    ex.max = -std::numeric_limits<double>::infinity();
    RequestVector p = RequestVector::Zero(n);

    auto eval = [&](const RequestVector& q) {
        double prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= 1.0 - alpha * q[i];
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += q[i] * prod / (1.0 - alpha * q[i]);
        if (sum < ex.min) { ex.min = sum; ex.argmin = q; }
        if (sum > ex.max) { ex.max = sum; ex.argmax = q; }
    };

    // p_1..p_{n-1} on the axis grid, p_n determined by the sum constraint
    std::vector<int> idx(n - 1, 0);
    const int steps = grid;
    while (true) {
        double partial = 0.0;
        for (int k = 0; k < n - 1; ++k) {
            p[k] = std::min(1.0, idx[k] * step);
            partial += p[k];
        }
        double last = C - partial;
        if (last >= -1e-12 && last <= 1.0 + 1e-12) {
            p[n - 1] = std::clamp(last, 0.0, 1.0);
            eval(p);
        }
        int k = 0;
        while (k < n - 1 && ++idx[k] > steps) {
            idx[k] = 0;
            ++k;
        }
        if (k == n - 1) break;
    }
    return ex;
}

ZetaResult zeta_search(int i, double tol) {
    if (i < 2) throw DomainError("zeta_search requires i >= 2");
    auto diff = [i](double b) { return psi(b, i + 1) - psi(b, i); };

    const double b_lo = 1.0 + 1e-6;
    const double b_hi = 2.0;
    const double step = 1e-3;

    ZetaResult res;
    res.i = i;
    double last_cross = -1.0;
    double prev_b = b_lo;
    double prev_v = diff(prev_b);
    for (double b = b_lo + step; b <= b_hi + 0.5 * step; b += step) {
        double bb = std::min(b, b_hi);
        double v = diff(bb);
        if ((prev_v < 0.0 && v >= 0.0) || (prev_v > 0.0 && v <= 0.0))
            last_cross = prev_b;
        prev_b = bb;
        prev_v = v;
    }
    if (last_cross < 0.0) {
        res.sign_change = false;
        res.zeta = b_lo;
        return res;
    }
    res.sign_change = true;
    double lo = last_cross, hi = std::min(last_cross + step, b_hi);
    double flo = diff(lo);
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        double v = diff(mid);
        if ((flo < 0.0) == (v < 0.0)) {
            lo = mid;
            flo = v;
        } else {
            hi = mid;
        }
    }
    res.zeta = 0.5 * (lo + hi);
    return res;
}

}  // namespace csma
