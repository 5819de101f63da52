#pragma once

#include "csma/metrics.hpp"

#include <optional>

namespace csma {

/// A solved request vector with its branch and residual.
struct Equilibrium {
    enum class Branch { Better, Worse };
    RequestVector p;
    Branch branch = Branch::Better;
    double residual = 0.0; // max_i |r_i(p) - rho_i|
    double sum_p = 0.0;
};

struct FeasibilityVerdict {
    bool feasible = false;
    std::optional<Equilibrium> better;
    std::optional<Equilibrium> worse;
    double margin = 0.0; // g(p*) - ln(rho~_i*) at the mode
};

struct ReducedTargets {
    Vector rho_tilde; // rho~_i = exp(b N0/PT) T0 rho^_i / (T_i (1 - rho_t))
    int leader = -1;  // argmax rho~, lowest index on ties
};

/// Reduced right-hand sides of the equilibrium equations.
ReducedTargets reduced_targets(const SystemParams& params,
                               const std::vector<NodeProfile>& profiles);

/// Follower probabilities as a function of the leader's p. Zero targets
/// map to p_j = 0; p_j <= p_star always.
RequestVector follower_map(double p_star, const Vector& targets, int leader,
                           double alpha);

/// The solver's branch-selection objective
/// g(p) = ln p + sum_{j != leader} ln(1 - alpha p_j(p)),
/// exposed for diagnostics and the unimodality checks.
double solver_objective(double p_star, const Vector& targets, int leader,
                        double alpha);

/// Solves the equilibrium system for the profiles' demands. Returns the
/// better equilibrium (sum p <= (b+1)/b) and, when requested and it
/// exists, the worse one.
FeasibilityVerdict solve(const SystemParams& params,
                         const std::vector<NodeProfile>& profiles,
                         bool want_worse = false);

/// Coordinate-wise monotone iteration from an equilibrium for
/// profiles_from to one for profiles_to (periods only increase).
RequestVector successive_update(const SystemParams& params,
                                const std::vector<NodeProfile>& profiles_from,
                                const std::vector<NodeProfile>& profiles_to,
                                const RequestVector& p0,
                                std::vector<RequestVector>* trace = nullptr);

/// True iff the demand vector lies in the feasible throughput region.
bool region_membership(const SystemParams& params,
                       const std::vector<NodeProfile>& profiles);

}  // namespace csma
