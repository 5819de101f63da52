#pragma once

#include "csma/metrics.hpp"

namespace csma {

/// Total-power upper bound with the active regime and the request vector
/// attaining it (equal-period case only).
struct BoundReport {
    enum class Regime { Low, Mid, High };
    Regime regime = Regime::Low;
    double threshold_low = 0.0;  // M'b(1-Psi)/(1+M'+M'b(1-Psi))
    double threshold_high = 0.0; // b/(b+1)
    double bound = 0.0;
    RequestVector extremal_p;    // empty for unequal periods
};

/// Extrema of sum_i p_i prod_{j != i}(1 - alpha p_j) over the slice
/// {sum p = C, 0 <= p_i <= 1}, found by dense grid search.
struct Lemma1Extrema {
    RequestVector argmin;
    RequestVector argmax;
    double min = 0.0;
    double max = 0.0;
};

/// Result of the threshold search for Psi_{b,i+1} - Psi_{b,i}.
struct ZetaResult {
    int i = 0;
    double zeta = 0.0;
    bool sign_change = false; // false: positive over the whole scan range
};

/// Phi_{b,n}(x) = [1 + (n-1)x - n alpha x](1 - alpha x)^{n-2}
/// on 0 <= x <= 1/((n-1)b).
double phi(double b, int n, double x);

/// Psi_{b,n} = Phi_{b,n}(1/((n-1)b)) in closed form.
double psi(double b, int n);

/// Gamma(n) = (b+1)/b * (1 - 1/n)^{n-1}.
double gamma_fn(double b, int n);

/// Upper bound on total power at the better equilibrium. Requires b > 2.
BoundReport power_bound(const SystemParams& params,
                        const std::vector<NodeProfile>& profiles);

/// Max of total_power over the three candidate extremal vectors; equal
/// periods only. Agrees with power_bound(...).bound.
double bound_tightness_check(const SystemParams& params,
                             const std::vector<NodeProfile>& profiles);

/// Brute-force slice extrema for n <= 4, grid points per axis >= 200.
Lemma1Extrema lemma1_oracle(int n, double b, double C, int grid);

/// Largest b in (1, 2] where Psi_{b,i+1} - Psi_{b,i} changes sign,
/// by scan plus bisection.
ZetaResult zeta_search(int i, double tol = 1e-9);

}  // namespace csma
