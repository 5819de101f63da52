#include "csma/metrics.hpp"

namespace csma {

Performance performance(const RequestVector& p, const SystemParams& params,
                        const std::vector<NodeProfile>& profiles) {
    const int n = params.n;
    GrantVector g = grant_probabilities(p, params);
    double data = 0.0;
    for (int i = 0; i < n; ++i) data += g[i] * profiles[i].period;
    const double denom = params.t0 + data;

    Performance perf;
    perf.throughput = Vector::Zero(n);
    perf.power = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        const double ps = profiles[i].frame_success(profiles[i].period);
        perf.throughput[i] = ps * g[i] * profiles[i].period / denom;
        perf.power[i] =
            (p[i] * params.rts_len + g[i] * profiles[i].period) / denom;
    }
    perf.cycle_data_fraction = data / denom;
    return perf;
}

Vector power_at_equilibrium(const RequestVector& p, const SystemParams& params,
                            const std::vector<NodeProfile>& profiles,
                            double tol) {
    DerivedConstants d = validate(params, profiles);
    // residual of the reduced equilibrium equations in rho~-space
    GrantVector g = grant_probabilities(p, params);
    double residual = 0.0;
    for (int i = 0; i < params.n; ++i) {
        double target = params.t0 * d.rho_hat[i] /
                        (profiles[i].period * (1.0 - d.rho_t));
        residual = std::max(residual, std::abs(g[i] - target));
    }
    if (residual > tol)
        throw NotAtEquilibrium("equilibrium residual " +
                               std::to_string(residual) + " exceeds tolerance");
    return d.rho_hat + d.beta * (1.0 - d.rho_t) * p;
}

double total_power(const RequestVector& p, const SystemParams& params,
                   const std::vector<NodeProfile>& profiles) {
    return performance(p, params, profiles).power.sum();
}

}  // namespace csma
