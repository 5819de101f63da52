#include "csma/model.hpp"

namespace csma {

DerivedConstants validate(const SystemParams& params,
                          const std::vector<NodeProfile>& profiles) {
    if (params.n <= 0)
        throw Error("node count must be positive");
    if (static_cast<int>(profiles.size()) != params.n)
        throw Error("profiles length does not match n");
    if (params.b <= 1.0)
        throw InvalidCaptureRatio("capture ratio b must exceed 1, got " +
                                  std::to_string(params.b));
    if (params.t0 <= 0)
        throw Error("handshake length t0 must be positive");
    if (params.rts_len <= 0.0 || params.rts_len >= params.t0)
        throw InvalidRtsLength("rts_len must lie in (0, t0)");
    if (params.noise_ratio < 0.0)
        throw Error("noise_ratio must be nonnegative");

    DerivedConstants d;
    d.alpha = params.alpha();
    d.beta = params.beta();
    d.capture_factor = params.capture_factor();
    d.rho_hat = Vector::Zero(params.n);
    d.m_prime = Vector::Zero(params.n);
    d.zero_demand.resize(params.n, false);

    for (int i = 0; i < params.n; ++i) {
        const NodeProfile& np = profiles[i];
        if (np.period <= 0)
            throw Error("period T_i must be positive");
        if (np.demand < 0.0)
            throw Error("demand rho_i must be nonnegative");
        double ps = np.frame_success(np.period);
        if (!(ps > 0.0) || ps > 1.0)
            throw Error("frame success rate must lie in (0,1]");
        d.rho_hat[i] = np.demand / ps;
        d.m_prime[i] =
            static_cast<double>(np.period) / params.t0 * d.capture_factor;
        d.zero_demand[i] = (np.demand == 0.0);
    }
    d.rho_t = d.rho_hat.sum();
    if (d.rho_t >= 1.0)
        throw InfeasibleLoad("total effective demand rho_t = " +
                             std::to_string(d.rho_t) + " must be below 1");
    return d;
}

}  // namespace csma
