#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace csma {

using Vector = Eigen::ArrayXd;

// A request probability vector p = (p_1,...,p_n), each entry in [0,1].
using RequestVector = Vector;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidCaptureRatio : Error { using Error::Error; };
struct InvalidRtsLength : Error { using Error::Error; };
struct InfeasibleLoad : Error { using Error::Error; };
struct TooManyNodes : Error { using Error::Error; };
struct NotAtEquilibrium : Error { using Error::Error; };
struct NotAnEquilibrium : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct CaptureRatioTooSmall : Error { using Error::Error; };
struct MultipleWinners : Error { using Error::Error; };

/// Global physical/MAC constants of the network.
struct SystemParams {
    int n = 0;                // number of nodes
    double b = 0.0;           // capture ratio, > 1
    double noise_ratio = 0.0; // N0 / PT
    int t0 = 1;               // handshake phase length in slots
    double rts_len = 0.0;     // actual RTS duration, 0 < rts_len < t0

    double alpha() const { return b / (1.0 + b); }
    double beta() const { return rts_len / static_cast<double>(t0); }
    double capture_factor() const { return std::exp(-b * noise_ratio); }
};

/// Frame success rate model P^s(T): monotone nondecreasing in T,
/// with values in (0,1].
struct FrameSuccess {
    enum class Kind { One, Saturating };
    Kind kind = Kind::One;
    // saturating form: 1 - c * exp(-T / tau), clipped to (0,1]
    double c = 0.0;
    double tau = 1.0;

    double operator()(int period) const {
        if (kind == Kind::One) return 1.0;
        double v = 1.0 - c * std::exp(-static_cast<double>(period) / tau);
        if (v > 1.0) v = 1.0;
        if (v <= 0.0) v = std::numeric_limits<double>::min();
        return v;
    }
};

/// Per-node configuration: transmission period, success model, demand.
struct NodeProfile {
    int period = 1;        // T_i, slots
    FrameSuccess frame_success;
    double demand = 0.0;   // rho_i, packets per slot
};

/// Constants derived once from a validated scenario.
struct DerivedConstants {
    double alpha = 0.0;
    double beta = 0.0;
    double capture_factor = 1.0;
    Vector rho_hat;          // rho_i / P^s_i(T_i)
    double rho_t = 0.0;      // sum of rho_hat
    Vector m_prime;          // (T_i/T0) * capture_factor
    std::vector<bool> zero_demand; // nodes excludable from the solve
};

/// Validates a scenario and computes the derived constants.
/// Throws InvalidCaptureRatio, InvalidRtsLength or InfeasibleLoad.
DerivedConstants validate(const SystemParams& params,
                          const std::vector<NodeProfile>& profiles);

}  // namespace csma
