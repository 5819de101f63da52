#pragma once

#include "csma/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace csma {

struct SimConfig {
    std::int64_t slots = 0;   // simulated horizon per replication
    std::uint64_t seed = 0;
    int replications = 1;
};

/// Empirical counterpart of the analytic Performance.
struct SimReport {
    Vector grants;      // per-node grant rate per handshake phase
    Vector throughput;  // successful data packets / counted slots
    Vector power;       // transmitting-slot fraction
    Vector grants_stderr;
    Vector throughput_stderr;
    Vector power_stderr;
    std::int64_t handshakes = 0; // total over all replications
};

// Counter-based generator: every draw is keyed by
// (seed, replication, phase, node, stream), so replication order and
// thread count cannot change the results.
struct PhaseRng {
    std::uint64_t base;

    PhaseRng(std::uint64_t seed, std::uint64_t replication,
             std::uint64_t phase);

    double uniform(std::uint64_t node, std::uint64_t stream) const;
    double exponential(std::uint64_t node, std::uint64_t stream) const;
};

/// Resolves one handshake: returns the unique requester with SINR above
/// the capture ratio, or nothing. Throws MultipleWinners if uniqueness
/// fails (only possible with b <= 1 misuse).
std::optional<int> capture_trial(const std::vector<bool>& request_mask,
                                 const SystemParams& params,
                                 const PhaseRng& rng);

/// Slot-level Monte Carlo of the handshake/transmission protocol.
SimReport simulate(const SystemParams& params,
                   const std::vector<NodeProfile>& profiles,
                   const RequestVector& p, const SimConfig& cfg);

}  // namespace csma
