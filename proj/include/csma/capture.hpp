#pragma once

#include "csma/model.hpp"

namespace csma {

// Per-handshake grant probabilities G_i. Each G_i <= p_i and the entries
// sum to at most capture_factor (at most one grant since b > 1).
using GrantVector = Vector;

/// Probability that a tagged node among s simultaneous requesters has
/// SINR above the capture ratio: (1/(1+b))^{s-1} * exp(-b * noise_ratio).
double conditional_capture(int s, double b, double noise_ratio);

/// Closed-form grant probabilities:
/// G_i = capture_factor * p_i * prod_{j != i} (1 - alpha p_j).
GrantVector grant_probabilities(const RequestVector& p,
                                const SystemParams& params);

/// Independent oracle: sums over all 2^n requester subsets.
/// Throws TooManyNodes for n > 20.
GrantVector grant_oracle_enum(const RequestVector& p,
                              const SystemParams& params);

}  // namespace csma
