#pragma once

#include "csma/capture.hpp"

#include <vector>

namespace csma {

/// Steady-state per-node performance at a given request vector.
struct Performance {
    Vector throughput;          // r_i, packets per slot
    Vector power;               // S_i, fraction of slots transmitting
    double cycle_data_fraction; // sum_j G_j T_j / (T0 + sum_j G_j T_j)
};

/// Evaluates throughput r_i = P^s_i G_i T_i / (T0 + sum_j G_j T_j) and
/// power S_i = (p_i T~0 + G_i T_i) / (T0 + sum_j G_j T_j).
Performance performance(const RequestVector& p, const SystemParams& params,
                        const std::vector<NodeProfile>& profiles);

/// Equilibrium-form power S_i = rho_hat_i + beta (1 - rho_t) p_i.
/// Requires p to solve the equilibrium equations for the profiles'
/// demands; throws NotAtEquilibrium if the residual exceeds tol.
Vector power_at_equilibrium(const RequestVector& p, const SystemParams& params,
                            const std::vector<NodeProfile>& profiles,
                            double tol = 1e-9);

/// Total normalized power sum_i S_i.
double total_power(const RequestVector& p, const SystemParams& params,
                   const std::vector<NodeProfile>& profiles);

}  // namespace csma
