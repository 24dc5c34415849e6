#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfrl/mlp.hpp"

namespace cfrl {

struct SelftestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Embedded release-gate oracles: backprop vs central finite differences,
// a hand-computed Adam step, the closed-form kinematic gap trajectory,
// long-run Ornstein-Uhlenbeck statistics, lognormal fit recovery, and the
// reward anchor values.
std::vector<SelftestResult> run_selftest(std::uint64_t seed = 12345);

// Largest elementwise relative error between `analytic` and the central
// finite-difference gradient of the network's scalar output with respect to
// theta followed by the input. Shared by the selftest, the unit tests and
// the acceptance suite; `analytic` may come from any gradient routine, which
// lets tests confirm the check trips on a wrong gradient.
double gradient_rel_error_vs_fd(const MlpParams& params, std::span<const double> input,
                                std::span<const double> analytic_theta_grad,
                                std::span<const double> analytic_input_grad,
                                double fd_step = 1e-5);

// Convenience wrapper: backward-pass gradients of a random instance checked
// against finite differences.
double gradient_check_max_error(const MlpParams& params, std::span<const double> input,
                                double fd_step = 1e-5);

}  // namespace cfrl
