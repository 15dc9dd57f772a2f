#pragma once

// Gradient descent to critical points, Coulomb gauge fixing, the sup-norm
// bound check and the string-method saddle search along large-gauge loops.
//
// Descent works in the L2 metric on (psi, Theta) with Theta = a / h the
// connection components, so the gradient is (2 el_residual_phi, el_residual_A / 2).

#include <cstdint>
#include <vector>

#include "swflow/functional.hpp"

namespace swflow {

struct OptimizerConfig {
    double initial_step = 1e-2;
    double armijo_shrink = 0.5;
    double armijo_slope = 1e-4;
    double residual_tol = 1e-8;
    int max_iter = 20000;
    int gauge_fix_every = 0;
    std::uint64_t seed = 0;

    void validate() const;  // throws Error naming the offending field
};

enum class Termination { Converged, MaxIterations, Stagnated };
const char* to_string(Termination t);

struct TraceRow {
    int iteration;
    double total, curvature_term, kinetic_term, quartic_term, coupling_term;
    double residual_phi, residual_A, sup_phi_sq;
};

struct MinimizeReport {
    int iterations = 0;
    bool converged = false;
    Termination termination = Termination::MaxIterations;
    EnergyBreakdown energy{};
    double residual_phi = 0.0;
    double residual_A = 0.0;
    double sup_phi_sq = 0.0;
    bool linfty_bound_satisfied = false;
    std::vector<TraceRow> trace{};
    Configuration final_config;
};

MinimizeReport minimize(const Configuration& c0, const ScalarCurvatureField& k, const OptimizerConfig& opts);

struct GaugeFixOptions {
    double tolerance = 1e-14;  // relative residual of the Poisson solve
    int max_iter = 0;          // 0: ten times the site count
};

// Coulomb representative: the transform theta minimizing sum |a + d theta|^2,
// normalized by theta(origin) = 0.
Configuration gauge_fix(const Configuration& c, const GaugeFixOptions& opts = {});

struct LinftyReport {
    double sup_phi_sq;
    double bound;
    bool satisfied;
};
LinftyReport linfty_check(const SpinorField& phi, const ScalarCurvatureField& k, double tolerance = 1e-6);

struct SaddleReport {
    int images = 0;
    std::vector<EnergyBreakdown> profile;
    int max_index = 0;
    double residual_phi = 0.0;
    double residual_A = 0.0;
    std::array<int, kDim> winding{};
    int sweeps = 0;
    bool converged = false;
    double path_residual = 0.0;  // worst perpendicular gradient among non-climbing images
    std::vector<Configuration> path;

    const EnergyBreakdown& candidate() const { return profile[max_index]; }
};

// String method on the loop A + t dg_n/g_n, phi -> g_n^-1 phi (g_n the large
// transform of winding n) with fixed endpoints, upwind tangents, per-image
// Armijo-safeguarded Barzilai-Borwein steps and equal-arclength
// redistribution every sweep. Converged when the max-energy image meets
// residual_tol and every image's perpendicular gradient is within
// 100 * residual_tol. max_iter bounds the sweep count.
SaddleReport saddle_search(const Configuration& cmin, const ScalarCurvatureField& k, const std::array<int, kDim>& n,
                           int images, const OptimizerConfig& opts);

}  // namespace swflow
