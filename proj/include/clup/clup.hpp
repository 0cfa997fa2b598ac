#pragma once

#include "clup/inner_solver.hpp"
#include "clup/model.hpp"

#include <cstdint>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <vector>

namespace clup {

enum class RadiusMode { PerInstance, Theoretical };
enum class WarmStartKind { RandomSign, PolytopeRound, PolytopeWithOverlapConstraint };

struct ClupConfig {
    double r_sc = 1.3;
    RadiusMode radius_mode = RadiusMode::PerInstance;
    int i_max = 50;
    double delta_min = 1e-8;
    int restarts = 1;
    std::optional<std::vector<double>> radius_schedule;  // absolute radii per iteration
    WarmStartKind warm_start = WarmStartKind::RandomSign;
    // normalized polytope radius r_plt(alpha, sigma); used by Theoretical mode
    // (r = r_sc * sqrt(n) * r_plt). Computed on demand when unset.
    std::optional<double> theoretical_r_plt;
    // polytope overlap prediction c1_plt, used by the warm-start variant
    std::optional<double> polytope_c1;
    std::vector<HalfSpace> extra_halfspaces;  // forwarded to every inner solve
    SplitOptions solver;
};

struct ClupTraceEntry {
    double c2 = 0.0;     // ((x^(i))^T x^(i+1,s))^2
    double c1 = 0.0;     // x_sol^T x^(i+1,s)
    double delta = 0.0;  // |sqrt(c2^(i+1)) - sqrt(c2^(i))|
    int inner_iterations = 0;
};

struct ClupResult {
    Eigen::VectorXd x_final;  // normalized final iterate
    Eigen::VectorXd x_clup;   // sign-rounded, entries +-1/sqrt(n)
    std::vector<ClupTraceEntry> trace;
    bool converged = false;
    OverlapStats stats;       // of the final unnormalized inner solution
    double radius = 0.0;      // absolute radius used (last one under a schedule)
    std::uint64_t seed = 0;
    SolveStatus last_inner_status = SolveStatus::Optimal;
};

// Algorithm: iterate x^(i+1,s) = argmin -(x^(i))^T x over the radius-r ball
// intersected with the cube, normalize, stop when the objective gap delta
// falls below delta_min or i_max is reached.
ClupResult clup_run(const SolverContext& ctx, const ClupConfig& config,
                    const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed);
ClupResult clup_run(const ProblemInstance& inst, const ClupConfig& config,
                    const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed);

// Best of num_starts independent runs, selected by the largest final c2.
ClupResult clup_multistart(const SolverContext& ctx, const ClupConfig& config,
                           int num_starts, std::uint64_t seed);

// Two-stage variant: stage 1 starts from the polytope solution with the extra
// half-space xhat^T x >= c1_plt, stage 2 reruns plain CLuP from the stage-1
// output.
ClupResult clup_warmstart_polytope(const SolverContext& ctx, const ClupConfig& config);

// Per-iteration radii (validated non-empty, non-decreasing; last value reused
// once the schedule is exhausted).
ClupResult clup_radius_schedule(const SolverContext& ctx, const ClupConfig& config,
                                const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed);

nlohmann::json clup_result_to_json(const ClupResult& r, const ClupConfig& config);

// uniform draw from {-1/sqrt(n), +1/sqrt(n)}^n
Eigen::VectorXd random_sign_vector(int n, std::uint64_t seed);

} // namespace clup
