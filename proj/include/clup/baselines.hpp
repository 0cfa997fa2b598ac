#pragma once

#include "clup/inner_solver.hpp"
#include "clup/model.hpp"

#include <cstdint>

namespace clup {

struct DetectorResult {
    Eigen::VectorXd x_hat;   // entries +-1/sqrt(n)
    double residual = 0.0;   // ||y - A x_hat|| for bit_flip, relaxation optimum otherwise
};

// sign-rounded box relaxation; residual is the box optimum
DetectorResult polytope_detect(const SolverContext& ctx);
DetectorResult polytope_detect(const ProblemInstance& inst);

// sign-rounded minimizer of ||y - A x|| over the unit ball, via the same
// secular-equation machinery with the roles of the ball and the residual
// swapped
DetectorResult ball_detect(const SolverContext& ctx);
DetectorResult ball_detect(const ProblemInstance& inst);

// greedy steepest single-bit flips with O(m) incremental residual updates;
// best over `restarts` starts (the first from x_init, the rest random)
DetectorResult bit_flip_ml(const ProblemInstance& inst, const Eigen::VectorXd& x_init,
                           int restarts, std::uint64_t seed);

} // namespace clup
