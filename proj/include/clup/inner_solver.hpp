#pragma once

#include "clup/model.hpp"

#include <Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

namespace clup {

// Per-instance factorization cache: A^T A = Q T Q^T with T symmetric
// tridiagonal. Every (I + mu A^T A) solve needed by the secular projections
// then costs O(n) after one O(n^2) basis transform, and the factorization is
// shared by all inner solves on the same instance. Bound to one worker at a
// time; distinct instances solve fully in parallel.
class SolverContext {
public:
    explicit SolverContext(const ProblemInstance& inst);

    const ProblemInstance& instance() const { return *inst_; }
    double box_halfwidth() const { return amp_; }

    // Q^T v and Q v
    Eigen::VectorXd to_basis(const Eigen::VectorXd& v) const { return Q_.transpose() * v; }
    Eigen::VectorXd from_basis(const Eigen::VectorXd& v) const { return Q_ * v; }

    // solve (a I + b T) x = rhs, a > 0, b >= 0 (SPD tridiagonal LDL^T)
    void tri_solve(double a, double b, const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const;

    // ||y - A x||^2 for x given in the T-basis
    double residual_sq_basis(const Eigen::VectorXd& xt) const;

    // argmin ||x - v|| s.t. ||y - A x|| <= r, in the T-basis.
    // Returns false when the ball is empty (min residual over R^n exceeds r).
    bool project_ball_basis(const Eigen::VectorXd& vt, double r, Eigen::VectorXd& out,
                            double& mu_warm) const;

    // min-norm least squares residual: inf_x ||y - A x||
    double min_full_residual() const;

    // cached box-constrained minimum residual (computed on first use)
    const std::pair<Eigen::VectorXd, double>& box_minimum() const;

private:
    const ProblemInstance* inst_;
    double amp_;     // 1/sqrt(n)
    double yty_;
    Eigen::VectorXd bt_;     // Q^T A^T y
    Eigen::MatrixXd Q_;
    Eigen::VectorXd Tdiag_, Tsub_;
    double t_scale_;         // trace(T)/n, used to scale multiplier brackets
    mutable std::optional<std::pair<Eigen::VectorXd, double>> box_min_;
};

struct HalfSpace {
    Eigen::VectorXd a;
    double b = 0.0;  // constraint a^T x >= b
};

// minimize -w^T x  s.t.  ||y - A x||_2 <= r,  x in [-1/sqrt(n), 1/sqrt(n)]^n,
// and optionally a_j^T x >= b_j
struct InnerProblem {
    Eigen::VectorXd w;
    double r = 0.0;
    std::vector<HalfSpace> extra_halfspaces;
};

enum class SolveStatus { Optimal, Infeasible, MaxIterations };

struct SolverReport {
    Eigen::VectorXd x_star;
    double objective = 0.0;       // -w^T x_star
    double residual = 0.0;        // ||y - A x_star||
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    double kkt_residual = 0.0;
    std::vector<double> merit;    // per-iteration splitting displacement norm
};

// Warm-start state for the splitting scheme, reusable across successive
// solves on the same instance (the CLuP outer loop).
struct SplitState {
    std::vector<Eigen::VectorXd> z;
    double mu_warm = 1.0;
};

struct SplitOptions {
    double tol_feas = 1e-8;
    double tol_kkt = 1e-8;
    int max_iter = 20000;
    double step = 0.0;        // prox step t; 0 -> 1/sqrt(n)
    double relaxation = 1.6;  // omega in (0, 2)
    bool record_merit = true;
};

SolverReport solve_inner(const SolverContext& ctx, const InnerProblem& problem,
                         const SplitOptions& opts = {}, SplitState* state = nullptr);

// argmin ||x - x0|| s.t. ||y - A x|| <= r. Throws std::runtime_error when the
// ball is empty.
Eigen::VectorXd project_residual_ball(const Eigen::VectorXd& x0, const SolverContext& ctx, double r);
Eigen::VectorXd project_residual_ball(const Eigen::VectorXd& x0, const ProblemInstance& inst, double r);

// minimize ||y - A x|| over the box; returns (x_plt, achieved residual)
std::pair<Eigen::VectorXd, double> min_box_residual(const SolverContext& ctx,
                                                    double tol = 1e-10, int max_iter = 20000);
std::pair<Eigen::VectorXd, double> min_box_residual(const ProblemInstance& inst);

} // namespace clup
