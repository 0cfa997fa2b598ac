#pragma once

#include "clup/optimize.hpp"

#include <string>
#include <vector>

namespace clup {

struct RdtParams {
    double alpha = 0.8;
    double sigma = 0.0;
};

// piecewise per-coordinate value min_{s in [-1,1]} (gamma s^2 + (h+nu) s)
double f_box1(double h, double gamma, double nu);

// the per-coordinate minimizer, clamped to [-1, 1]
double optimal_x_coordinate(double h, double gamma, double nu);

struct EFbox1Terms {
    double i22 = 0.0;
    double i1 = 0.0;
    double i21 = 0.0;
    double value() const { return i22 - i1 + i21; }
};

// closed-form standard-normal expectation of f_box1
EFbox1Terms e_fbox1_terms(double gamma, double nu);
double e_fbox1(double gamma, double nu);

// sqrt(alpha) sqrt(1 - 2 c1 + c2 + sigma^2) + E f_box1 - nu c1 - gamma c2
double xi_rd(const RdtParams& p, double c2, double c1, double gamma, double nu);

// analytic first-order conditions of the (gamma, nu) maximization:
// E[s*] and E[s*^2] of the clamped per-coordinate minimizer
double e_sstar(double gamma, double nu);
double e_sstar_sq(double gamma, double nu);

struct SaddlePoint {
    double xi = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    bool converged = false;
};

// max over gamma > 0 and nu of xi_rd at fixed (c2, c1)
SaddlePoint xi_rd_saddle(const RdtParams& p, double c2, double c1,
                         const SaddlePoint* hint = nullptr);

// min over c1 in [0, (1+c2)/2] of the saddle value (global over the scanned
// range; multi-minima regimes are resolved by a dense pre-scan)
SaddlePoint min_over_c1(const RdtParams& p, double c2, double* c1_star);

struct PolytopeSolution {
    double r_plt = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    double perr = 0.0;
    bool converged = false;
};

// nested min over c2 in [0,1], c1 in [0,(1+c2)/2], max over (gamma, nu)
PolytopeSolution r_plt_theory(const RdtParams& p);

struct ClupPrediction {
    double c2 = 0.0;
    double c1 = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    double perr = 0.0;
    double r = 0.0;       // normalized radius r_sc * r_plt
    double r_plt = 0.0;
    bool at_c2_cap = false;          // no root below c2 = 1
    std::vector<double> all_roots;   // every located root of xi(c2) = r
    bool converged = false;
};

// largest c2 with min_c1 max_{gamma,nu} xi_rd = r_sc * r_plt, plus the error
// probability implied by the dual variable nu at the solution
ClupPrediction clup_rdt_predict(const RdtParams& p, double r_sc);

enum class ScanAxis { C1, C2 };

struct CurveScan {
    ScanAxis axis = ScanAxis::C1;
    double fixed_value = 0.0;
    std::vector<double> grid;
    std::vector<double> values;
    std::vector<std::pair<double, double>> local_minima;  // (location, value)
    std::string to_csv() const;
};

// axis C1: saddle value along c1 at fixed c2; axis C2: min-over-c1 value
// along c2. Grid must be strictly increasing.
CurveScan scan_xi(const RdtParams& p, ScanAxis axis, double fixed_value,
                  const std::vector<double>& grid);

struct StationaryPoint {
    double xi = 0.0;
    double c2 = 0.0;
    double c1 = 0.0;
    double nu = 0.0;
    double gamma = 0.0;
    double gamma1 = 0.0;
    double grad_norm = 0.0;
};

// Simultaneous zeros of the five partial derivatives of the gamma1-weighted
// Lagrangian -sqrt(c2) + gamma1 (xi_rd - r): points on the min-over-c1 curve
// where the value crosses r, with nu and gamma1 recovered from the closure
// relations. Deduplicated within 1e-6; may legitimately be empty.
std::vector<StationaryPoint> find_stationary_points(const RdtParams& p, double r);

// r_sc upper limit xi_ml / r_plt given an externally supplied ML objective
double r_sc_upper_limit(const RdtParams& p, double xi_ml);

struct OptimalRadius {
    double r_sc = 0.0;
    double perr = 0.0;
    ClupPrediction prediction;
    bool converged = false;
};

// choose r_sc in [1, xi_ml/r_plt] minimizing the predicted error probability
// (equivalently the dual variable nu at the prediction)
OptimalRadius r_sc_optimal_perr(const RdtParams& p);

} // namespace clup
