#pragma once

#include "clup/rdt_clup.hpp"

#include <span>

namespace clup {

// box-on-[0,2] analogues of the e_fbox1 pieces, mixed over the two sign
// populations of the random start
double i_box1_term_i11(double gamma, double nu);
double i_box1_term_i21(double gamma, double nu);
double i_box1(double gamma, double nu, double rho);

// sqrt(alpha) sqrt(c1z + sigma^2) + I_box1 - nu s1 - gamma c1z
double xi_rd_1(const RdtParams& p, double c1z, double s1, double gamma, double nu, double rho);

// first-iterate moment primitives at the saddle (per sign population)
double s_x1(double gamma, double nu);
double s_xsq1(double gamma, double nu);
double s_x2(double gamma, double nu);
double s_xsq2(double gamma, double nu);

struct FirstIterSolution {
    double nu_hat = 0.0;
    double gamma_hat = 0.0;
    double c1z_hat = 0.0;   // in [0, 4]
    double s1_hat = 0.0;
    double xi1 = 0.0;
    double perr1 = 0.0;
    double e_norm_sq = 0.0;  // E ||x^(1,s)||^2
    double e_overlap = 0.0;  // E x_sol^T x^(1,s)
    double rho = 0.5;
    bool converged = false;
};

// minimal s1 with min_{c1z in [0,4]} max_{gamma,nu} xi_rd_1 = r, then the
// derived first-iterate moments and error probability
FirstIterSolution first_iter_solve(const RdtParams& p, double r, double rho);

// true iff the first iterate's E||x||^2 clears the lowest stationary c2
bool escape_check(const RdtParams& p, double r, double rho,
                  std::span<const StationaryPoint> stationary);

} // namespace clup
