#pragma once

#include "clup/rdt_clup.hpp"

#include <string>
#include <vector>

namespace clup {

// optimal dual variable of the ML random dual: sqrt(2) erfinv(-c1)
double nu_hat_ml(double c1);

// pre-optimization form xi^(ml)(c1, nu); its nu-derivative is -c1 - erf(nu/sqrt(2))
double xi_rd_ml_nu(const RdtParams& p, double c1, double nu);

// nu-optimized form: sqrt(alpha) sqrt(2 - 2 c1 + sigma^2) - sqrt(2/pi) exp(-erfinv(c1)^2)
double xi_rd_ml(const RdtParams& p, double c1);

struct MlLocalMin {
    double c1 = 0.0;
    double xi = 0.0;
    double perr = 0.0;
};

struct MlRdtSolution {
    double c1_global = 0.0;
    double xi_global = 0.0;
    double perr = 0.0;     // (1 - c1_global) / 2
    double nu_hat = 0.0;
    std::vector<MlLocalMin> local_minima;  // sorted by xi, global first
};

// all local minima of xi_rd_ml over c1 in [0, cap) via a dense scan (linear
// head plus logarithmic tail towards c1 = 1, where the high-SNR minimizers
// live) refined by bounded scalar minimization
MlRdtSolution ml_minimize(const RdtParams& p);

struct MlCriticalSnrs {
    double snr_multi_onset_db = 0.0;
    double snr_discontinuity_db = 0.0;
    bool found = false;
};

// largest SNR with two local minima, and the SNR where the two minima
// exchange global status (both by bisection to 1e-3 dB)
MlCriticalSnrs ml_critical_snrs(double alpha);

struct Ml1flRow {
    double snr_db;
    double xi_1fl;
    double perr_1fl;
};

// 1FL-lifted ML reference numbers (reporting constants, never computed here)
const std::vector<Ml1flRow>& ml_1fl_constants();

// CSV: snr_db, xi, perr, n_minima
std::string ml_curve_csv(double alpha, const std::vector<double>& snr_db);

} // namespace clup
