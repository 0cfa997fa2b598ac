#pragma once

#include <functional>
#include <vector>

namespace clup {

struct OptimizerSettings {
    double x_tol = 1e-10;  // absolute tolerance on the argument
    double f_tol = 1e-12;  // absolute tolerance on the value
    int max_evals = 20000;
};

struct ScalarResult {
    double x = 0.0;
    double f = 0.0;
    int evals = 0;
    bool converged = false;
};

struct RootResult {
    double x = 0.0;
    int evals = 0;
    bool converged = false;
};

struct NdResult {
    std::vector<double> x;
    double f = 0.0;
    int evals = 0;
    bool converged = false;
};

using ScalarFn = std::function<double(double)>;
using NdFn = std::function<double(const std::vector<double>&)>;

// Brent's bounded minimization (golden section + successive parabolic
// interpolation) on [lo, hi].
ScalarResult minimize_scalar(const ScalarFn& f, double lo, double hi,
                             const OptimizerSettings& settings = {});

// Brent's root finder; requires a sign change on [lo, hi], otherwise the
// result carries converged = false.
RootResult find_root(const ScalarFn& f, double lo, double hi,
                     const OptimizerSettings& settings = {});

// Nelder-Mead maximization with deterministic restarts from perturbed
// simplexes around the incumbent. `steps` sets the initial simplex edge per
// coordinate. No hidden RNG: identical inputs give identical results.
NdResult maximize_nd(const NdFn& f, const std::vector<double>& start,
                     const std::vector<double>& steps,
                     const OptimizerSettings& settings = {}, int restarts = 3);

NdResult minimize_nd(const NdFn& f, const std::vector<double>& start,
                     const std::vector<double>& steps,
                     const OptimizerSettings& settings = {}, int restarts = 3);

} // namespace clup
