#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <nlohmann/json_fwd.hpp>

namespace clup {

// One realized MIMO system y = A x_sol + sigma v with A, v i.i.d. standard
// normal and x_sol uniform over {-1/sqrt(n), +1/sqrt(n)}^n. Immutable after
// construction; regenerable from (n, alpha, sigma, seed).
struct ProblemInstance {
    int n = 0;
    int m = 0;
    double alpha = 0.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd A;
    Eigen::VectorXd x_sol;
    Eigen::VectorXd v;
    Eigen::VectorXd y;
};

struct OverlapStats {
    double c2 = 0.0;   // ||x||^2
    double c1 = 0.0;   // x_sol^T x
    double ber = 0.0;  // fraction of sign mismatches, sign(0) counted as error
};

// sigma = 10^(-snr_db/20), so that 10 log10(1/sigma^2) = snr_db
double snr_db_to_sigma(double snr_db);

// m = round(alpha n), ties up. Throws std::invalid_argument if the resulting
// dimensions are degenerate.
ProblemInstance generate_instance(int n, double alpha, double sigma, std::uint64_t seed);

OverlapStats overlap_stats(const Eigen::VectorXd& x, const ProblemInstance& inst);

// {n, m, alpha, sigma, seed}; matrices are regenerated from the seed
nlohmann::json instance_to_json(const ProblemInstance& inst);
ProblemInstance instance_from_json(const nlohmann::json& j);

} // namespace clup
