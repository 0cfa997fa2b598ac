#include "clup/model.hpp"

#include "clup/rng.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace clup {

double snr_db_to_sigma(double snr_db)
{
    return std::pow(10.0, -snr_db / 20.0);
}

ProblemInstance generate_instance(int n, double alpha, double sigma, std::uint64_t seed)
{
    if (n < 1)
        throw std::invalid_argument("generate_instance: n must be >= 1");
    if (!(alpha > 0.0))
        throw std::invalid_argument("generate_instance: alpha must be positive");
    if (sigma < 0.0)
        throw std::invalid_argument("generate_instance: sigma must be nonnegative");

    const int m = static_cast<int>(std::floor(alpha * n + 0.5));
    if (m < 1)
        throw std::invalid_argument("generate_instance: round(alpha*n) must be >= 1");

    ProblemInstance inst;
    inst.n = n;
    inst.m = m;
    inst.alpha = alpha;
    inst.sigma = sigma;
    inst.seed = seed;

    // fixed draw order: A column-major, then x_sol, then v
    SplitMix64 g(seed);
    inst.A.resize(m, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            inst.A(i, j) = g.gaussian();

    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    inst.x_sol.resize(n);
    for (int i = 0; i < n; ++i)
        inst.x_sol(i) = g.sign() * amp;

    inst.v.resize(m);
    for (int i = 0; i < m; ++i)
        inst.v(i) = g.gaussian();

    inst.y = inst.A * inst.x_sol + sigma * inst.v;
    return inst;
}

OverlapStats overlap_stats(const Eigen::VectorXd& x, const ProblemInstance& inst)
{
    if (x.size() != inst.n)
        throw std::invalid_argument("overlap_stats: dimension mismatch");
    OverlapStats s;
    s.c2 = x.squaredNorm();
    s.c1 = inst.x_sol.dot(x);
    int errors = 0;
    for (int i = 0; i < inst.n; ++i)
        if (x(i) * inst.x_sol(i) <= 0.0)
            ++errors;
    s.ber = static_cast<double>(errors) / static_cast<double>(inst.n);
    return s;
}

nlohmann::json instance_to_json(const ProblemInstance& inst)
{
    return nlohmann::json{{"n", inst.n},
                          {"m", inst.m},
                          {"alpha", inst.alpha},
                          {"sigma", inst.sigma},
                          {"seed", inst.seed}};
}

ProblemInstance instance_from_json(const nlohmann::json& j)
{
    ProblemInstance inst = generate_instance(j.at("n").get<int>(), j.at("alpha").get<double>(),
                                             j.at("sigma").get<double>(), j.at("seed").get<std::uint64_t>());
    if (j.contains("m") && j.at("m").get<int>() != inst.m)
        throw std::invalid_argument("instance_from_json: inconsistent m");
    return inst;
}

} // namespace clup
