#include "clup/clup.hpp"

#include "clup/rdt_clup.hpp"
#include "clup/rng.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace clup {

Eigen::VectorXd random_sign_vector(int n, std::uint64_t seed)
{
    SplitMix64 g(seed);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x(i) = g.sign() * amp;
    return x;
}

namespace {

double resolve_base_radius(const SolverContext& ctx, const ClupConfig& config)
{
    const ProblemInstance& inst = ctx.instance();
    if (config.radius_mode == RadiusMode::PerInstance)
        return config.r_sc * ctx.box_minimum().second;
    double r_plt_norm;
    if (config.theoretical_r_plt)
        r_plt_norm = *config.theoretical_r_plt;
    else
        r_plt_norm = r_plt_theory({inst.alpha, inst.sigma}).r_plt;
    return config.r_sc * std::sqrt(static_cast<double>(inst.n)) * r_plt_norm;
}

// Algorithm core. radius_at(i) supplies the per-iteration radius.
template <typename RadiusFn>
ClupResult run_core(const SolverContext& ctx, const ClupConfig& config,
                    const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed,
                    RadiusFn&& radius_at)
{
    const ProblemInstance& inst = ctx.instance();
    const int n = inst.n;
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));

    ClupResult out;
    out.seed = seed;

    Eigen::VectorXd x = x0 ? *x0 : random_sign_vector(n, seed);
    if (x.size() != n)
        throw std::invalid_argument("clup_run: x0 dimension mismatch");

    // Algorithm listing, steps 1-2: delta <- 1e10, c2^(0) <- delta^2
    double delta = 1e10;
    double c2_prev = delta * delta;

    InnerProblem pb;
    pb.extra_halfspaces = config.extra_halfspaces;
    SplitState split_state;

    Eigen::VectorXd x_s;
    int i = 0;
    while (i + 1 <= config.i_max && delta >= config.delta_min) {
        pb.w = x;
        pb.r = radius_at(i);
        out.radius = pb.r;
        SolverReport rep = solve_inner(ctx, pb, config.solver, &split_state);
        out.last_inner_status = rep.status;
        if (rep.status == SolveStatus::Infeasible) {
            out.converged = false;
            break;
        }
        x_s = rep.x_star;
        const double c2_next = std::pow(x.dot(x_s), 2);
        x = x_s / x_s.norm();
        delta = std::fabs(std::sqrt(c2_next) - std::sqrt(c2_prev));
        out.trace.push_back({c2_next, inst.x_sol.dot(x_s), delta, rep.iterations});
        c2_prev = c2_next;
        ++i;
    }

    out.converged = !out.trace.empty() && delta < config.delta_min &&
                    out.last_inner_status != SolveStatus::Infeasible;
    out.x_final = x;
    out.x_clup.resize(n);
    for (int k = 0; k < n; ++k)
        out.x_clup(k) = x(k) >= 0.0 ? amp : -amp;  // sign(0) -> +1/sqrt(n)
    if (x_s.size() == n)
        out.stats = overlap_stats(x_s, inst);
    else
        out.stats = overlap_stats(x, inst);
    return out;
}

} // namespace

ClupResult clup_run(const SolverContext& ctx, const ClupConfig& config,
                    const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed)
{
    if (config.radius_schedule)
        return clup_radius_schedule(ctx, config, x0, seed);
    const double r = resolve_base_radius(ctx, config);
    return run_core(ctx, config, x0, seed, [r](int) { return r; });
}

ClupResult clup_run(const ProblemInstance& inst, const ClupConfig& config,
                    const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed)
{
    SolverContext ctx(inst);
    return clup_run(ctx, config, x0, seed);
}

ClupResult clup_multistart(const SolverContext& ctx, const ClupConfig& config,
                           int num_starts, std::uint64_t seed)
{
    if (num_starts < 1)
        throw std::invalid_argument("clup_multistart: num_starts must be >= 1");
    ClupResult best;
    bool have = false;
    for (int j = 0; j < num_starts; ++j) {
        const std::uint64_t sj = (j == 0) ? seed : SplitMix64::derive(seed, static_cast<std::uint64_t>(j));
        ClupResult r = clup_run(ctx, config, std::nullopt, sj);
        const bool better = !have ||
                            (r.converged && !best.converged) ||
                            (r.converged == best.converged && r.stats.c2 > best.stats.c2);
        if (better) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

ClupResult clup_warmstart_polytope(const SolverContext& ctx, const ClupConfig& config)
{
    const ProblemInstance& inst = ctx.instance();
    const auto& [x_plt, r_min] = ctx.box_minimum();

    double c1_plt;
    if (config.polytope_c1)
        c1_plt = *config.polytope_c1;
    else
        c1_plt = r_plt_theory({inst.alpha, inst.sigma}).c1;

    // stage 1: start from the normalized polytope solution, constrained to
    // keep the overlap with it at least at the predicted polytope level
    ClupConfig stage1 = config;
    const double norm_plt = x_plt.norm();
    Eigen::VectorXd xhat = norm_plt > 0.0 ? (x_plt / norm_plt).eval() : x_plt;
    stage1.extra_halfspaces.push_back({xhat, c1_plt});
    ClupResult first = clup_run(ctx, stage1, xhat, inst.seed);

    // stage 2: plain CLuP from the stage-1 output
    ClupConfig stage2 = config;
    return clup_run(ctx, stage2, first.x_final, inst.seed);
}

ClupResult clup_radius_schedule(const SolverContext& ctx, const ClupConfig& config,
                                const std::optional<Eigen::VectorXd>& x0, std::uint64_t seed)
{
    if (!config.radius_schedule || config.radius_schedule->empty())
        throw std::invalid_argument("clup_radius_schedule: schedule must be non-empty");
    const auto& sched = *config.radius_schedule;
    for (std::size_t i = 1; i < sched.size(); ++i)
        if (sched[i] < sched[i - 1])
            throw std::invalid_argument("clup_radius_schedule: schedule must be non-decreasing");
    return run_core(ctx, config, x0, seed, [&sched](int i) {
        return sched[std::min<std::size_t>(static_cast<std::size_t>(i), sched.size() - 1)];
    });
}

nlohmann::json clup_result_to_json(const ClupResult& r, const ClupConfig& config)
{
    nlohmann::json trace = nlohmann::json::array();
    for (const auto& t : r.trace)
        trace.push_back({{"c2", t.c2}, {"c1", t.c1}, {"delta", t.delta},
                         {"inner_iterations", t.inner_iterations}});
    return nlohmann::json{
        {"seed", r.seed},
        {"config",
         {{"r_sc", config.r_sc},
          {"radius_mode", config.radius_mode == RadiusMode::PerInstance ? "per_instance" : "theoretical"},
          {"i_max", config.i_max},
          {"delta_min", config.delta_min},
          {"restarts", config.restarts}}},
        {"converged", r.converged},
        {"iterations", r.trace.size()},
        {"final", {{"c2", r.stats.c2}, {"c1", r.stats.c1}, {"ber", r.stats.ber}}},
        {"trace", trace}};
}

} // namespace clup
