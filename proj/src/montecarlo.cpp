#include "clup/montecarlo.hpp"

#include "clup/baselines.hpp"
#include "clup/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace clup {

TrialOutcome run_trial(const TrialSettings& s, std::uint64_t trial)
{
    TrialOutcome out;
    out.trial = trial;
    out.instance_seed = SplitMix64::derive(s.seed, trial);
    try {
        const double sigma = snr_db_to_sigma(s.snr_db);
        ProblemInstance inst = generate_instance(s.n, s.alpha, sigma, out.instance_seed);
        SolverContext ctx(inst);

        const std::uint64_t run_seed = SplitMix64::derive(out.instance_seed, 1);
        ClupResult res;
        if (s.config.warm_start == WarmStartKind::PolytopeWithOverlapConstraint)
            res = clup_warmstart_polytope(ctx, s.config);
        else if (s.config.warm_start == WarmStartKind::PolytopeRound) {
            const auto& [x_plt, r_min] = ctx.box_minimum();
            Eigen::VectorXd x0 = x_plt.norm() > 0 ? (x_plt / x_plt.norm()).eval() : x_plt;
            res = clup_run(ctx, s.config, x0, run_seed);
        } else if (s.num_starts > 1)
            res = clup_multistart(ctx, s.config, s.num_starts, run_seed);
        else
            res = clup_run(ctx, s.config, std::nullopt, run_seed);

        out.failed = res.last_inner_status == SolveStatus::Infeasible && res.trace.empty();
        out.converged = res.converged;
        out.iterations = static_cast<int>(res.trace.size());
        out.radius = res.radius;
        out.clup_stats = res.stats;
        out.clup_rounded_ber = overlap_stats(res.x_clup, inst).ber;
        double prev = -1.0, worst = 0.0;
        for (const auto& t : res.trace) {
            const double sq = std::sqrt(std::max(t.c2, 0.0));
            if (prev >= 0.0)
                worst = std::max(worst, prev - sq);
            prev = sq;
        }
        out.delta_trace_violation = worst;

        if (s.run_polytope)
            out.polytope_ber = overlap_stats(polytope_detect(ctx).x_hat, inst).ber;
        if (s.run_ball)
            out.ball_ber = overlap_stats(ball_detect(ctx).x_hat, inst).ber;
        if (s.run_bit_flip) {
            const Eigen::VectorXd x0 = random_sign_vector(s.n, SplitMix64::derive(out.instance_seed, 2));
            out.bit_flip_ber =
                overlap_stats(bit_flip_ml(inst, x0, s.bit_flip_restarts, out.instance_seed).x_hat, inst).ber;
        }
    } catch (const std::exception&) {
        out.failed = true;
    }
    return out;
}

std::vector<TrialOutcome> run_trials_serial(const TrialSettings& s, int trials)
{
    std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
    for (int i = 0; i < trials; ++i)
        out[static_cast<std::size_t>(i)] = run_trial(s, static_cast<std::uint64_t>(i));
    return out;
}

std::vector<TrialOutcome> run_trials_openmp(const TrialSettings& s, int trials, int workers)
{
    std::vector<TrialOutcome> out(static_cast<std::size_t>(trials));
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(workers, 1))
#endif
    for (int i = 0; i < trials; ++i)
        out[static_cast<std::size_t>(i)] = run_trial(s, static_cast<std::uint64_t>(i));
    return out;
}

std::vector<TrialOutcome> run_trials(const TrialSettings& s, int trials, int workers)
{
    if (workers <= 1)
        return run_trials_serial(s, trials);
    return run_trials_openmp(s, trials, workers);
}

Aggregate aggregate(const std::vector<TrialOutcome>& outcomes, int n)
{
    Aggregate a;
    a.trials = static_cast<int>(outcomes.size());
    double sum_c2 = 0.0, sum_c1 = 0.0, sq_c2 = 0.0, sq_c1 = 0.0;
    double sum_ber = 0.0, sum_rounded = 0.0;
    double sum_plt = 0.0, sum_ball = 0.0, sum_bf = 0.0;
    int n_plt = 0, n_ball = 0, n_bf = 0;
    std::vector<int> iters;
    for (const auto& t : outcomes) {
        if (t.failed) {
            ++a.failed;
            continue;
        }
        sum_c2 += t.clup_stats.c2;
        sq_c2 += t.clup_stats.c2 * t.clup_stats.c2;
        sum_c1 += t.clup_stats.c1;
        sq_c1 += t.clup_stats.c1 * t.clup_stats.c1;
        sum_ber += t.clup_stats.ber;
        sum_rounded += t.clup_rounded_ber;
        iters.push_back(t.iterations);
        if (t.polytope_ber >= 0.0) { sum_plt += t.polytope_ber; ++n_plt; }
        if (t.ball_ber >= 0.0) { sum_ball += t.ball_ber; ++n_ball; }
        if (t.bit_flip_ber >= 0.0) { sum_bf += t.bit_flip_ber; ++n_bf; }
    }
    const int k = a.trials - a.failed;
    if (k == 0)
        return a;
    a.mean_c2 = sum_c2 / k;
    a.mean_c1 = sum_c1 / k;
    a.stderr_c2 = k > 1 ? std::sqrt(std::max(0.0, sq_c2 / k - a.mean_c2 * a.mean_c2) / (k - 1)) : 0.0;
    a.stderr_c1 = k > 1 ? std::sqrt(std::max(0.0, sq_c1 / k - a.mean_c1 * a.mean_c1) / (k - 1)) : 0.0;
    a.ber = sum_ber / k;
    a.rounded_ber = sum_rounded / k;
    a.total_bits = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(n);
    a.ber_stderr = std::sqrt(std::max(a.ber * (1.0 - a.ber), 0.0) / static_cast<double>(a.total_bits));
    if (!iters.empty()) {
        std::sort(iters.begin(), iters.end());
        const std::size_t mid = iters.size() / 2;
        a.median_iterations = iters.size() % 2 ? iters[mid] : 0.5 * (iters[mid - 1] + iters[mid]);
    }
    if (n_plt) a.polytope_ber = sum_plt / n_plt;
    if (n_ball) a.ball_ber = sum_ball / n_ball;
    if (n_bf) a.bit_flip_ber = sum_bf / n_bf;
    return a;
}

} // namespace clup
