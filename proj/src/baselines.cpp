#include "clup/baselines.hpp"

#include "clup/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace clup {

namespace {

Eigen::VectorXd sign_round(const Eigen::VectorXd& x, double amp)
{
    Eigen::VectorXd out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out(i) = x(i) >= 0.0 ? amp : -amp;
    return out;
}

Eigen::VectorXd random_signs(int n, std::uint64_t seed)
{
    SplitMix64 g(seed);
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i)
        x(i) = g.sign() * amp;
    return x;
}

} // namespace

DetectorResult polytope_detect(const SolverContext& ctx)
{
    const auto& [x_plt, r_min] = ctx.box_minimum();
    DetectorResult out;
    out.x_hat = sign_round(x_plt, ctx.box_halfwidth());
    out.residual = r_min;
    return out;
}

DetectorResult polytope_detect(const ProblemInstance& inst)
{
    SolverContext ctx(inst);
    return polytope_detect(ctx);
}

DetectorResult ball_detect(const SolverContext& ctx)
{
    // min ||y - A x|| s.t. ||x|| <= 1: x(mu) = (A^T A + mu I)^{-1} A^T y with
    // mu >= 0 driving ||x(mu)|| onto the sphere when the least-squares point
    // falls outside
    const ProblemInstance& inst = ctx.instance();
    const Eigen::VectorXd bt = ctx.to_basis(inst.A.transpose() * inst.y);
    Eigen::VectorXd xt;

    auto norm_sq_at = [&](double mu) {
        ctx.tri_solve(mu, 1.0, bt, xt);  // (mu I + T) x = b
        return xt.squaredNorm();
    };

    const double tiny = 1e-12 * std::max(1.0, bt.cwiseAbs().maxCoeff());
    double ns = norm_sq_at(tiny);
    if (ns > 1.0) {
        // bracket and bisect/newton on ||x(mu)||^2 - 1 (decreasing in mu)
        double lo = tiny, hi = 1.0;
        while (norm_sq_at(hi) > 1.0)
            hi *= 8.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double v = norm_sq_at(mid);
            if (std::fabs(v - 1.0) < 1e-13 || (hi - lo) < 1e-15 * hi)
                break;
            if (v > 1.0)
                lo = mid;
            else
                hi = mid;
        }
    }
    DetectorResult out;
    const Eigen::VectorXd x = ctx.from_basis(xt);
    out.x_hat = sign_round(x, ctx.box_halfwidth());
    out.residual = std::sqrt(ctx.residual_sq_basis(xt));
    return out;
}

DetectorResult ball_detect(const ProblemInstance& inst)
{
    SolverContext ctx(inst);
    return ball_detect(ctx);
}

DetectorResult bit_flip_ml(const ProblemInstance& inst, const Eigen::VectorXd& x_init,
                           int restarts, std::uint64_t seed)
{
    if (restarts < 1)
        throw std::invalid_argument("bit_flip_ml: restarts must be >= 1");
    const int n = inst.n;
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    const Eigen::VectorXd col_sq = inst.A.colwise().squaredNorm();

    DetectorResult best;
    best.residual = std::numeric_limits<double>::infinity();

    Eigen::VectorXd x(n), res(inst.m);
    for (int rs = 0; rs < restarts; ++rs) {
        if (rs == 0)
            x = x_init;
        else
            x = random_signs(n, SplitMix64::derive(seed, static_cast<std::uint64_t>(rs)));
        res = inst.y - inst.A * x;
        double rsq = res.squaredNorm();

        while (true) {
            // flipping bit i changes the residual by +2 x_i a_i
            int best_i = -1;
            double best_delta = -1e-13 * std::max(1.0, rsq);
            for (int i = 0; i < n; ++i) {
                const double delta =
                    4.0 * x(i) * inst.A.col(i).dot(res) + 4.0 * x(i) * x(i) * col_sq(i);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                }
            }
            if (best_i < 0)
                break;
            res += 2.0 * x(best_i) * inst.A.col(best_i);
            x(best_i) = -x(best_i);
            rsq += best_delta;
        }
        const double r = res.norm();
        if (r < best.residual) {
            best.residual = r;
            best.x_hat = x;
        }
    }
    // clean amplitude in case x_init carried rounding noise
    for (int i = 0; i < n; ++i)
        best.x_hat(i) = best.x_hat(i) >= 0.0 ? amp : -amp;
    best.residual = (inst.y - inst.A * best.x_hat).norm();
    return best;
}

} // namespace clup
