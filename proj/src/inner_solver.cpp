#include "clup/inner_solver.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace clup {

namespace {
constexpr double kHuge = 1e30;
}

SolverContext::SolverContext(const ProblemInstance& inst) : inst_(&inst)
{
    const int n = inst.n;
    amp_ = 1.0 / std::sqrt(static_cast<double>(n));
    yty_ = inst.y.squaredNorm();

    Eigen::MatrixXd AtA = inst.A.transpose() * inst.A;
    Eigen::Tridiagonalization<Eigen::MatrixXd> tri(AtA);
    Tdiag_ = tri.diagonal();
    Tsub_ = tri.subDiagonal();
    Q_ = tri.matrixQ();
    bt_ = Q_.transpose() * (inst.A.transpose() * inst.y);
    t_scale_ = Tdiag_.sum() / static_cast<double>(n);
    if (!(t_scale_ > 0.0))
        t_scale_ = 1.0;
}

void SolverContext::tri_solve(double a, double b, const Eigen::VectorXd& rhs, Eigen::VectorXd& x) const
{
    const int n = static_cast<int>(rhs.size());
    x = rhs;
    if (n == 1) {
        x(0) /= (a + b * Tdiag_(0));
        return;
    }
    // LDL^T of the SPD tridiagonal (a I + b T), in-place sweep
    thread_local Eigen::VectorXd dd, ll;
    dd.resize(n);
    ll.resize(n - 1);
    dd(0) = a + b * Tdiag_(0);
    for (int i = 1; i < n; ++i) {
        const double e = b * Tsub_(i - 1);
        ll(i - 1) = e / dd(i - 1);
        dd(i) = a + b * Tdiag_(i) - ll(i - 1) * e;
        x(i) -= ll(i - 1) * x(i - 1);
    }
    x(n - 1) /= dd(n - 1);
    for (int i = n - 2; i >= 0; --i)
        x(i) = x(i) / dd(i) - ll(i) * x(i + 1);
}

double SolverContext::residual_sq_basis(const Eigen::VectorXd& xt) const
{
    const int n = static_cast<int>(xt.size());
    double xtTx = 0.0, btx = 0.0;
    for (int i = 0; i < n; ++i) {
        double Tx = Tdiag_(i) * xt(i);
        if (i > 0)
            Tx += Tsub_(i - 1) * xt(i - 1);
        if (i + 1 < n)
            Tx += Tsub_(i) * xt(i + 1);
        xtTx += xt(i) * Tx;
        btx += bt_(i) * xt(i);
    }
    return std::max(0.0, yty_ - 2.0 * btx + xtTx);
}

double SolverContext::min_full_residual() const
{
    // large-multiplier limit of the regularized least squares path
    Eigen::VectorXd xt;
    const double mu = kHuge / t_scale_;
    tri_solve(1.0, mu, bt_ * mu, xt);
    return std::sqrt(residual_sq_basis(xt));
}

bool SolverContext::project_ball_basis(const Eigen::VectorXd& vt, double r, Eigen::VectorXd& out,
                                       double& mu_warm) const
{
    const double r2 = r * r;
    double rs = residual_sq_basis(vt);
    if (rs <= r2) {
        out = vt;
        return true;
    }

    const int n = static_cast<int>(vt.size());
    thread_local Eigen::VectorXd rhs, xt, gvec, dx;
    rhs.resize(n);

    auto eval = [&](double mu) {
        rhs = vt + mu * bt_;
        tri_solve(1.0, mu, rhs, xt);
        return residual_sq_basis(xt) - r2;
    };

    // bracket the multiplier
    double lo = 0.0, hi = std::max(mu_warm, 1.0 / t_scale_);
    double phi_hi = eval(hi);
    int grow = 0;
    while (phi_hi > 0.0) {
        lo = hi;
        hi *= 8.0;
        phi_hi = eval(hi);
        if (++grow > 60)
            return false;  // ball empty: even the least-squares limit misses r
    }

    // safeguarded Newton on phi(mu) = ||y - A x(mu)||^2 - r^2 (decreasing)
    double mu = 0.5 * (lo + hi);
    double phi = eval(mu);
    for (int it = 0; it < 120; ++it) {
        if (std::fabs(phi) <= 1e-14 * std::max(1.0, r2) || (hi - lo) <= 1e-15 * hi)
            break;
        if (phi > 0.0)
            lo = mu;
        else
            hi = mu;
        // phi'(mu) = -2 g^T (I + mu T)^{-1} g with g = b - T x
        gvec = bt_;
        for (int i = 0; i < n; ++i) {
            double Tx = Tdiag_(i) * xt(i);
            if (i > 0)
                Tx += Tsub_(i - 1) * xt(i - 1);
            if (i + 1 < n)
                Tx += Tsub_(i) * xt(i + 1);
            gvec(i) -= Tx;
        }
        tri_solve(1.0, mu, gvec, dx);
        const double dphi = -2.0 * gvec.dot(dx);
        double mu_next = (dphi < 0.0) ? mu - phi / dphi : mu;
        if (!(mu_next > lo && mu_next < hi))
            mu_next = 0.5 * (lo + hi);
        mu = mu_next;
        phi = eval(mu);
    }
    mu_warm = mu;
    out = xt;
    return true;
}

const std::pair<Eigen::VectorXd, double>& SolverContext::box_minimum() const
{
    if (!box_min_)
        box_min_ = min_box_residual(*this);
    return *box_min_;
}

Eigen::VectorXd project_residual_ball(const Eigen::VectorXd& x0, const SolverContext& ctx, double r)
{
    if (!(r > 0.0))
        throw std::invalid_argument("project_residual_ball: r must be positive");
    Eigen::VectorXd vt = ctx.to_basis(x0);
    Eigen::VectorXd out;
    double mu = 1.0;
    if (!ctx.project_ball_basis(vt, r, out, mu))
        throw std::runtime_error("project_residual_ball: residual ball is empty");
    if (out.data() == vt.data() || (out - vt).squaredNorm() == 0.0)
        return x0;  // already feasible: return the input unchanged
    return ctx.from_basis(out);
}

Eigen::VectorXd project_residual_ball(const Eigen::VectorXd& x0, const ProblemInstance& inst, double r)
{
    SolverContext ctx(inst);
    return project_residual_ball(x0, ctx, r);
}

std::pair<Eigen::VectorXd, double> min_box_residual(const SolverContext& ctx, double tol, int max_iter)
{
    // ADMM on 1/2||y - A x||^2 + box indicator, x-update in the T-basis
    const ProblemInstance& inst = ctx.instance();
    const int n = inst.n;
    const double amp = ctx.box_halfwidth();

    Eigen::VectorXd z = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd x = z, xt, rhs_basis, zprev = z;

    double rho = std::max(1.0, ctx.to_basis(inst.A.transpose() * inst.y).cwiseAbs().maxCoeff() / (10.0 * amp));
    // rho near trace scale balances the quadratic against the box
    rho = std::max(rho, 1.0);

    const Eigen::VectorXd bt = ctx.to_basis(inst.A.transpose() * inst.y);
    for (int it = 0; it < max_iter; ++it) {
        rhs_basis = (bt + rho * ctx.to_basis(z - u)) / rho;
        ctx.tri_solve(1.0, 1.0 / rho, rhs_basis, xt);
        x = ctx.from_basis(xt);
        zprev = z;
        z = (x + u).cwiseMax(-amp).cwiseMin(amp);
        u += x - z;
        const double primal = (x - z).norm();
        const double dual = rho * (z - zprev).norm();
        if (primal < tol * std::sqrt(static_cast<double>(n)) && dual < tol * rho * std::sqrt(static_cast<double>(n)))
            break;
        // residual balancing keeps the iteration well scaled
        if (it % 50 == 49) {
            if (primal > 10.0 * dual / rho)
                rho *= 2.0, u /= 2.0;
            else if (dual / rho > 10.0 * primal)
                rho /= 2.0, u *= 2.0;
        }
    }
    const double res = (inst.y - inst.A * z).norm();
    return {z, res};
}

std::pair<Eigen::VectorXd, double> min_box_residual(const ProblemInstance& inst)
{
    SolverContext ctx(inst);
    return min_box_residual(ctx);
}

namespace {

struct KktBreakdown {
    double value = 0.0;
    double mu_ball = 0.0;
};

// Direct first-order check on the candidate: fit nonnegative multipliers for
// the active smooth constraints on the interior coordinates, then measure the
// stationarity violation plus complementarity slack.
KktBreakdown kkt_residual(const SolverContext& ctx, const InnerProblem& pb, const Eigen::VectorXd& x,
                          double residual)
{
    const ProblemInstance& inst = ctx.instance();
    const double amp = ctx.box_halfwidth();
    const int n = inst.n;

    std::vector<Eigen::VectorXd> grads;  // gradients of active constraints (<= form)
    std::vector<double> slacks;
    const bool ball_active = residual >= pb.r * (1.0 - 1e-6);
    Eigen::VectorXd g;
    if (ball_active && residual > 0.0) {
        g = inst.A.transpose() * (inst.A * x - inst.y) / residual;
        grads.push_back(g);
        slacks.push_back(pb.r - residual);
    }
    for (const auto& hs : pb.extra_halfspaces) {
        const double s = hs.a.dot(x) - hs.b;
        if (s <= std::fabs(hs.b) * 1e-6 + 1e-9) {
            grads.push_back(-hs.a);
            slacks.push_back(s);
        }
    }

    // bound-active within a small band: splitting iterates approach the box
    // face from inside, never landing exactly on it
    const double act_band = amp * 1e-7;
    std::vector<int> interior;
    interior.reserve(n);
    for (int i = 0; i < n; ++i)
        if (std::fabs(x(i)) < amp - act_band)
            interior.push_back(i);

    const int k = static_cast<int>(grads.size());
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(k);
    if (k > 0 && !interior.empty()) {
        Eigen::MatrixXd Gi(interior.size(), k);
        Eigen::VectorXd wi(interior.size());
        for (std::size_t r = 0; r < interior.size(); ++r) {
            wi(r) = pb.w(interior[r]);
            for (int c = 0; c < k; ++c)
                Gi(r, c) = grads[c](interior[r]);
        }
        // nonnegative LS over at most a couple of multipliers: solve, clamp,
        // re-solve the reduced system
        mu = Gi.colPivHouseholderQr().solve(wi);
        for (int pass = 0; pass < k; ++pass) {
            bool neg = false;
            for (int c = 0; c < k; ++c)
                if (mu(c) < 0.0) {
                    mu(c) = 0.0;
                    neg = true;
                }
            if (!neg)
                break;
            std::vector<int> free;
            for (int c = 0; c < k; ++c)
                if (mu(c) > 0.0)
                    free.push_back(c);
            if (free.empty())
                break;
            Eigen::MatrixXd Gf(interior.size(), free.size());
            for (std::size_t r = 0; r < interior.size(); ++r)
                for (std::size_t c = 0; c < free.size(); ++c)
                    Gf(r, c) = Gi(r, free[c]);
            Eigen::VectorXd mf = Gf.colPivHouseholderQr().solve(wi);
            mu.setZero();
            for (std::size_t c = 0; c < free.size(); ++c)
                mu(free[c]) = mf(c);
        }
        mu = mu.cwiseMax(0.0);
    }

    // eta = w - sum mu_c grads_c must be a valid box normal at x
    Eigen::VectorXd eta = pb.w;
    for (int c = 0; c < k; ++c)
        eta -= mu(c) * grads[c];

    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        if (std::fabs(x(i)) < amp - act_band)
            sq += eta(i) * eta(i);
        else if (x(i) > 0.0)
            sq += std::min(eta(i), 0.0) * std::min(eta(i), 0.0);
        else
            sq += std::max(eta(i), 0.0) * std::max(eta(i), 0.0);
    }
    for (int c = 0; c < k; ++c)
        sq += (mu(c) * slacks[c]) * (mu(c) * slacks[c]);

    KktBreakdown out;
    out.value = std::sqrt(sq);
    out.mu_ball = (ball_active && k > 0) ? mu(0) : 0.0;
    return out;
}

} // namespace

SolverReport solve_inner(const SolverContext& ctx, const InnerProblem& pb, const SplitOptions& opts,
                         SplitState* state)
{
    const ProblemInstance& inst = ctx.instance();
    const int n = inst.n;
    const double amp = ctx.box_halfwidth();
    if (pb.w.size() != n)
        throw std::invalid_argument("solve_inner: objective dimension mismatch");
    if (!(pb.r > 0.0))
        throw std::invalid_argument("solve_inner: radius must be positive");

    SolverReport rep;

    // exact, cheap infeasibility certificate
    const auto& boxmin = ctx.box_minimum();
    if (boxmin.second > pb.r + opts.tol_feas) {
        rep.status = SolveStatus::Infeasible;
        rep.x_star = boxmin.first;
        rep.residual = boxmin.second;
        rep.objective = -pb.w.dot(rep.x_star);
        return rep;
    }

    const std::size_t K = 2 + pb.extra_halfspaces.size();
    const double t = opts.step > 0.0 ? opts.step : amp;
    const double omega = opts.relaxation;

    SplitState local;
    SplitState& st = state ? *state : local;
    if (st.z.size() != K) {
        st.z.assign(K, Eigen::VectorXd::Zero(n));
        st.mu_warm = 1.0;
    }

    Eigen::VectorXd xbar(n), cand(n), p_ball(n), p_box(n), arg(n), vt, pt;
    std::vector<Eigen::VectorXd> p_hs(pb.extra_halfspaces.size(), Eigen::VectorXd::Zero(n));

    const int check_every = 16;
    const double invK = 1.0 / static_cast<double>(K);

    for (int it = 1; it <= opts.max_iter; ++it) {
        xbar = st.z[0];
        for (std::size_t k = 1; k < K; ++k)
            xbar += st.z[k];
        xbar *= invK;

        // ball block (secular projection in the T-basis)
        arg = 2.0 * xbar - st.z[0];
        vt = ctx.to_basis(arg);
        if (!ctx.project_ball_basis(vt, pb.r, pt, st.mu_warm)) {
            rep.status = SolveStatus::Infeasible;
            rep.iterations = it;
            rep.x_star = xbar.cwiseMax(-amp).cwiseMin(amp);
            rep.residual = (inst.y - inst.A * rep.x_star).norm();
            rep.objective = -pb.w.dot(rep.x_star);
            return rep;
        }
        p_ball = ctx.from_basis(pt);

        // box + linear objective block (closed-form prox)
        p_box = (2.0 * xbar - st.z[1] + t * pb.w).cwiseMax(-amp).cwiseMin(amp);

        for (std::size_t j = 0; j < pb.extra_halfspaces.size(); ++j) {
            const auto& hs = pb.extra_halfspaces[j];
            arg = 2.0 * xbar - st.z[2 + j];
            const double gap = hs.b - hs.a.dot(arg);
            p_hs[j] = (gap > 0.0) ? (arg + (gap / hs.a.squaredNorm()) * hs.a).eval() : arg;
        }

        double disp_sq = (p_ball - xbar).squaredNorm() + (p_box - xbar).squaredNorm();
        st.z[0] += omega * (p_ball - xbar);
        st.z[1] += omega * (p_box - xbar);
        for (std::size_t j = 0; j < pb.extra_halfspaces.size(); ++j) {
            disp_sq += (p_hs[j] - xbar).squaredNorm();
            st.z[2 + j] += omega * (p_hs[j] - xbar);
        }
        if (opts.record_merit)
            rep.merit.push_back(omega * std::sqrt(disp_sq));
        rep.iterations = it;

        const bool pow2 = (it & (it - 1)) == 0;  // warm starts often converge immediately
        if (pow2 || it % check_every == 0 || it == opts.max_iter) {
            cand = xbar.cwiseMax(-amp).cwiseMin(amp);
            const double res = (inst.y - inst.A * cand).norm();
            bool feas = res <= pb.r + opts.tol_feas;
            for (const auto& hs : pb.extra_halfspaces)
                feas = feas && hs.a.dot(cand) >= hs.b - opts.tol_feas;
            if (feas) {
                const auto kkt = kkt_residual(ctx, pb, cand, res);
                if (kkt.value <= opts.tol_kkt) {
                    rep.x_star = cand;
                    rep.residual = res;
                    rep.objective = -pb.w.dot(cand);
                    rep.kkt_residual = kkt.value;
                    rep.status = SolveStatus::Optimal;
                    return rep;
                }
            }
        }
    }

    cand = xbar.cwiseMax(-amp).cwiseMin(amp);
    rep.x_star = cand;
    rep.residual = (inst.y - inst.A * cand).norm();
    rep.objective = -pb.w.dot(cand);
    rep.kkt_residual = kkt_residual(ctx, pb, cand, rep.residual).value;
    rep.status = SolveStatus::MaxIterations;
    return rep;
}

} // namespace clup
