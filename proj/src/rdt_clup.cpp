#include "clup/rdt_clup.hpp"

#include "clup/rdt_ml.hpp"
#include "clup/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace clup {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818685;
constexpr double kSqrt2 = 1.4142135623730950488016887242096980786;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }
double norm_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double sqrt_arg(const RdtParams& p, double c2, double c1)
{
    return 1.0 - 2.0 * c1 + c2 + p.sigma * p.sigma;
}

} // namespace

double f_box1(double h, double gamma, double nu)
{
    if (!(gamma > 0.0))
        throw std::domain_error("f_box1: gamma must be positive");
    const double u = h + nu;
    if (std::fabs(u) <= 2.0 * gamma)
        return -u * u / (4.0 * gamma);
    return -std::fabs(u) + gamma;
}

double optimal_x_coordinate(double h, double gamma, double nu)
{
    return std::min(std::max(-1.0, -(h + nu) / (2.0 * gamma)), 1.0);
}

EFbox1Terms e_fbox1_terms(double gamma, double nu)
{
    if (!(gamma > 0.0))
        throw std::domain_error("e_fbox1: gamma must be positive");
    EFbox1Terms t;
    const double g = gamma, n = nu;
    t.i22 = 0.5 * (n + g) * std::erfc((n + 2.0 * g) / kSqrt2) -
            std::exp(-0.5 * (n + 2.0 * g) * (n + 2.0 * g)) * kInvSqrt2Pi;
    const double sp2 = std::sqrt(M_PI / 2.0);
    t.i1 = (sp2 * (n * n + 1.0) * std::erf((2.0 * g - n) / kSqrt2) +
            sp2 * (n * n + 1.0) * std::erf((2.0 * g + n) / kSqrt2) +
            std::exp(-0.5 * (n + 2.0 * g) * (n + 2.0 * g)) * (n - 2.0 * g) -
            std::exp(-0.5 * (n - 2.0 * g) * (n - 2.0 * g)) * (n + 2.0 * g)) /
           (4.0 * std::sqrt(2.0 * M_PI) * g);
    t.i21 = -0.5 * (n - g) * (std::erf((n - 2.0 * g) / kSqrt2) + 1.0) -
            std::exp(-0.5 * (n - 2.0 * g) * (n - 2.0 * g)) * kInvSqrt2Pi;
    return t;
}

double e_fbox1(double gamma, double nu)
{
    return e_fbox1_terms(gamma, nu).value();
}

double xi_rd(const RdtParams& p, double c2, double c1, double gamma, double nu)
{
    const double s = sqrt_arg(p, c2, c1);
    if (s < -1e-12)
        throw std::domain_error("xi_rd: negative square-root argument");
    return std::sqrt(p.alpha) * std::sqrt(std::max(s, 0.0)) + e_fbox1(gamma, nu) -
           nu * c1 - gamma * c2;
}

double e_sstar(double gamma, double nu)
{
    const double b = -2.0 * gamma - nu, a = 2.0 * gamma - nu;
    const double dPhi = norm_cdf(a) - norm_cdf(b);
    const double moment1 = norm_pdf(b) - norm_pdf(a) + nu * dPhi;
    return norm_cdf(b) - norm_sf(a) - moment1 / (2.0 * gamma);
}

double e_sstar_sq(double gamma, double nu)
{
    const double b = -2.0 * gamma - nu, a = 2.0 * gamma - nu;
    const double dPhi = norm_cdf(a) - norm_cdf(b);
    const double moment2 =
        (1.0 + nu * nu) * dPhi - (a + 2.0 * nu) * norm_pdf(a) + (b + 2.0 * nu) * norm_pdf(b);
    return norm_cdf(b) + norm_sf(a) + moment2 / (4.0 * gamma * gamma);
}

namespace {

// Newton polish of the saddle first-order system (E[s*], E[s*^2]) = (c1, c2)
// with a finite-difference Jacobian; keeps the derivative-free search honest
// about the 1e-8 stationarity budget.
void polish_saddle(double c2, double c1, double& gamma, double& nu)
{
    for (int it = 0; it < 4; ++it) {
        const double f1 = e_sstar(gamma, nu) - c1;
        const double f2 = e_sstar_sq(gamma, nu) - c2;
        if (std::fabs(f1) + std::fabs(f2) < 1e-14)
            break;
        const double hg = std::max(1e-7 * gamma, 1e-9), hn = 1e-7 * std::max(std::fabs(nu), 1.0);
        const double d1g = (e_sstar(gamma + hg, nu) - e_sstar(gamma - hg, nu)) / (2.0 * hg);
        const double d1n = (e_sstar(gamma, nu + hn) - e_sstar(gamma, nu - hn)) / (2.0 * hn);
        const double d2g = (e_sstar_sq(gamma + hg, nu) - e_sstar_sq(gamma - hg, nu)) / (2.0 * hg);
        const double d2n = (e_sstar_sq(gamma, nu + hn) - e_sstar_sq(gamma, nu - hn)) / (2.0 * hn);
        const double det = d1g * d2n - d1n * d2g;
        if (std::fabs(det) < 1e-14)
            break;
        const double dg = (-f1 * d2n + f2 * d1n) / det;
        const double dn = (-d1g * f2 + d2g * f1) / det;
        const double gamma_new = gamma + dg, nu_new = nu + dn;
        if (!(gamma_new > 0.0) || !std::isfinite(gamma_new) || !std::isfinite(nu_new))
            break;
        const double worse = std::fabs(e_sstar(gamma_new, nu_new) - c1) +
                             std::fabs(e_sstar_sq(gamma_new, nu_new) - c2);
        if (worse >= std::fabs(f1) + std::fabs(f2))
            break;
        gamma = gamma_new;
        nu = nu_new;
    }
}

} // namespace

SaddlePoint xi_rd_saddle(const RdtParams& p, double c2, double c1, const SaddlePoint* hint)
{
    const double s = sqrt_arg(p, c2, c1);
    if (s < -1e-12)
        throw std::domain_error("xi_rd_saddle: (c2, c1) outside the square-root domain");

    double g0 = 0.7;
    double n0 = -std::sqrt(p.alpha) / std::sqrt(std::max(s, 1e-10));
    if (hint && hint->gamma > 0.0) {
        g0 = hint->gamma;
        n0 = hint->nu;
    }

    NdFn obj = [&](const std::vector<double>& v) {
        if (v[0] < -14.0 || v[0] > 7.0)
            return -1e100;
        return xi_rd(p, c2, c1, std::exp(v[0]), v[1]);
    };
    OptimizerSettings st;
    st.x_tol = 1e-11;
    st.f_tol = 1e-15;
    st.max_evals = 9000;
    NdResult r = maximize_nd(obj, {std::log(g0), n0}, {0.4, 0.4}, st, 3);

    SaddlePoint out;
    out.gamma = std::exp(r.x[0]);
    out.nu = r.x[1];
    polish_saddle(c2, c1, out.gamma, out.nu);
    out.xi = xi_rd(p, c2, c1, out.gamma, out.nu);
    out.converged = r.converged;
    return out;
}

SaddlePoint min_over_c1(const RdtParams& p, double c2, double* c1_star)
{
    const double hi = (1.0 + c2) / 2.0;
    const int kPre = 64;
    SaddlePoint hint;
    hint.gamma = 0.0;

    double best_c1 = 0.0, best_val = 1e300;
    SaddlePoint best_sp;
    std::vector<double> vals(kPre + 1);
    for (int i = 0; i <= kPre; ++i) {
        const double c1 = hi * static_cast<double>(i) / kPre;
        SaddlePoint sp = xi_rd_saddle(p, c2, c1, hint.gamma > 0.0 ? &hint : nullptr);
        hint = sp;
        vals[i] = sp.xi;
        if (sp.xi < best_val) {
            best_val = sp.xi;
            best_c1 = c1;
            best_sp = sp;
        }
    }

    const double step = hi / kPre;
    const double lo_br = std::max(0.0, best_c1 - step);
    const double hi_br = std::min(hi, best_c1 + step);
    SaddlePoint local = best_sp;
    ScalarFn f = [&](double c1) {
        SaddlePoint sp = xi_rd_saddle(p, c2, c1, &local);
        local = sp;
        return sp.xi;
    };
    OptimizerSettings st;
    st.x_tol = 1e-12;
    st.max_evals = 400;
    ScalarResult sr = minimize_scalar(f, lo_br, hi_br, st);

    SaddlePoint out = xi_rd_saddle(p, c2, sr.x, &local);
    if (out.xi > best_val) {  // guard: keep the scan winner if refinement drifted
        out = best_sp;
        sr.x = best_c1;
    }
    if (c1_star)
        *c1_star = sr.x;
    return out;
}

PolytopeSolution r_plt_theory(const RdtParams& p)
{
    const int kPre = 48;
    double best_c2 = 0.0, best_val = 1e300;
    for (int i = 0; i <= kPre; ++i) {
        const double c2 = static_cast<double>(i) / kPre;
        double c1;
        SaddlePoint sp = min_over_c1(p, c2, &c1);
        if (sp.xi < best_val) {
            best_val = sp.xi;
            best_c2 = c2;
        }
    }
    const double step = 1.0 / kPre;
    ScalarFn f = [&](double c2) {
        double c1;
        return min_over_c1(p, c2, &c1).xi;
    };
    OptimizerSettings st;
    st.x_tol = 1e-11;
    st.max_evals = 300;
    ScalarResult sr = minimize_scalar(f, std::max(0.0, best_c2 - step),
                                      std::min(1.0, best_c2 + step), st);

    PolytopeSolution out;
    out.c2 = sr.x;
    SaddlePoint sp = min_over_c1(p, sr.x, &out.c1);
    out.r_plt = sp.xi;
    out.gamma = sp.gamma;
    out.nu = sp.nu;
    out.perr = 1.0 - 0.5 * std::erfc(sp.nu / kSqrt2);
    out.converged = sr.converged && sp.converged;
    return out;
}

namespace {

struct PredictEnv {
    PolytopeSolution pol;
    std::vector<double> c2_grid;
    std::vector<double> g_vals;
};

PredictEnv build_predict_env(const RdtParams& p, const PolytopeSolution& pol, int points = 96)
{
    PredictEnv env;
    env.pol = pol;
    env.c2_grid.resize(points + 1);
    env.g_vals.resize(points + 1);
    for (int i = 0; i <= points; ++i) {
        const double c2 = pol.c2 + (1.0 - pol.c2) * static_cast<double>(i) / points;
        double c1;
        env.c2_grid[i] = c2;
        env.g_vals[i] = min_over_c1(p, c2, &c1).xi;
    }
    return env;
}

ClupPrediction predict_with_env(const RdtParams& p, const PredictEnv& env, double r_sc)
{
    ClupPrediction out;
    out.r_plt = env.pol.r_plt;
    out.r = r_sc * env.pol.r_plt;
    if (r_sc == 1.0) {
        out.c2 = env.pol.c2;
        out.c1 = env.pol.c1;
        out.gamma = env.pol.gamma;
        out.nu = env.pol.nu;
        out.perr = env.pol.perr;
        out.all_roots = {env.pol.c2};
        out.converged = true;
        return out;
    }

    const double target = out.r;
    ScalarFn f = [&](double c2) {
        double c1;
        return min_over_c1(p, c2, &c1).xi - target;
    };
    OptimizerSettings st;
    st.x_tol = 1e-12;
    st.max_evals = 200;

    for (std::size_t i = 0; i + 1 < env.c2_grid.size(); ++i) {
        const double fa = env.g_vals[i] - target, fb = env.g_vals[i + 1] - target;
        if ((fa <= 0.0 && fb > 0.0) || (fa >= 0.0 && fb < 0.0)) {
            RootResult rr = find_root(f, env.c2_grid[i], env.c2_grid[i + 1], st);
            if (rr.converged)
                out.all_roots.push_back(rr.x);
        }
    }

    if (out.all_roots.empty()) {
        out.at_c2_cap = true;
        out.c2 = 1.0;
    } else {
        out.c2 = *std::max_element(out.all_roots.begin(), out.all_roots.end());
    }
    SaddlePoint sp = min_over_c1(p, out.c2, &out.c1);
    out.gamma = sp.gamma;
    out.nu = sp.nu;
    out.perr = 1.0 - 0.5 * std::erfc(sp.nu / kSqrt2);
    out.converged = true;
    return out;
}

} // namespace

ClupPrediction clup_rdt_predict(const RdtParams& p, double r_sc)
{
    if (!(r_sc >= 1.0))
        throw std::invalid_argument("clup_rdt_predict: r_sc must be >= 1");
    PolytopeSolution pol = r_plt_theory(p);
    if (r_sc == 1.0) {
        PredictEnv env;
        env.pol = pol;
        return predict_with_env(p, env, 1.0);
    }
    PredictEnv env = build_predict_env(p, pol);
    return predict_with_env(p, env, r_sc);
}

std::string CurveScan::to_csv() const
{
    std::string s = "# clup-scan v1, axis=";
    s += (axis == ScanAxis::C1 ? "c1" : "c2");
    char buf[128];
    std::snprintf(buf, sizeof(buf), ", fixed=%.17g\n", fixed_value);
    s += buf;
    s += "grid,value\n";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", grid[i], values[i]);
        s += buf;
    }
    return s;
}

CurveScan scan_xi(const RdtParams& p, ScanAxis axis, double fixed_value,
                  const std::vector<double>& grid)
{
    if (grid.size() < 2)
        throw std::invalid_argument("scan_xi: grid needs at least two points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::invalid_argument("scan_xi: grid must be strictly increasing");

    CurveScan out;
    out.axis = axis;
    out.fixed_value = fixed_value;
    out.grid = grid;
    out.values.assign(grid.size(), 0.0);

    const int count = static_cast<int>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        if (axis == ScanAxis::C1) {
            out.values[i] = xi_rd_saddle(p, fixed_value, grid[i]).xi;
        } else {
            double c1;
            out.values[i] = min_over_c1(p, grid[i], &c1).xi;
        }
    }

    ScalarFn f = [&](double t) {
        if (axis == ScanAxis::C1)
            return xi_rd_saddle(p, fixed_value, t).xi;
        double c1;
        return min_over_c1(p, t, &c1).xi;
    };
    OptimizerSettings st;
    st.x_tol = 1e-11;
    st.max_evals = 200;
    for (int i = 1; i + 1 < count; ++i) {
        if (out.values[i] <= out.values[i - 1] - 1e-10 && out.values[i] <= out.values[i + 1] - 1e-10) {
            ScalarResult sr = minimize_scalar(f, grid[i - 1], grid[i + 1], st);
            out.local_minima.emplace_back(sr.x, sr.f);
        }
    }
    return out;
}

std::vector<StationaryPoint> find_stationary_points(const RdtParams& p, double r)
{
    if (!(r > 0.0))
        throw std::invalid_argument("find_stationary_points: r must be positive");

    const int kGrid = 160;
    const double lo = 0.01, hi = 0.9995;
    std::vector<double> c2s(kGrid + 1), gv(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        c2s[i] = lo + (hi - lo) * static_cast<double>(i) / kGrid;
        double c1;
        gv[i] = min_over_c1(p, c2s[i], &c1).xi;
    }

    ScalarFn f = [&](double c2) {
        double c1;
        return min_over_c1(p, c2, &c1).xi - r;
    };
    OptimizerSettings st;
    st.x_tol = 1e-12;
    st.max_evals = 200;

    std::vector<StationaryPoint> out;
    const double alpha = p.alpha, sig2 = p.sigma * p.sigma;
    for (int i = 0; i + 1 <= kGrid; ++i) {
        const double fa = gv[i] - r, fb = gv[i + 1] - r;
        if (!((fa <= 0.0 && fb > 0.0) || (fa >= 0.0 && fb < 0.0)))
            continue;
        RootResult rr = find_root(f, c2s[i], c2s[i + 1], st);
        if (!rr.converged)
            continue;
        double c2 = rr.x, c1;
        SaddlePoint sp = min_over_c1(p, c2, &c1);

        // The Brent minimum in c1 is noise-limited near ~1e-7; the interior
        // stationarity condition -sqrt(alpha)/sqrt(s) - nu_hat(c1) = 0 crosses
        // zero transversally, so root-finding it recovers full precision.
        auto refine_c1 = [&]() {
            ScalarFn h = [&](double c1v) {
                SaddlePoint s2 = xi_rd_saddle(p, c2, c1v, &sp);
                const double sv = 1.0 - 2.0 * c1v + c2 + sig2;
                return -std::sqrt(alpha) / std::sqrt(sv) - s2.nu;
            };
            double w = 5e-4;
            for (int widen = 0; widen < 4; ++widen, w *= 4.0) {
                const double a = std::max(0.0, c1 - w), b = std::min((1.0 + c2) / 2.0, c1 + w);
                if ((h(a) > 0.0) == (h(b) > 0.0))
                    continue;
                OptimizerSettings rs;
                rs.x_tol = 1e-13;
                rs.max_evals = 200;
                RootResult rc = find_root(h, a, b, rs);
                if (rc.converged) {
                    c1 = rc.x;
                    sp = xi_rd_saddle(p, c2, c1, &sp);
                }
                break;
            }
        };

        // alternate closure refinement in c1 with Newton touch-ups on c2 via
        // the envelope derivative dG/dc2 = -nu/2 - gamma
        for (int k = 0; k < 3; ++k) {
            refine_c1();
            const double dG = -sp.nu / 2.0 - sp.gamma;
            if (std::fabs(dG) < 1e-10)
                break;
            const double c2n = c2 - (sp.xi - r) / dG;
            if (!(c2n > 0.0 && c2n < 1.0) || std::fabs(c2n - c2) < 1e-14)
                break;
            c2 = c2n;
            sp = xi_rd_saddle(p, c2, c1, &sp);
        }
        refine_c1();

        const double s = 1.0 - 2.0 * c1 + c2 + sig2;
        const double denom = -sp.nu / 2.0 - sp.gamma;
        if (std::fabs(denom) < 1e-9)
            continue;  // tangency: gamma1 blows up, not a separated stationary point
        StationaryPoint pt;
        pt.xi = sp.xi;
        pt.c2 = c2;
        pt.c1 = c1;
        pt.nu = sp.nu;
        pt.gamma = sp.gamma;
        pt.gamma1 = 1.0 / (2.0 * std::sqrt(c2) * denom);
        const double g1 = pt.gamma1;
        const double r_nu = g1 * (e_sstar(pt.gamma, pt.nu) - c1);
        const double r_ga = g1 * (e_sstar_sq(pt.gamma, pt.nu) - c2);
        const double r_c1 = g1 * (-std::sqrt(alpha) / std::sqrt(s) - pt.nu);
        const double r_c2 = -1.0 / (2.0 * std::sqrt(c2)) +
                            g1 * (std::sqrt(alpha) / (2.0 * std::sqrt(s)) - pt.gamma);
        const double r_g1 = sp.xi - r;
        pt.grad_norm = std::sqrt(r_nu * r_nu + r_ga * r_ga + r_c1 * r_c1 + r_c2 * r_c2 + r_g1 * r_g1);

        bool dup = false;
        for (const auto& q : out)
            if (std::fabs(q.c2 - pt.c2) < 1e-6)
                dup = true;
        if (!dup)
            out.push_back(pt);
    }
    std::sort(out.begin(), out.end(), [](const StationaryPoint& a, const StationaryPoint& b) {
        return a.c2 < b.c2;
    });
    return out;
}

double r_sc_upper_limit(const RdtParams& p, double xi_ml)
{
    if (!(xi_ml > 0.0))
        throw std::invalid_argument("r_sc_upper_limit: xi_ml must be positive");
    return xi_ml / r_plt_theory(p).r_plt;
}

OptimalRadius r_sc_optimal_perr(const RdtParams& p)
{
    PolytopeSolution pol = r_plt_theory(p);
    const double xi_ml = ml_minimize(p).xi_global;
    const double upper = xi_ml / pol.r_plt;

    OptimalRadius out;
    if (upper <= 1.0) {
        PredictEnv env;
        env.pol = pol;
        out.prediction = predict_with_env(p, env, 1.0);
        out.r_sc = 1.0;
        out.perr = out.prediction.perr;
        out.converged = true;
        return out;
    }

    PredictEnv env = build_predict_env(p, pol, 128);
    ScalarFn nu_of = [&](double r_sc) {
        return predict_with_env(p, env, r_sc).nu;
    };

    const int kPre = 24;
    double best_rsc = 1.0, best_nu = 1e300;
    for (int i = 0; i <= kPre; ++i) {
        const double rsc = 1.0 + (upper - 1.0) * static_cast<double>(i) / kPre;
        const double v = nu_of(rsc);
        if (v < best_nu) {
            best_nu = v;
            best_rsc = rsc;
        }
    }
    const double step = (upper - 1.0) / kPre;
    OptimizerSettings st;
    st.x_tol = 1e-8;
    st.max_evals = 200;
    ScalarResult sr = minimize_scalar(nu_of, std::max(1.0, best_rsc - step),
                                      std::min(upper, best_rsc + step), st);

    out.r_sc = sr.x;
    out.prediction = predict_with_env(p, env, sr.x);
    out.perr = out.prediction.perr;
    out.converged = sr.converged && out.prediction.converged;
    return out;
}

} // namespace clup
