#include "clup/rdt_first_iter.hpp"

#include "clup/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clup {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242096980786;
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110452530;
}

double i_box1_term_i11(double gamma, double nu)
{
    const double g = gamma, n = nu;
    const double sp2 = std::sqrt(M_PI / 2.0);
    return -(std::exp(-0.5 * (4.0 * g + n) * (4.0 * g + n)) * (n - 4.0 * g) +
             sp2 * (n * n + 1.0) * std::erf((4.0 * g + n) / kSqrt2) -
             sp2 * (n * n + 1.0) * std::erf(n / kSqrt2) -
             std::exp(-0.5 * n * n) * n) /
           (4.0 * kSqrt2Pi * g);
}

double i_box1_term_i21(double gamma, double nu)
{
    const double g = gamma, n = nu;
    return (4.0 * g + 2.0 * n) * 0.5 * std::erfc((4.0 * g + n) / kSqrt2) -
           2.0 * std::exp(-0.5 * (4.0 * g + n) * (4.0 * g + n)) / kSqrt2Pi;
}

double i_box1(double gamma, double nu, double rho)
{
    if (!(gamma > 0.0))
        throw std::domain_error("i_box1: gamma must be positive");
    if (rho < 0.0 || rho > 1.0)
        throw std::domain_error("i_box1: rho must lie in [0, 1]");
    return rho * i_box1_term_i11(gamma, nu) + (1.0 - rho) * i_box1_term_i11(gamma, -nu) +
           rho * i_box1_term_i21(gamma, nu) + (1.0 - rho) * i_box1_term_i21(gamma, -nu);
}

double xi_rd_1(const RdtParams& p, double c1z, double s1, double gamma, double nu, double rho)
{
    if (c1z < 0.0)
        throw std::domain_error("xi_rd_1: c1z must be nonnegative");
    return std::sqrt(p.alpha) * std::sqrt(c1z + p.sigma * p.sigma) + i_box1(gamma, nu, rho) -
           nu * s1 - gamma * c1z;
}

double s_x1(double gamma, double nu)
{
    const double g = gamma, n = nu;
    return -n / 2.0 / g * (0.5 * std::erfc(n / kSqrt2) - 0.5 * std::erfc((n + 4.0 * g) / kSqrt2)) +
           1.0 / 2.0 / g / kSqrt2Pi *
               (std::exp(-n * n / 2.0) - std::exp(-(4.0 * g + n) * (4.0 * g + n) / 2.0));
}

double s_xsq1(double gamma, double nu)
{
    return -i_box1_term_i11(gamma, nu) / gamma;
}

double s_x2(double gamma, double nu)
{
    return 2.0 * (0.5 * std::erfc((4.0 * gamma + nu) / kSqrt2));
}

double s_xsq2(double gamma, double nu)
{
    return 2.0 * s_x2(gamma, nu);
}

namespace {

struct Saddle1 {
    double xi = 0.0;
    double gamma = 0.0;
    double nu = 0.0;
    bool converged = false;
};

Saddle1 saddle_1(const RdtParams& p, double c1z, double s1, double rho, const Saddle1* hint)
{
    NdFn obj = [&](const std::vector<double>& v) {
        if (v[0] < -14.0 || v[0] > 7.0)
            return -1e100;
        return xi_rd_1(p, c1z, s1, std::exp(v[0]), v[1], rho);
    };
    double g0 = 0.7, n0 = 0.5;
    if (hint && hint->gamma > 0.0) {
        g0 = hint->gamma;
        n0 = hint->nu;
    }
    OptimizerSettings st;
    st.x_tol = 1e-11;
    st.f_tol = 1e-15;
    st.max_evals = 9000;
    NdResult r = maximize_nd(obj, {std::log(g0), n0}, {0.4, 0.4}, st, 3);
    Saddle1 out;
    out.gamma = std::exp(r.x[0]);
    out.nu = r.x[1];
    out.xi = r.f;
    out.converged = r.converged;
    return out;
}

Saddle1 min_over_c1z(const RdtParams& p, double s1, double rho, double* c1z_star)
{
    const int kPre = 48;
    Saddle1 hint;
    double best_c = 0.0, best_val = 1e300;
    for (int i = 0; i <= kPre; ++i) {
        const double c = 4.0 * static_cast<double>(i) / kPre;
        Saddle1 sp = saddle_1(p, c, s1, rho, hint.gamma > 0.0 ? &hint : nullptr);
        hint = sp;
        if (sp.xi < best_val) {
            best_val = sp.xi;
            best_c = c;
        }
    }
    const double step = 4.0 / kPre;
    Saddle1 local;
    ScalarFn f = [&](double c) {
        Saddle1 sp = saddle_1(p, c, s1, rho, local.gamma > 0.0 ? &local : nullptr);
        local = sp;
        return sp.xi;
    };
    OptimizerSettings st;
    st.x_tol = 1e-12;
    st.max_evals = 300;
    ScalarResult sr =
        minimize_scalar(f, std::max(0.0, best_c - step), std::min(4.0, best_c + step), st);
    if (c1z_star)
        *c1z_star = sr.x;
    return saddle_1(p, sr.x, s1, rho, local.gamma > 0.0 ? &local : nullptr);
}

} // namespace

FirstIterSolution first_iter_solve(const RdtParams& p, double r, double rho)
{
    if (!(r > 0.0))
        throw std::invalid_argument("first_iter_solve: r must be positive");
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("first_iter_solve: rho must lie in [0, 1]");

    FirstIterSolution out;
    out.rho = rho;

    // phi(s1) = min_c1z max_{gamma,nu} xi_rd_1 is decreasing in s1; the
    // minimal feasible s1 saturates phi(s1) = r
    ScalarFn phi = [&](double s1) {
        double c;
        return min_over_c1z(p, s1, rho, &c).xi - r;
    };

    double lo = 0.0, hi = 0.0;
    double f_hi = phi(0.0);
    if (f_hi > 0.0)
        return out;  // r below the first-iteration floor: no feasible s1
    bool bracketed = false;
    for (double s = -0.1; s >= -2.0; s -= 0.1) {
        const double fv = phi(s);
        if (fv > 0.0) {
            lo = s;
            hi = s + 0.1;
            bracketed = true;
            break;
        }
    }
    if (!bracketed)
        return out;

    OptimizerSettings st;
    st.x_tol = 1e-11;
    st.max_evals = 200;
    RootResult rr = find_root(phi, lo, hi, st);
    if (!rr.converged)
        return out;

    out.s1_hat = rr.x;
    Saddle1 sp = min_over_c1z(p, rr.x, rho, &out.c1z_hat);
    out.nu_hat = sp.nu;
    out.gamma_hat = sp.gamma;
    out.xi1 = sp.xi;

    const double g = sp.gamma, n = sp.nu;
    out.e_overlap = 1.0 - (rho * s_x1(g, n) + (1.0 - rho) * s_x1(g, -n) + rho * s_x2(g, n) +
                           (1.0 - rho) * s_x2(g, -n));
    out.e_norm_sq = rho * s_xsq1(g, n) + (1.0 - rho) * s_xsq1(g, -n) + rho * s_xsq2(g, n) +
                    (1.0 - rho) * s_xsq2(g, -n) + 2.0 * out.e_overlap - 1.0;
    out.perr1 = 1.0 - (rho * 0.5 * std::erfc((-2.0 * g - n) / kSqrt2) +
                       (1.0 - rho) * 0.5 * std::erfc((-2.0 * g + n) / kSqrt2));
    out.converged = true;
    return out;
}

bool escape_check(const RdtParams& p, double r, double rho,
                  std::span<const StationaryPoint> stationary)
{
    if (stationary.empty())
        return true;
    FirstIterSolution fi = first_iter_solve(p, r, rho);
    if (!fi.converged)
        return false;
    double min_c2 = stationary[0].c2;
    for (const auto& s : stationary)
        min_c2 = std::min(min_c2, s.c2);
    return fi.e_norm_sq > min_c2;
}

} // namespace clup
