#include "clup/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace clup {

ScalarResult minimize_scalar(const ScalarFn& f, double lo, double hi,
                             const OptimizerSettings& settings)
{
    constexpr double kGold = 0.3819660112501051;  // (3 - sqrt(5)) / 2
    ScalarResult out;
    if (lo > hi)
        std::swap(lo, hi);

    double a = lo, b = hi;
    double x = a + kGold * (b - a);
    double w = x, v = x;
    double fx = f(x);
    out.evals = 1;
    double fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    while (out.evals < settings.max_evals) {
        const double m = 0.5 * (a + b);
        const double tol1 = settings.x_tol + 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x);
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) {
            out.converged = true;
            break;
        }
        bool golden = true;
        if (std::fabs(e) > tol1) {
            // parabolic fit through (x, w, v)
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0)
                p = -p;
            q = std::fabs(q);
            const double e_old = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2)
                    d = (x < m) ? tol1 : -tol1;
                golden = false;
            }
        }
        if (golden) {
            e = (x < m) ? b - x : a - x;
            d = kGold * e;
        }
        const double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0 ? tol1 : -tol1);
        const double fu = f(u);
        ++out.evals;
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    out.x = x;
    out.f = fx;
    return out;
}

RootResult find_root(const ScalarFn& f, double lo, double hi,
                     const OptimizerSettings& settings)
{
    RootResult out;
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    out.evals = 2;
    if (fa == 0.0) { out.x = a; out.converged = true; return out; }
    if (fb == 0.0) { out.x = b; out.converged = true; return out; }
    if ((fa > 0.0) == (fb > 0.0)) {
        out.x = std::fabs(fa) < std::fabs(fb) ? a : b;
        return out;  // no bracket
    }

    double c = a, fc = fa;
    double d = b - a, e = d;
    while (out.evals < settings.max_evals) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa;
            d = b - a; e = d;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * settings.x_tol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0) {
            out.x = b;
            out.converged = true;
            return out;
        }
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0)
                q = -q;
            p = std::fabs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::fabs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
        ++out.evals;
    }
    out.x = b;
    return out;
}

namespace {

NdResult nelder_mead_once(const NdFn& f, const std::vector<double>& start,
                          const std::vector<double>& steps,
                          const OptimizerSettings& settings, int eval_budget)
{
    const std::size_t n = start.size();
    NdResult out;
    std::vector<std::vector<double>> x(n + 1, start);
    for (std::size_t i = 0; i < n; ++i)
        x[i + 1][i] += steps[i];
    std::vector<double> fx(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        fx[j] = f(x[j]);
    out.evals = static_cast<int>(n) + 1;

    std::vector<std::size_t> idx(n + 1);
    auto resort = [&] {
        for (std::size_t j = 0; j <= n; ++j) idx[j] = j;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    };
    std::vector<double> centroid(n), xr(n), xe(n), xc(n);

    while (out.evals < eval_budget) {
        resort();
        const std::size_t best = idx[0], worst = idx[n], second = idx[n - 1];
        double diam = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                diam = std::max(diam, std::fabs(x[idx[j]][i] - x[best][i]));
        if (diam <= settings.x_tol && std::fabs(fx[worst] - fx[best]) <= settings.f_tol) {
            out.converged = true;
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t j = 0; j <= n; ++j)
            if (j != worst)
                for (std::size_t i = 0; i < n; ++i)
                    centroid[i] += x[j][i];
        for (std::size_t i = 0; i < n; ++i)
            centroid[i] /= static_cast<double>(n);

        for (std::size_t i = 0; i < n; ++i)
            xr[i] = centroid[i] + (centroid[i] - x[worst][i]);
        const double fr = f(xr); ++out.evals;

        if (fr < fx[best]) {
            for (std::size_t i = 0; i < n; ++i)
                xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
            const double fe = f(xe); ++out.evals;
            if (fe < fr) { x[worst] = xe; fx[worst] = fe; }
            else         { x[worst] = xr; fx[worst] = fr; }
        } else if (fr < fx[second]) {
            x[worst] = xr; fx[worst] = fr;
        } else {
            const bool outside = fr < fx[worst];
            const auto& base = outside ? xr : x[worst];
            for (std::size_t i = 0; i < n; ++i)
                xc[i] = centroid[i] + 0.5 * (base[i] - centroid[i]);
            const double fcv = f(xc); ++out.evals;
            if (fcv < (outside ? fr : fx[worst])) {
                x[worst] = xc; fx[worst] = fcv;
            } else {
                for (std::size_t j = 0; j <= n; ++j) {
                    if (j == best) continue;
                    for (std::size_t i = 0; i < n; ++i)
                        x[j][i] = x[best][i] + 0.5 * (x[j][i] - x[best][i]);
                    fx[j] = f(x[j]); ++out.evals;
                }
            }
        }
    }
    resort();
    out.x = x[idx[0]];
    out.f = fx[idx[0]];
    return out;
}

} // namespace

NdResult minimize_nd(const NdFn& f, const std::vector<double>& start,
                     const std::vector<double>& steps,
                     const OptimizerSettings& settings, int restarts)
{
    restarts = std::max(restarts, 1);
    const int budget = settings.max_evals / restarts;
    NdResult best = nelder_mead_once(f, start, steps, settings, budget);
    for (int k = 1; k < restarts; ++k) {
        // fresh simplex around the incumbent, shrinking edge and flipping
        // orientation so restarts probe different directions
        std::vector<double> s2(steps.size());
        const double scale = (k % 2 ? -1.0 : 1.0) * std::pow(10.0, -k);
        for (std::size_t i = 0; i < steps.size(); ++i)
            s2[i] = std::max(std::fabs(steps[i]) * scale, settings.x_tol * 100.0) * (scale < 0 ? -1.0 : 1.0);
        NdResult r = nelder_mead_once(f, best.x, s2, settings, budget);
        r.evals += best.evals;
        if (r.f < best.f || (r.f == best.f && r.converged && !best.converged))
            best = r;
        else
            best.evals = r.evals;
    }
    return best;
}

NdResult maximize_nd(const NdFn& f, const std::vector<double>& start,
                     const std::vector<double>& steps,
                     const OptimizerSettings& settings, int restarts)
{
    NdFn neg = [&f](const std::vector<double>& v) { return -f(v); };
    NdResult r = minimize_nd(neg, start, steps, settings, restarts);
    r.f = -r.f;
    return r;
}

} // namespace clup
