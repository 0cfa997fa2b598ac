#include "clup/rdt_ml.hpp"

#include "clup/model.hpp"
#include "clup/optimize.hpp"
#include "clup/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace clup {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488016887242096980786;
constexpr double kSqrt2OverPi = 0.7978845608028653558798921198687637369;
}

double nu_hat_ml(double c1)
{
    return kSqrt2 * erfinv(-c1);
}

double xi_rd_ml_nu(const RdtParams& p, double c1, double nu)
{
    const double s = 2.0 - 2.0 * c1 + p.sigma * p.sigma;
    if (s < 0.0)
        throw std::domain_error("xi_rd_ml_nu: negative square-root argument");
    // E|h + nu| = nu erf(nu/sqrt(2)) + sqrt(2/pi) exp(-nu^2/2)
    const double e_abs = nu * std::erf(nu / kSqrt2) + kSqrt2OverPi * std::exp(-0.5 * nu * nu);
    return std::sqrt(p.alpha) * std::sqrt(s) - e_abs - nu * c1;
}

double xi_rd_ml(const RdtParams& p, double c1)
{
    if (!(std::fabs(c1) < 1.0))
        throw std::domain_error("xi_rd_ml: |c1| must be < 1");
    const double s = 2.0 - 2.0 * c1 + p.sigma * p.sigma;
    const double z = erfinv(c1);
    return std::sqrt(p.alpha) * std::sqrt(s) - kSqrt2OverPi * std::exp(-z * z);
}

namespace {

// linear head + logarithmic tail so minimizers within 1e-12 of c1 = 1 are
// resolved by the scan
std::vector<double> c1_grid(double cap, int points)
{
    const double split = 0.85;
    const int head = points * 3 / 10;
    const int tail = points - head;
    std::vector<double> g;
    g.reserve(head + tail);
    for (int i = 0; i < head; ++i)
        g.push_back(split * static_cast<double>(i) / head);
    const double s0 = -std::log10(1.0 - split);
    const double s1 = -std::log10(1.0 - cap);
    for (int i = 0; i <= tail - 1; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / (tail - 1);
        g.push_back(1.0 - std::pow(10.0, -s));
    }
    g.back() = cap;
    return g;
}

double snr_db_from_sigma_inv(const RdtParams& p)
{
    return -20.0 * std::log10(p.sigma);
}

} // namespace

MlRdtSolution ml_minimize(const RdtParams& p)
{
    const double snr_db = snr_db_from_sigma_inv(p);
    const double cap = snr_db > 14.0 ? 1.0 - 1e-12 : 1.0 - 1e-9;
    const std::vector<double> grid = c1_grid(cap, 2000);
    const int n = static_cast<int>(grid.size());

    std::vector<double> v(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        v[i] = xi_rd_ml(p, grid[i]);

    ScalarFn f = [&](double c1) { return xi_rd_ml(p, c1); };
    OptimizerSettings st;
    st.x_tol = 1e-13;
    st.max_evals = 300;

    MlRdtSolution out;
    auto add_min = [&](double lo, double hi) {
        ScalarResult sr = minimize_scalar(f, lo, hi, st);
        for (const auto& m : out.local_minima)
            if (std::fabs(m.c1 - sr.x) < 1e-9)
                return;
        out.local_minima.push_back({sr.x, sr.f, (1.0 - sr.x) / 2.0});
    };

    for (int i = 1; i + 1 < n; ++i)
        if (v[i] <= v[i - 1] - 1e-10 && v[i] <= v[i + 1] - 1e-10)
            add_min(grid[i - 1], grid[i + 1]);
    // the cap can hide a boundary-adjacent minimum
    if (v[n - 1] < v[n - 2])
        add_min(grid[n - 2], cap);

    if (out.local_minima.empty())
        add_min(0.0, cap);

    std::sort(out.local_minima.begin(), out.local_minima.end(),
              [](const MlLocalMin& a, const MlLocalMin& b) { return a.xi < b.xi; });
    out.c1_global = out.local_minima.front().c1;
    out.xi_global = out.local_minima.front().xi;
    out.perr = (1.0 - out.c1_global) / 2.0;
    out.nu_hat = nu_hat_ml(out.c1_global);
    return out;
}

MlCriticalSnrs ml_critical_snrs(double alpha)
{
    MlCriticalSnrs out;
    auto n_minima = [&](double db) {
        RdtParams p{alpha, snr_db_to_sigma(db)};
        return static_cast<int>(ml_minimize(p).local_minima.size());
    };

    // multi-minima onset: largest SNR with >= 2 minima
    double lo_db = 0.0, hi_db = 0.0;
    bool found_multi = false;
    for (double db = 14.0; db >= 6.0; db -= 0.25) {
        if (n_minima(db) >= 2) {
            lo_db = db;
            hi_db = db + 0.25;
            found_multi = true;
            break;
        }
    }
    if (!found_multi)
        return out;
    while (hi_db - lo_db > 1e-3) {
        const double mid = 0.5 * (lo_db + hi_db);
        if (n_minima(mid) >= 2)
            lo_db = mid;
        else
            hi_db = mid;
    }
    out.snr_multi_onset_db = 0.5 * (lo_db + hi_db);

    // exchange of global status: xi(high-c1 branch) - xi(low-c1 branch)
    // crosses zero
    auto branch_gap = [&](double db) {
        RdtParams p{alpha, snr_db_to_sigma(db)};
        MlRdtSolution s = ml_minimize(p);
        if (s.local_minima.size() < 2)
            return std::nan("");
        auto [lo_it, hi_it] = std::minmax_element(
            s.local_minima.begin(), s.local_minima.end(),
            [](const MlLocalMin& a, const MlLocalMin& b) { return a.c1 < b.c1; });
        return hi_it->xi - lo_it->xi;
    };
    double a_db = 0.0, b_db = 0.0;
    bool bracket = false;
    double prev_db = std::nan(""), prev_gap = std::nan("");
    for (double db = out.snr_multi_onset_db - 1e-3; db >= out.snr_multi_onset_db - 2.5; db -= 0.05) {
        const double g = branch_gap(db);
        if (std::isnan(g))
            break;
        if (!std::isnan(prev_gap) && ((g > 0.0) != (prev_gap > 0.0))) {
            a_db = db;
            b_db = prev_db;
            bracket = true;
            break;
        }
        prev_db = db;
        prev_gap = g;
    }
    if (!bracket)
        return out;
    while (b_db - a_db > 1e-3) {
        const double mid = 0.5 * (a_db + b_db);
        const double g = branch_gap(mid);
        if (std::isnan(g))
            break;
        if (g > 0.0)
            a_db = mid;
        else
            b_db = mid;
    }
    out.snr_discontinuity_db = 0.5 * (a_db + b_db);
    out.found = true;
    return out;
}

const std::vector<Ml1flRow>& ml_1fl_constants()
{
    static const std::vector<Ml1flRow> table = {
        {8.0, 3.3339e-01, 9.00e-02}, {9.0, 3.1048e-01, 2.25e-02},
        {10.0, 2.8099e-01, 4.20e-03}, {11.0, 2.5162e-01, 9.72e-04},
        {12.0, 2.2457e-01, 2.01e-04}, {13.0, 2.0022e-01, 3.30e-05},
    };
    return table;
}

std::string ml_curve_csv(double alpha, const std::vector<double>& snr_db)
{
    std::string s = "# clup-ml v1\nsnr_db,xi,perr,n_minima\n";
    char buf[160];
    for (double db : snr_db) {
        RdtParams p{alpha, snr_db_to_sigma(db)};
        MlRdtSolution m = ml_minimize(p);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%zu\n", db, m.xi_global, m.perr,
                      m.local_minima.size());
        s += buf;
    }
    return s;
}

} // namespace clup
