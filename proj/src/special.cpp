#include "clup/special.hpp"

#include <cmath>
#include <stdexcept>

namespace clup {

double erf(double x) { return std::erf(x); }
double erfc(double x) { return std::erfc(x); }

namespace {

constexpr double kSqrtPiOver2 = 0.8862269254527580136490837416705725914;

// Winitzki's approximation, |error| < 2e-3 over (-1,1); good enough to put
// Newton firmly in its quadratic basin.
double erfinv_estimate(double p)
{
    constexpr double a = 0.147;
    const double ln1mp2 = std::log((1.0 - p) * (1.0 + p));
    const double t = 2.0 / (3.14159265358979323846 * a) + 0.5 * ln1mp2;
    const double x = std::sqrt(std::sqrt(t * t - ln1mp2 / a) - t);
    return p < 0 ? -x : x;
}

} // namespace

double erfinv(double p)
{
    if (!(std::fabs(p) < 1.0))
        throw std::domain_error("erfinv: argument must lie in (-1, 1)");
    if (p == 0.0)
        return 0.0;

    double x = erfinv_estimate(p);
    if (std::fabs(p) <= 0.5) {
        for (int k = 0; k < 3; ++k)
            x -= (std::erf(x) - p) * kSqrtPiOver2 * std::exp(x * x);
    } else {
        // solve erfc(x) = q; q = 1 -/+ p is exact for |p| in [0.5, 1)
        const double s = p > 0 ? 1.0 : -1.0;
        const double q = 1.0 - s * p;
        x = s * x;
        for (int k = 0; k < 3; ++k)
            x += (std::erfc(x) - q) * kSqrtPiOver2 * std::exp(x * x);
        x = s * x;
    }
    return x;
}

} // namespace clup
