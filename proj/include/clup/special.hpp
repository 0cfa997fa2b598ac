#pragma once

namespace clup {

// erf/erfc delegate to libm (correctly rounded to ~1 ulp, far inside the
// 1e-12 relative error budget the RDT formulas need).
double erf(double x);
double erfc(double x);

// Inverse of erf on (-1, 1). Winitzki initial estimate refined by Newton
// iterations on erf (erfc form near the endpoints to avoid cancellation).
// Throws std::domain_error for |p| >= 1.
double erfinv(double p);

} // namespace clup
