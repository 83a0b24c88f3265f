#pragma once

namespace delco {

/// Standard normal cumulative distribution function.
double std_normal_cdf(double x);

/// Standard normal density.
double std_normal_pdf(double x);

/// Standard normal quantile function Q(p) for p in (0, 1); absolute error
/// below 1e-9 on [1e-12, 1 - 1e-12]. Satisfies Q(p) == -Q(1 - p) exactly for
/// p > 1/2. Throws std::domain_error outside (0, 1).
double std_normal_quantile(double p);

}  // namespace delco
