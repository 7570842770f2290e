#pragma once

// Thin wrappers over Boost.Math so the rest of the library does not
// depend on its policy machinery directly.

namespace tsf::dist {

[[nodiscard]] double normal_cdf(double x);
[[nodiscard]] double normal_sf(double x);
[[nodiscard]] double normal_quantile(double p);
/// Upper tail P(X > x) for X ~ chi-squared(df).
[[nodiscard]] double chi2_sf(double x, double df);

}  // namespace tsf::dist
