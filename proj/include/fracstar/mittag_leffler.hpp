#pragma once

namespace fracstar {

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1)
/// for real z and 0 < alpha < 2, with absolute error below 1e-10.
///
/// Evaluated by the power series in extended precision. For negative z the
/// alternating series loses roughly log10(max term) digits, so arguments whose
/// largest term would push the rounding error past the tolerance (about
/// |z|^(1/alpha) > 18) are rejected with std::domain_error rather than
/// continued asymptotically; the same happens on overflow for large positive z.
double mittag_leffler(double alpha, double z);

}  // namespace fracstar
