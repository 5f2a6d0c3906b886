#include "fracstar/mittag_leffler.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracstar {

namespace {

constexpr long double kTolerance = 1e-10L;
constexpr int kMaxTerms = 20000;

}  // namespace

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::domain_error("mittag_leffler: alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
  if (!std::isfinite(z)) throw std::domain_error("mittag_leffler: argument must be finite");
  if (z == 0.0) return 1.0;

  const long double a = alpha;
  const long double log_abs = std::log(std::fabs(static_cast<long double>(z)));
  const bool negative = z < 0.0;
  // The terms peak near k = |z|^(1/alpha) / alpha; summation may only stop past it.
  const long double peak = std::pow(std::fabs(static_cast<long double>(z)), 1.0L / a) / a;

  long double sum = 1.0L;
  long double largest = 1.0L;
  for (int k = 1; k < kMaxTerms; ++k) {
    const long double log_term = k * log_abs - std::lgamma(a * k + 1.0L);
    if (log_term > std::log(LDBL_MAX) - 1.0L) {
      throw std::domain_error("mittag_leffler: series overflows at z = " + std::to_string(z));
    }
    const long double magnitude = std::exp(log_term);
    largest = std::max(largest, magnitude);
    sum += (negative && (k % 2 == 1)) ? -magnitude : magnitude;
    if (k > peak && magnitude < 1e-22L * std::max(1.0L, std::fabs(sum))) break;
  }

  if (!negative) {
    if (!std::isfinite(static_cast<double>(sum))) {
      throw std::domain_error("mittag_leffler: result overflows double at z = " + std::to_string(z));
    }
    return static_cast<double>(sum);
  }
  // Rounding in each term is relative to that term; the largest term bounds the loss.
  if (largest * LDBL_EPSILON * 64.0L > kTolerance) {
    throw std::domain_error("mittag_leffler: |z| too large for the series at alpha = " + std::to_string(alpha) +
                            ", z = " + std::to_string(z));
  }
  return static_cast<double>(sum);
}

}  // namespace fracstar
