#include "qed/specfun.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "qed/errors.hpp"

namespace qed {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kSqrt2Pi = 2.50662827463100050241576528481;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

// Bisection for cdf(x) = p on the lower half-line, p in (0, 0.5).
double lower_quantile(double p) {
  double lo = -40.0;
  double hi = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) {
      break;
    }
    if (normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  const double pdf = normal_pdf(x);
  if (pdf > 0.0) {
    x -= (normal_cdf(x) - p) / pdf;
  }
  return x;
}

// Modified Lentz evaluation of 1 / (x + 1/(x + 2/(x + 3/(x + ...)))).
double mills_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double f = x;
  double c = x;
  double d = 0.0;
  for (int k = 1; k < 500; ++k) {
    d = x + k * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = x + k / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) {
      break;
    }
  }
  return 1.0 / f;
}

}  // namespace

void SeriesControl::validate() const {
  if (!(abs_tol > 0.0) || max_terms < 1) {
    throw DomainError("SeriesControl: need abs_tol > 0 and max_terms >= 1");
  }
}

double normal_pdf(double x) {
  require_finite(x, "normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  require_finite(x, "normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_ccdf(double x) {
  require_finite(x, "normal_ccdf");
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

NormalValues normal_dist(double x) { return {normal_pdf(x), normal_cdf(x)}; }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1)");
  }
  if (p == 0.5) {
    return 0.0;
  }
  return p < 0.5 ? lower_quantile(p) : -lower_quantile(1.0 - p);
}

double mills_ratio(double x) {
  require_finite(x, "mills_ratio");
  if (x >= 8.0) {
    return mills_continued_fraction(x);
  }
  return normal_ccdf(x) / normal_pdf(x);
}

double cdf_over_pdf(double x) {
  require_finite(x, "cdf_over_pdf");
  if (x <= -8.0) {
    return mills_continued_fraction(-x);
  }
  if (x >= 8.0) {
    // Phi/phi = 1/phi - (1 - Phi)/phi
    return kSqrt2Pi * std::exp(0.5 * x * x) - mills_continued_fraction(x);
  }
  return normal_cdf(x) / normal_pdf(x);
}

PoissonTail poisson_tail(double mean, long long c) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DomainError("poisson_tail: mean must be positive and finite");
  }
  if (c < 0) {
    throw DomainError("poisson_tail: c must be non-negative");
  }
  // P(N >= c) = P(c, mean), the regularized lower incomplete gamma function.
  const double p_geq =
      c == 0 ? 1.0 : boost::math::gamma_p(static_cast<double>(c), mean);
  const double p_gt = boost::math::gamma_p(static_cast<double>(c) + 1.0, mean);
  return {p_geq, p_gt};
}

double poisson_pmf(double mean, long long c) {
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw DomainError("poisson_pmf: mean must be positive and finite");
  }
  if (c < 0) {
    return 0.0;
  }
  const double k = static_cast<double>(c);
  return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

SignedLog zeta_half_log(int l, ZetaBranch branch) {
  if (l < 0) {
    throw DomainError("zeta_half: l must be non-negative");
  }
  if (branch == ZetaBranch::plus && l == 0) {
    const double v = boost::math::zeta(0.5);
    return {std::log(std::fabs(v)), v < 0.0 ? -1 : 1};
  }
  // zeta(1 - s) with s = l + 1/2 (plus) or s = l + 3/2 (minus).
  const int twice_s = branch == ZetaBranch::plus ? 2 * l + 1 : 2 * l + 3;
  const double s = 0.5 * twice_s;
  // cos(pi s / 2) = cos(twice_s * pi / 4) has magnitude sqrt(2)/2 and a sign
  // that cycles with period 8 in twice_s.
  const int r = twice_s % 8;
  const int sign = (r == 1 || r == 7) ? 1 : -1;
  const double log_abs = std::numbers::ln2 - s * std::log(2.0 * std::numbers::pi) -
                         0.5 * std::numbers::ln2 + std::lgamma(s) +
                         std::log(boost::math::zeta(s));
  return {log_abs, sign};
}

double zeta_half(int l, ZetaBranch branch) {
  const SignedLog z = zeta_half_log(l, branch);
  return z.sign * std::exp(z.log_abs);
}

}  // namespace qed
