#pragma once

// Scalar special functions used by the analytic formulas: the standard normal
// law, Poisson tails, and Riemann zeta at half-integer negative arguments.

namespace qed {

/// Truncation policy shared by every infinite series in the library.
struct SeriesControl {
  double abs_tol = 1e-12;
  int max_terms = 10'000;

  /// Throws DomainError unless abs_tol > 0 and max_terms >= 1.
  void validate() const;
};

struct NormalValues {
  double pdf;
  double cdf;
};

NormalValues normal_dist(double x);
double normal_pdf(double x);
double normal_cdf(double x);
/// 1 - Phi(x), accurate in the upper tail.
double normal_ccdf(double x);

/// Inverse of the standard normal cdf on (0, 1).
double normal_quantile(double p);

/// Mills ratio (1 - Phi(x)) / phi(x). Continued fraction for x >= 8.
double mills_ratio(double x);

/// Phi(x) / phi(x); uses the Mills ratio when either factor would lose precision.
double cdf_over_pdf(double x);

struct PoissonTail {
  double p_geq;  ///< P(N >= c)
  double p_gt;   ///< P(N > c)
};

/// Tails of N ~ Poisson(mean) through the regularized incomplete gamma function.
PoissonTail poisson_tail(double mean, long long c);

/// P(N = c) evaluated in log space.
double poisson_pmf(double mean, long long c);

enum class ZetaBranch {
  plus,   ///< zeta(1/2 - l)
  minus,  ///< zeta(-1/2 - l)
};

/// Sign and log-magnitude of a real number that may overflow a double.
struct SignedLog {
  double log_abs;
  int sign;
};

/// zeta(1/2 - l) or zeta(-1/2 - l) as sign and log|.|, via the functional
/// equation zeta(1 - s) = 2 (2 pi)^-s cos(pi s / 2) Gamma(s) zeta(s).
SignedLog zeta_half_log(int l, ZetaBranch branch);

/// Same value as a plain double; overflows to +-inf for very large l.
double zeta_half(int l, ZetaBranch branch);

}  // namespace qed
