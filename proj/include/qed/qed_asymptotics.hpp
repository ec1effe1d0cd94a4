#pragma once

// Closed-form limits, refinements and bounds for many-server queues under
// square-root scaling s = lambda + beta sqrt(lambda).

#include <optional>

namespace qed {

/// Asymptotic parameterization of a system under square-root scaling.
struct QedPoint {
  double beta = 1.0;
  std::optional<double> gamma;  ///< buffer slack, n = s + gamma sqrt(s)
  std::optional<double> theta;  ///< abandonment rate

  /// Throws DomainError unless beta > 0 and gamma (if present) > 0.
  void validate() const;
};

/// Limiting delay probability (1 + beta Phi(beta)/phi(beta))^-1.
double g(double beta);

/// Limiting scaled mean delay g(beta) / beta.
double h(double beta);

/// lim sqrt(lambda) B(s, lambda) = phi(beta) / Phi(beta).
double loss_coefficient(double beta);

/// First-order correction coefficient of the delay probability:
/// g(b)^2 [1/3 + b^2/6 + (Phi/phi)(b) (b/2 + b^3/6)].
double g_correction(double beta);

/// 1 - Phi((s - lambda) / sqrt(lambda)).
double infinite_server_delay_approx(double s, double lambda);

/// g(beta) + g_correction(beta) beta / sqrt(lambda) with beta = (s - lambda)/sqrt(lambda).
double corrected_delay(long long s, double lambda);

/// 1 - rho + ln(rho) for rho = 1 - slack, without cancellation near slack = 0.
double log_utilization_gap(double slack);

struct QedBounds {
  double alpha;
  double gamma_s;  ///< (1 - rho) sqrt(s)
  double beta;
  double lower;
  double upper;
};

/// Two-sided bounds on C(s, lambda) valid for every s > lambda.
QedBounds qed_bounds(long long s, double lambda);

/// Arrival rate with s = lambda + beta sqrt(lambda).
double lambda_for_servers(double s, double beta);

struct BoundsRow {
  long long s;
  double lambda;
  double alpha;
  double lower;
  double exact;
  double upper;
  double rel_gap;      ///< (upper - lower) / exact
  double refined;      ///< corrected_delay(s, lambda)
  double refined_err;  ///< |refined - exact| / exact
};

/// Bounds, exact value and refined approximation at lambda_for_servers(s, beta).
BoundsRow bounds_row(long long s, double beta = 1.0);

/// Stationary law of the Halfin-Whitt diffusion.
class HwStationary {
public:
  explicit HwStationary(double beta);

  double beta() const { return beta_; }
  /// P(D > 0)
  double p_positive() const { return p_positive_; }
  /// P(D >= x | D > 0) for x >= 0.
  double tail_above(double x) const;
  /// P(D <= x | D <= 0) for x <= 0.
  double cdf_below(double x) const;
  /// E[D^+] = g(beta) / beta.
  double mean_positive_part() const { return p_positive_ / beta_; }

private:
  double beta_;
  double p_positive_;
};

HwStationary hw_diffusion_stationary(double beta);

struct GarnettLimits {
  double delay_prob;
  /// lim sqrt(lambda) P(abandon)
  double abandon_coef;
};

/// Hazard-rate function phi(x) / Phi(-x).
double normal_hazard(double x);

/// QED limits of the M/M/s+M queue; beta may be any real.
GarnettLimits garnett_limits(double beta, double theta);

/// Limiting delay probability under the two-fold scaling of M/M/s/n.
double qed_finite_buffer_delay(double beta, double gamma);

enum class ScalingRule { ED, QED, QD };

/// [lambda + beta], [lambda + beta sqrt(lambda)] or [lambda + beta lambda],
/// with [.] nearest integer (ties up) and the result forced above lambda.
long long scaled_servers(double lambda, double beta, ScalingRule rule);

}  // namespace qed
