#include "qed/qed_asymptotics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "qed/errors.hpp"
#include "qed/exact_queues.hpp"
#include "qed/rounding.hpp"
#include "qed/specfun.hpp"

namespace qed {

namespace {

void require_positive_beta(double beta, const char* what) {
  if (!(beta > 0.0) || std::isnan(beta)) {
    throw DomainError(std::string(what) + ": beta must be positive");
  }
}

}  // namespace

void QedPoint::validate() const {
  require_positive_beta(beta, "QedPoint");
  if (gamma && !(*gamma > 0.0)) {
    throw DomainError("QedPoint: gamma must be positive");
  }
  if (theta && !(*theta >= 0.0)) {
    throw DomainError("QedPoint: theta must be non-negative");
  }
}

double g(double beta) {
  require_positive_beta(beta, "g");
  if (std::isinf(beta)) return 0.0;
  return 1.0 / (1.0 + beta * cdf_over_pdf(beta));
}

double h(double beta) { return g(beta) / beta; }

double loss_coefficient(double beta) {
  require_positive_beta(beta, "loss_coefficient");
  if (std::isinf(beta)) return 0.0;
  return 1.0 / cdf_over_pdf(beta);
}

double g_correction(double beta) {
  require_positive_beta(beta, "g_correction");
  const double gb = g(beta);
  const double b2 = beta * beta;
  return gb * gb * (1.0 / 3.0 + b2 / 6.0 + cdf_over_pdf(beta) * (beta / 2.0 + beta * b2 / 6.0));
}

double infinite_server_delay_approx(double s, double lambda) {
  if (!(lambda > 0.0)) {
    throw DomainError("infinite_server_delay_approx: lambda must be positive");
  }
  return normal_ccdf((s - lambda) / std::sqrt(lambda));
}

double corrected_delay(long long s, double lambda) {
  if (!(lambda > 0.0)) {
    throw DomainError("corrected_delay: lambda must be positive");
  }
  if (static_cast<double>(s) <= lambda) {
    throw InstabilityError("corrected_delay: need s > lambda");
  }
  const double root = std::sqrt(lambda);
  const double beta = (static_cast<double>(s) - lambda) / root;
  return g(beta) + g_correction(beta) * beta / root;
}

double log_utilization_gap(double slack) {
  if (slack < 0.05) {
    // d + log(1 - d) = -sum_{k>=2} d^k / k
    double term = slack * slack;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
      const double add = term / k;
      sum += add;
      if (add < 1e-18 * sum) break;
      term *= slack;
    }
    return -sum;
  }
  return slack + std::log1p(-slack);
}

QedBounds qed_bounds(long long s, double lambda) {
  if (!(lambda > 0.0)) {
    throw DomainError("qed_bounds: lambda must be positive");
  }
  const double sd = static_cast<double>(s);
  if (sd <= lambda) {
    throw InstabilityError("qed_bounds: need s > lambda");
  }
  const double slack = (sd - lambda) / sd;
  const double rho = lambda / sd;
  const double root_s = std::sqrt(sd);

  QedBounds b{};
  b.alpha = std::sqrt(-2.0 * sd * log_utilization_gap(slack));
  b.gamma_s = slack * root_s;
  b.beta = (sd - lambda) / std::sqrt(lambda);
  const double common = cdf_over_pdf(b.alpha) + (2.0 / 3.0) / root_s;
  b.upper = 1.0 / (rho + b.gamma_s * common);
  b.lower = 1.0 / (rho + b.gamma_s * (common + 1.0 / (normal_pdf(b.alpha) * (12.0 * sd - 1.0))));
  return b;
}

HwStationary::HwStationary(double beta) : beta_(beta), p_positive_(g(beta)) {}

double HwStationary::tail_above(double x) const {
  if (!(x >= 0.0)) {
    throw DomainError("tail_above: x must be >= 0");
  }
  return std::exp(-beta_ * x);
}

double HwStationary::cdf_below(double x) const {
  if (!(x <= 0.0)) {
    throw DomainError("cdf_below: x must be <= 0");
  }
  if (x == 0.0) return 1.0;
  return normal_cdf(beta_ + x) / normal_cdf(beta_);
}

HwStationary hw_diffusion_stationary(double beta) { return HwStationary(beta); }

double normal_hazard(double x) {
  const double m = mills_ratio(x);
  return std::isinf(m) ? 0.0 : 1.0 / m;
}

GarnettLimits garnett_limits(double beta, double theta) {
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw DomainError("garnett_limits: theta must be positive");
  }
  if (!std::isfinite(beta)) {
    throw DomainError("garnett_limits: beta must be finite");
  }
  const double root = std::sqrt(theta);
  const double upper = root * normal_hazard(beta / root);
  const double lower = normal_hazard(-beta);
  const double denom = lower > 0.0 ? 1.0 + upper / lower : std::numeric_limits<double>::infinity();
  return {1.0 / denom, (upper - beta) / denom};
}

double qed_finite_buffer_delay(double beta, double gamma) {
  require_positive_beta(beta, "qed_finite_buffer_delay");
  if (!(gamma > 0.0)) {
    throw DomainError("qed_finite_buffer_delay: gamma must be positive");
  }
  const double hedge = -std::expm1(-beta * gamma);
  return 1.0 / (1.0 + beta * cdf_over_pdf(beta) / hedge);
}

long long scaled_servers(double lambda, double beta, ScalingRule rule) {
  if (!(lambda > 0.0) || !(beta > 0.0)) {
    throw DomainError("scaled_servers: lambda and beta must be positive");
  }
  double target = lambda;
  switch (rule) {
    case ScalingRule::ED: target += beta; break;
    case ScalingRule::QED: target += beta * std::sqrt(lambda); break;
    case ScalingRule::QD: target += beta * lambda; break;
  }
  const long long s = round_half_up(target);
  return static_cast<double>(s) > lambda ? s : first_above(lambda);
}

double lambda_for_servers(double s, double beta) {
  if (!(s > 0.0) || !(beta >= 0.0)) {
    throw DomainError("lambda_for_servers: need s > 0 and beta >= 0");
  }
  const double root = 0.5 * (std::sqrt(beta * beta + 4.0 * s) - beta);
  return root * root;
}

BoundsRow bounds_row(long long s, double beta) {
  BoundsRow row{};
  row.s = s;
  row.lambda = lambda_for_servers(static_cast<double>(s), beta);
  const QedBounds b = qed_bounds(s, row.lambda);
  row.alpha = b.alpha;
  row.lower = b.lower;
  row.upper = b.upper;
  row.exact = erlang_c(s, row.lambda);
  row.rel_gap = (b.upper - b.lower) / row.exact;
  row.refined = corrected_delay(s, row.lambda);
  row.refined_err = std::fabs(row.refined - row.exact) / row.exact;
  return row;
}

}  // namespace qed
