#include "qed/grw_bulk.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qed/errors.hpp"

namespace qed {

namespace {

// Tail of a series whose last two terms decay roughly geometrically.
double geometric_remainder(double prev, double last) {
  if (prev <= 0.0 || last <= 0.0) return 0.0;
  const double ratio = last / prev;
  return ratio < 1.0 ? last * ratio / (1.0 - ratio) : last;
}

double signed_term(const SignedLog& z, double log_rest, int l) {
  const double sign = (l % 2 == 0 ? 1.0 : -1.0) * z.sign;
  return sign * std::exp(z.log_abs + log_rest);
}

}  // namespace

void BulkModel::validate() const {
  control.validate();
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("BulkModel: lambda must be positive and finite");
  }
  if (s < 1) {
    throw DomainError("BulkModel: s must be >= 1");
  }
  if (lambda >= static_cast<double>(s)) {
    throw InstabilityError("BulkModel: stability requires lambda < s");
  }
}

PoissonPlusStats pois_plus_stats(double mean, long long c) {
  const PoissonTail tail = poisson_tail(mean, c);
  // E[(N - c)^+] = mean P(N >= c) - c P(N > c) = (mean - c) P(N > c) + mean P(N = c)
  const double plus = (mean - static_cast<double>(c)) * tail.p_gt + mean * poisson_pmf(mean, c);
  return {tail.p_gt, plus > 0.0 ? plus : 0.0};
}

BulkStationary bulk_stationary(const BulkModel& model) {
  model.validate();
  double sum_p = 0.0;
  double sum_q = 0.0;
  double prev_p = 0.0;
  double prev_q = 0.0;
  double term_p = 0.0;
  double term_q = 0.0;
  int k = 1;
  bool converged = false;
  for (; k <= model.control.max_terms; ++k) {
    const auto stats = pois_plus_stats(k * model.lambda, k * model.s);
    prev_p = term_p;
    prev_q = term_q;
    term_p = stats.p_gt / k;
    term_q = stats.plus_mean / k;
    sum_p += term_p;
    sum_q += term_q;
    if (k > 10 && term_p < model.control.abs_tol && term_q < model.control.abs_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "bulk_stationary: series did not converge within " << model.control.max_terms
        << " terms (lambda=" << model.lambda << ", s=" << model.s << ")";
    throw NumericalError(msg.str());
  }
  BulkStationary out{};
  out.p_empty = std::exp(-sum_p);
  out.mean_queue = sum_q;
  out.mean_queue_over_sqrt_s = sum_q / std::sqrt(static_cast<double>(model.s));
  out.mean_queue_over_sqrt_lambda = sum_q / std::sqrt(model.lambda);
  out.terms_used = k;
  out.remainder_log_p_empty = geometric_remainder(prev_p, term_p);
  out.remainder_mean_queue = geometric_remainder(prev_q, term_q);
  return out;
}

GrwConstants grw_constants(double beta, const SeriesControl& control) {
  control.validate();
  const double limit = 2.0 * std::sqrt(std::numbers::pi);
  if (!(beta > 0.0 && beta < limit)) {
    throw DomainError("grw_constants: beta must lie in (0, 2 sqrt(pi))");
  }
  const double log_half_b2 = std::log(0.5 * beta * beta);
  double sum_zero = 0.0;
  double sum_mean = 0.0;
  int l = 0;
  bool converged = false;
  for (; l < control.max_terms; ++l) {
    const double ld = static_cast<double>(l);
    const double common = l * log_half_b2 - std::lgamma(ld + 1.0) - std::log(2.0 * ld + 1.0);
    const double t0 = signed_term(zeta_half_log(l, ZetaBranch::plus), common, l);
    const double t1 =
        signed_term(zeta_half_log(l, ZetaBranch::minus), common - std::log(2.0 * ld + 2.0), l);
    sum_zero += t0;
    sum_mean += t1;
    if (l > 10 && std::fabs(t0) < control.abs_tol && std::fabs(t1) < control.abs_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalError("grw_constants: zeta series did not converge within max_terms");
  }
  const double inv_root_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  GrwConstants c{};
  c.beta = beta;
  c.p_zero = std::numbers::sqrt2 * beta * std::exp(beta * inv_root_2pi * sum_zero);
  c.mean_max = 0.5 / beta + zeta_half(0, ZetaBranch::plus) * inv_root_2pi + beta / 4.0 +
               beta * beta * inv_root_2pi * sum_mean;
  c.terms_used = l + 1;
  return c;
}

double many_sources_staffing(double mu_a, double sigma_a, double beta) {
  if (!(mu_a > 0.0) || !(sigma_a > 0.0) || !(beta > 0.0)) {
    throw DomainError("many_sources_staffing: all inputs must be positive");
  }
  return mu_a + beta * sigma_a;
}

}  // namespace qed
