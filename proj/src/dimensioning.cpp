#include "qed/dimensioning.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "qed/errors.hpp"
#include "qed/exact_queues.hpp"
#include "qed/qed_asymptotics.hpp"
#include "qed/rounding.hpp"
#include "qed/specfun.hpp"

namespace qed {

namespace {

void require_lambda(double lambda, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(what) + ": lambda must be positive and finite");
  }
}

void require_epsilon(double epsilon, const char* what) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError(std::string(what) + ": epsilon must lie in (0, 1)");
  }
}

void require_ratio(double r, const char* what) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError(std::string(what) + ": cost ratio r must be positive");
  }
}

template <class F>
double central_first(F&& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

template <class F>
double central_second(F&& f, double x, double step) {
  return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
}

// Central difference at `step`, confirmed against `check_step`.
template <class D>
double validated(D&& diff, double step, double check_step, const char* what) {
  const double a = diff(step);
  const double b = diff(check_step);
  if (std::fabs(a - b) > 1e-4 * std::fmax(std::fabs(a), 1e-12)) {
    std::ostringstream msg;
    msg << "cost_refined: finite-difference " << what << " unstable (" << a << " vs " << b << ")";
    throw NumericalError(msg.str());
  }
  return a;
}

double scaled_beta(long long s, double lambda) {
  return (static_cast<double>(s) - lambda) / std::sqrt(lambda);
}

double correction_over_beta(double beta) { return g_correction(beta) / beta; }

}  // namespace

void StaffingProblem::validate() const {
  require_lambda(lambda, "StaffingProblem");
  std::visit(
      [](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, DelayTarget>) {
          require_epsilon(t.epsilon, "StaffingProblem");
        } else {
          require_ratio(t.r, "StaffingProblem");
        }
      },
      target);
}

std::string_view to_string(StaffingRule rule) {
  switch (rule) {
    case StaffingRule::exact: return "exact";
    case StaffingRule::qed: return "qed";
    case StaffingRule::refined: return "refined";
  }
  return "?";
}

double beta_for_delay_target(double epsilon) {
  require_epsilon(epsilon, "beta_for_delay_target");
  double hi = 1.0;
  while (g(hi) > epsilon) hi *= 2.0;
  double lo = hi * 0.5;
  while (lo > 1e-300 && g(lo) < epsilon) lo *= 0.5;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) > epsilon) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

StaffingSolution staff_exact(double lambda, double epsilon) {
  require_lambda(lambda, "staff_exact");
  require_epsilon(epsilon, "staff_exact");
  const long long smallest = first_above(lambda);
  // Jump-start at the square-root guess, then walk to the exact boundary.
  const double guess = lambda + beta_for_delay_target(epsilon) * std::sqrt(lambda);
  long long s = std::max(smallest, ceil_snapped(guess));
  if (erlang_c(s, lambda) <= epsilon) {
    while (s - 1 >= smallest && erlang_c(s - 1, lambda) <= epsilon) --s;
  } else {
    while (erlang_c(s, lambda) > epsilon) ++s;
  }
  const double c = erlang_c(s, lambda);
  return {s, StaffingRule::exact, scaled_beta(s, lambda), c, c};
}

StaffingSolution staff_qed(double lambda, double epsilon) {
  require_lambda(lambda, "staff_qed");
  const double beta = beta_for_delay_target(epsilon);
  const long long s = std::max(first_above(lambda), ceil_snapped(lambda + beta * std::sqrt(lambda)));
  return {s, StaffingRule::qed, beta, g(beta), erlang_c(s, lambda)};
}

double cost(long long s, double lambda, double r) {
  require_lambda(lambda, "cost");
  require_ratio(r, "cost");
  const double slack = static_cast<double>(s) - lambda;
  if (!(slack > 0.0)) {
    throw InstabilityError("cost: need s > lambda");
  }
  return r * slack + lambda * erlang_c(s, lambda) / slack;
}

double cost_limit(double beta, double r) { return r * beta + h(beta); }

double cost_beta_star(double r) {
  require_ratio(r, "cost_beta_star");
  const auto k = [r](double b) { return cost_limit(b, r); };
  double hi = 1.0;
  while (k(2.0 * hi) <= k(hi)) hi *= 2.0;
  hi *= 2.0;
  double lo = 0.0;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = k(x1);
  double f2 = k(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::fmax(1.0, hi); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = k(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = k(x2);
    }
  }
  return 0.5 * (lo + hi);
}

StaffingSolution cost_exact(double lambda, double r) {
  require_lambda(lambda, "cost_exact");
  require_ratio(r, "cost_exact");
  const long long first = first_above(lambda);
  const long long last = static_cast<long long>(std::ceil(lambda + 10.0 * std::sqrt(lambda) + 10.0));
  long long best = first;
  double best_cost = std::numeric_limits<double>::infinity();
  for (long long s = first; s <= last; ++s) {
    const double k = cost(s, lambda, r);
    if (k < best_cost) {
      best_cost = k;
      best = s;
    }
  }
  return {best, StaffingRule::exact, scaled_beta(best, lambda), best_cost, best_cost};
}

StaffingSolution cost_qed(double lambda, double r) {
  require_lambda(lambda, "cost_qed");
  const double beta = cost_beta_star(r);
  const double root = std::sqrt(lambda);
  long long s = round_half_up(lambda + beta * root);
  if (static_cast<double>(s) <= lambda) s = first_above(lambda);
  return {s, StaffingRule::qed, beta, root * cost_limit(beta, r), cost(s, lambda, r)};
}

RefinedCostTerms refined_cost_terms(double r) {
  require_ratio(r, "refined_cost_terms");
  RefinedCostTerms t{};
  t.beta_star = cost_beta_star(r);
  const double b = t.beta_star;
  const auto k = [r](double x) { return cost_limit(x, r); };
  t.correction_slope = validated(
      [&](double step) { return central_first(correction_over_beta, b, step); }, 1e-5, 1e-6,
      "slope");
  t.limit_curvature = validated([&](double step) { return central_second(k, b, step); }, 1e-4,
                                1e-5, "curvature");
  t.beta_bullet = -b * t.correction_slope / (t.limit_curvature + 2.0 * r);
  return t;
}

StaffingSolution cost_refined(double lambda, double r) {
  require_lambda(lambda, "cost_refined");
  const RefinedCostTerms t = refined_cost_terms(r);
  const double root = std::sqrt(lambda);
  const double beta_lambda = t.beta_star + t.beta_bullet / root;
  long long s = round_half_up(lambda + beta_lambda * root);
  if (static_cast<double>(s) <= lambda) s = first_above(lambda);
  const double predicted =
      root * (cost_limit(beta_lambda, r) + correction_over_beta(beta_lambda) * beta_lambda / root);
  return {s, StaffingRule::refined, beta_lambda, predicted, cost(s, lambda, r)};
}

long long staff_uncertain(double lambda_hat, double sigma, double epsilon) {
  require_lambda(lambda_hat, "staff_uncertain");
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw DomainError("staff_uncertain: sigma must be non-negative");
  }
  require_epsilon(epsilon, "staff_uncertain");
  const double beta = normal_quantile(1.0 - epsilon);
  const long long s = ceil_snapped(lambda_hat + beta * std::sqrt(sigma * sigma + lambda_hat));
  return std::max(1LL, s);
}

StaffingSolution solve(const StaffingProblem& problem, StaffingRule rule) {
  problem.validate();
  if (const auto* d = std::get_if<DelayTarget>(&problem.target)) {
    switch (rule) {
      case StaffingRule::exact: return staff_exact(problem.lambda, d->epsilon);
      case StaffingRule::qed: return staff_qed(problem.lambda, d->epsilon);
      case StaffingRule::refined:
        throw DomainError("solve: the refined rule applies to cost targets only");
    }
  }
  const double r = std::get<CostTarget>(problem.target).r;
  switch (rule) {
    case StaffingRule::exact: return cost_exact(problem.lambda, r);
    case StaffingRule::qed: return cost_qed(problem.lambda, r);
    case StaffingRule::refined: return cost_refined(problem.lambda, r);
  }
  throw DomainError("solve: unknown rule");
}

}  // namespace qed
