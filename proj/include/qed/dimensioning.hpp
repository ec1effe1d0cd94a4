#pragma once

// Capacity allocation for the M/M/s queue: delay-probability targets,
// linear cost minimization, and the uncertainty-hedged square-root rule.

#include <optional>
#include <string_view>
#include <variant>

namespace qed {

struct DelayTarget {
  double epsilon;
};

/// Ratio r = a / q of server cost to delay cost.
struct CostTarget {
  double r;
};

struct StaffingProblem {
  double lambda;
  std::variant<DelayTarget, CostTarget> target;

  void validate() const;
};

enum class StaffingRule { exact, qed, refined };

std::string_view to_string(StaffingRule rule);

struct StaffingSolution {
  long long s = 0;
  StaffingRule rule = StaffingRule::exact;
  std::optional<double> beta_used;
  /// What the rule itself predicts (delay probability or cost).
  double predicted = 0.0;
  /// Exact delay probability or cost at s.
  double achieved = 0.0;
};

/// min{s > lambda : C(s, lambda) <= epsilon}.
StaffingSolution staff_exact(double lambda, double epsilon);

/// beta* with g(beta*) = epsilon.
double beta_for_delay_target(double epsilon);

/// ceil(lambda + beta*(epsilon) sqrt(lambda)).
StaffingSolution staff_qed(double lambda, double epsilon);

/// K(s, lambda) = r (s - lambda) + lambda C(s, lambda) / (s - lambda).
double cost(long long s, double lambda, double r);

/// Limiting scaled cost r beta + g(beta) / beta.
double cost_limit(double beta, double r);

/// Minimizer of cost_limit over beta > 0 (golden-section search).
double cost_beta_star(double r);

/// Exhaustive minimizer of cost() over lambda < s <= ceil(lambda + 10 sqrt(lambda) + 10).
StaffingSolution cost_exact(double lambda, double r);

/// [lambda + beta*(r) sqrt(lambda)].
StaffingSolution cost_qed(double lambda, double r);

struct RefinedCostTerms {
  double beta_star;
  double beta_bullet;
  double correction_slope;    ///< derivative of g_correction(beta)/beta at beta*
  double limit_curvature;     ///< second derivative of cost_limit at beta*
};

RefinedCostTerms refined_cost_terms(double r);

/// [lambda + beta* sqrt(lambda) + beta_bullet].
StaffingSolution cost_refined(double lambda, double r);

/// ceil(lambda_hat + beta sqrt(sigma^2 + lambda_hat)) with beta = Phi^-1(1 - epsilon).
long long staff_uncertain(double lambda_hat, double sigma, double epsilon);

/// Dispatch on problem.target for the exact/qed/refined rules. The refined
/// rule only exists for cost targets.
StaffingSolution solve(const StaffingProblem& problem, StaffingRule rule);

}  // namespace qed
