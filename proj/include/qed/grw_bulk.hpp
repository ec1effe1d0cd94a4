#pragma once

// Bulk-service queue Q_{k+1} = max(0, Q_k + Pois(lambda) - s) and its
// square-root-scaling limit, the all-time maximum of a Gaussian random walk.

#include "qed/specfun.hpp"

namespace qed {

struct BulkModel {
  double lambda = 1.0;  ///< mean Poisson demand per period
  long long s = 2;      ///< capacity per period
  SeriesControl control{};

  /// Throws DomainError for bad parameters, InstabilityError if lambda >= s.
  void validate() const;
};

struct PoissonPlusStats {
  double p_gt;       ///< P(N > c)
  double plus_mean;  ///< E[(N - c)^+]
};

/// Positive-part statistics of N - c for N ~ Poisson(mean).
PoissonPlusStats pois_plus_stats(double mean, long long c);

struct BulkStationary {
  double p_empty;
  double mean_queue;
  double mean_queue_over_sqrt_s;
  double mean_queue_over_sqrt_lambda;
  int terms_used;
  /// Extrapolated remainder of the truncated series (log-probability and mean).
  double remainder_log_p_empty;
  double remainder_mean_queue;
};

/// Stationary P(Q = 0) and E[Q] from the positive parts of the partial sums
/// S_k = Pois(k lambda) - k s.
BulkStationary bulk_stationary(const BulkModel& model);

struct GrwConstants {
  double beta;
  double p_zero;    ///< P(M_beta = 0)
  double mean_max;  ///< E[M_beta]
  int terms_used;
};

/// Zeta-series for the maximum of a random walk with N(-beta, 1) steps,
/// valid for 0 < beta < 2 sqrt(pi).
GrwConstants grw_constants(double beta, const SeriesControl& control = {});

/// Mean of the Brownian-maximum bound on M_beta: an exponential with mean 1/(2 beta).
inline double grw_brownian_mean_bound(double beta) { return 0.5 / beta; }

/// Capacity mu_A + beta sigma_A for an aggregate demand with mean mu_A and
/// standard deviation sigma_A (not rounded).
double many_sources_staffing(double mu_a, double sigma_a, double beta);

}  // namespace qed
