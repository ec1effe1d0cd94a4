#pragma once

// Exact stationary analysis of the Markovian many-server models.

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "qed/specfun.hpp"

namespace qed {

struct NoExtension {};

/// M/M/s/n: at most n jobs in the system, arrivals finding n jobs are lost.
struct FiniteBuffer {
  long long n;
};

/// M/M/s+M: exponential patience with rate theta while waiting.
struct Abandonment {
  double theta;
};

using QueueExtension = std::variant<NoExtension, FiniteBuffer, Abandonment>;

struct QueueModel {
  double lambda = 1.0;
  double mu = 1.0;
  long long s = 1;
  QueueExtension extension = NoExtension{};

  double offered_load() const { return lambda / mu; }
  double utilization() const { return lambda / (static_cast<double>(s) * mu); }
};

struct StationaryMeasures {
  double delay_prob = 0.0;
  std::optional<double> block_prob;
  std::optional<double> abandon_prob;
  /// Waiting time in queue only (service time excluded).
  double mean_delay = 0.0;
  /// Mean number of waiting jobs.
  double mean_queue = 0.0;
  /// Fraction of busy server capacity.
  double utilization = 0.0;
  /// pi[k] = P(Q = k) for k < pi.size(); the remaining mass is tail_mass.
  std::vector<double> pi;
  double tail_mass = 0.0;
};

/// Erlang loss probability B(s, a) for offered load a (service rate 1).
double erlang_b(long long s, double lambda);

/// Erlang delay probability C(s, a); requires a < s.
double erlang_c(long long s, double lambda);

/// Extension of C(s, a) to real s > a through the integral
/// 1/C = a * int_0^inf t e^{-a t} (1 + t)^{s-1} dt.
double erlang_c_real(double s, double lambda);

StationaryMeasures mms_measures(const QueueModel& model);

using RateFn = std::function<double(std::size_t)>;

struct BirthDeathSolution {
  std::vector<double> pi;
  double tail_mass = 0.0;
  bool truncated = false;
};

/// Detailed-balance solution of a birth-death chain on {0, 1, ...}.
/// birth(k) is the rate k -> k+1, death(k) the rate k -> k-1 (k >= 1).
/// With last_state the chain lives on {0..last_state}. Otherwise states are
/// added until the estimated tail mass drops below control.abs_tol; failing
/// that within max_states the normalization is treated as divergent.
BirthDeathSolution solve_birth_death(const RateFn& birth, const RateFn& death,
                                     const SeriesControl& control = {},
                                     std::optional<std::size_t> last_state = {},
                                     std::size_t max_states = 1'000'000);

StationaryMeasures mmsn_measures(const QueueModel& model);
StationaryMeasures erlang_a_measures(const QueueModel& model);

/// Dispatches on model.extension.
StationaryMeasures stationary_measures(const QueueModel& model);

}  // namespace qed
