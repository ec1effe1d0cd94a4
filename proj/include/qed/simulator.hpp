#pragma once

// Stochastic validation engine. Every replication draws from its own RNG
// streams keyed by (seed, replication, purpose), so results depend only on
// (config, seed) and never on execution order or thread count.

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "qed/exact_queues.hpp"
#include "qed/grw_bulk.hpp"
#include "qed/time_varying.hpp"

namespace qed {

struct MmsSim {
  QueueModel model;
};
struct MmsnSim {
  QueueModel model;
};
struct MmsmSim {
  QueueModel model;
};

/// M_t/M/s_t: nonhomogeneous Poisson arrivals, server levels from a schedule.
/// Level decreases use late switching (busy servers finish their job first).
struct MtSim {
  RateFunction rate;
  StaffingSchedule schedule;
  double mu = 1.0;
  /// Start from the stationary M/M/s law with offered load R(0) on s(0) servers
  /// (Poisson(R(0)) if R(0) >= s(0)) instead of an empty system.
  bool stationary_start = true;
  /// Cell width of the piecewise-constant thinning majorant.
  double majorant_cell = 0.25;
};

struct BulkSim {
  BulkModel model;
};

/// Diffusion with drift -beta - theta x above zero, -beta - x below zero,
/// and infinitesimal variance 2 (theta = 0 gives the Halfin-Whitt diffusion).
struct HwDiffusionSim {
  double beta = 1.0;
  double theta = 0.0;
  double step = 1e-3;
};

using SimModel = std::variant<MmsSim, MmsnSim, MmsmSim, MtSim, BulkSim, HwDiffusionSim>;

struct SimConfig {
  SimModel model;
  /// Time units (periods for BulkSim).
  double horizon = 1.0;
  double warmup = 0.0;
  int replications = 1;
  std::uint64_t seed = 1;
  int threads = 1;

  void validate() const;
};

enum class Metric {
  delay_prob,
  mean_delay,
  p_empty,
  mean_queue,
  abandon_prob,
  block_prob,
  frac_above_zero,
};

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view name);
bool metric_applies(const SimModel& model, Metric m);
std::string_view model_name(const SimModel& model);

struct SimEstimate {
  double point = 0.0;
  double std_error = 0.0;
  double lo = 0.0;  ///< 95% interval
  double hi = 0.0;
  int replications = 0;

  /// Student-t interval at the given confidence level.
  std::pair<double, double> interval(double level) const;
  bool covers(double value, double level) const;
};

/// Aggregates independent replication values.
SimEstimate estimate_from_replications(const std::vector<double>& values);

struct SimReport {
  std::vector<std::pair<Metric, SimEstimate>> estimates;
  /// Set for M/M/s-type models with utilization >= 1: estimates are transient.
  bool unstable = false;
  std::uint64_t seed = 0;
  int replications = 0;

  const SimEstimate& at(Metric m) const;
};

SimReport simulate(const SimConfig& config, const std::vector<Metric>& metrics);

struct ProfileBin {
  double t0;
  double t1;
  double delay_prob;
  double std_error;
  long long arrivals;
};

/// Time-dependent delay probability: fraction of arrivals in each bin of
/// [0, horizon) that find all servers busy, pooled over replications as a
/// ratio estimator. Queue models only.
std::vector<ProfileBin> simulate_delay_profile(const SimConfig& config, double bin_width);

enum class PathScaling { raw, centered_scaled };

struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  PathScaling scaling = PathScaling::raw;
  /// Active server level per point (M/M/s-type models).
  std::vector<double> levels;
};

/// Single-replication path (replication index 0). Queue models record the
/// number in system after every event; the bulk model records every period;
/// the diffusion records every `stride`-th Euler step. Centered-scaled values
/// are (Q - s)/sqrt(s) with the level in force at that time.
SamplePath sample_path(const SimConfig& config, PathScaling scaling, std::size_t stride = 1);

enum class StreamTag : std::uint32_t {
  arrivals = 1,
  service = 2,
  patience = 3,
  demand = 4,
  diffusion = 5,
  initial = 6,
};

/// Independent generator for (seed, replication, purpose).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, StreamTag tag);

/// Event times of a nonhomogeneous Poisson process on [0, horizon) by thinning
/// against a per-cell majorant max(rate) on cells of width cell_width.
std::vector<double> nhpp_arrivals(const RateFunction& rate, double horizon, std::mt19937_64& rng,
                                  double cell_width = 0.25);

}  // namespace qed
