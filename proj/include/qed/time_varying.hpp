#pragma once

// Time-varying demand: rate functions, the infinite-server offered load R(t),
// and pointwise-stationary (PSA) / modified-offered-load (MOL) schedules.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qed {

struct ConstantRate {
  double level;
};

/// base + amplitude * sin(2 pi t / period + phase)
struct SinusoidRate {
  double base;
  double amplitude;
  double period;
  double phase = 0.0;

  double omega() const;
};

/// levels[i] on [breakpoints[i], breakpoints[i+1]); the last level extends to +inf
/// and levels[0] also covers t < breakpoints[0].
struct PiecewiseConstantRate {
  std::vector<double> breakpoints;
  std::vector<double> levels;
};

/// Linear interpolation between samples, held constant outside the range.
struct SampledRate {
  std::vector<double> times;
  std::vector<double> values;
};

class RateFunction {
public:
  using Variant = std::variant<ConstantRate, SinusoidRate, PiecewiseConstantRate, SampledRate>;

  RateFunction(Variant v);  // NOLINT(google-explicit-constructor)

  double operator()(double t) const;

  /// Upper bound of the rate on [t0, t1] (exact for every variant).
  double max_on(double t0, double t1) const;

  /// Closed-form R(t) = int_0^inf rate(t - u) e^{-mu u} du when the rate has a
  /// defined past (constant and sinusoid); empty otherwise.
  std::optional<double> stationary_offered_load(double mu, double t) const;

  /// Throws DomainError if the rate can be negative.
  void validate() const;

  const Variant& variant() const { return v_; }

  /// Parses `constant:L`, `sinusoid:A,B,PERIOD[,PHASE]`, `pwc:t0,l0;t1,l1;...`
  /// or `csv:PATH` (two columns: time, rate; optional header).
  static RateFunction parse(std::string_view spec);

  std::string describe() const;

private:
  Variant v_;
};

/// Piecewise-linear function sampled on a uniform grid.
struct SampledFunction {
  std::vector<double> times;
  std::vector<double> values;

  double operator()(double t) const;
};

/// R' = rate(t) - mu R on [0, horizon]: exact decay plus Gauss-Legendre
/// quadrature of the inflow on fine substeps. With no initial value the
/// stationary convolution is used when available, otherwise rate(0) / mu.
SampledFunction offered_load(const RateFunction& rate, double mu, double horizon,
                             double grid_step, std::optional<double> initial = {});

enum class ScheduleMethod { PSA, MOL };

std::string_view to_string(ScheduleMethod m);

struct StaffingSchedule {
  std::vector<double> grid;
  std::vector<long long> levels;
  ScheduleMethod method = ScheduleMethod::PSA;
  double epsilon = 0.0;
  double mu = 1.0;

  /// Level in force at time t: the cell [grid[i], grid[i+1]) containing t;
  /// clamps to the first/last cell outside the grid.
  long long level_at(double t) const;
  std::size_t cell_index(double t) const;
};

/// Uniform grid t0, t0 + step, ..., up to and including t1 (within round-off).
std::vector<double> uniform_grid(double t0, double t1, double step);

/// Exact Erlang-C staffing for the instantaneous offered load rate(t)/mu.
StaffingSchedule psa_schedule(const RateFunction& rate, double mu, double epsilon,
                              const std::vector<double>& grid);

/// ceil(R(t) + beta*(epsilon) sqrt(R(t))) with stationary-initialized R.
StaffingSchedule mol_schedule(const RateFunction& rate, double mu, double epsilon,
                              const std::vector<double>& grid);

}  // namespace qed
