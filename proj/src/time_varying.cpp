#include "qed/time_varying.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qed/dimensioning.hpp"
#include "qed/errors.hpp"
#include "qed/rounding.hpp"

namespace qed {

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(const std::string& token, std::string_view context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != token.size()) {
    throw ConfigError("rate spec '" + std::string(context) + "': bad number '" + token + "'");
  }
  return v;
}

double interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double t) {
  if (t <= xs.front()) return ys.front();
  if (t >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), t);
  const auto i = static_cast<std::size_t>(it - xs.begin());
  const double w = (t - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

void require_increasing(const std::vector<double>& xs, const char* what) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) {
      throw DomainError(std::string(what) + ": times must be strictly increasing");
    }
  }
}

}  // namespace

double SinusoidRate::omega() const { return 2.0 * std::numbers::pi / period; }

RateFunction::RateFunction(Variant v) : v_(std::move(v)) { validate(); }

void RateFunction::validate() const {
  std::visit(
      [](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          if (!(r.level >= 0.0)) throw DomainError("constant rate must be non-negative");
        } else if constexpr (std::is_same_v<T, SinusoidRate>) {
          if (!(r.period > 0.0)) throw DomainError("sinusoid period must be positive");
          if (!(r.base >= std::fabs(r.amplitude))) {
            throw DomainError("sinusoid rate needs base >= |amplitude| to stay non-negative");
          }
        } else if constexpr (std::is_same_v<T, PiecewiseConstantRate>) {
          if (r.breakpoints.empty() || r.breakpoints.size() != r.levels.size()) {
            throw DomainError("piecewise-constant rate needs matching breakpoints and levels");
          }
          require_increasing(r.breakpoints, "piecewise-constant rate");
          for (double l : r.levels) {
            if (!(l >= 0.0)) throw DomainError("piecewise-constant levels must be non-negative");
          }
        } else {
          if (r.times.empty() || r.times.size() != r.values.size()) {
            throw DomainError("sampled rate needs matching times and values");
          }
          require_increasing(r.times, "sampled rate");
          for (double l : r.values) {
            if (!(l >= 0.0)) throw DomainError("sampled rate values must be non-negative");
          }
        }
      },
      v_);
}

double RateFunction::operator()(double t) const {
  return std::visit(
      [t](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level;
        } else if constexpr (std::is_same_v<T, SinusoidRate>) {
          return r.base + r.amplitude * std::sin(r.omega() * t + r.phase);
        } else if constexpr (std::is_same_v<T, PiecewiseConstantRate>) {
          const auto it = std::upper_bound(r.breakpoints.begin(), r.breakpoints.end(), t);
          const auto i = it == r.breakpoints.begin() ? 0 : static_cast<std::size_t>(it - r.breakpoints.begin()) - 1;
          return r.levels[i];
        } else {
          return interpolate(r.times, r.values, t);
        }
      },
      v_);
}

double RateFunction::max_on(double t0, double t1) const {
  if (t1 < t0) std::swap(t0, t1);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level;
        } else if constexpr (std::is_same_v<T, SinusoidRate>) {
          double best = std::max((*this)(t0), (*this)(t1));
          // Critical points: omega t + phase = pi/2 + k pi.
          const double w = r.omega();
          const double k_lo = std::ceil((w * t0 + r.phase - std::numbers::pi / 2) / std::numbers::pi);
          const double k_hi = std::floor((w * t1 + r.phase - std::numbers::pi / 2) / std::numbers::pi);
          for (double k = k_lo; k <= k_hi && k <= k_lo + 2; k += 1.0) {
            const double tc = (std::numbers::pi / 2 + k * std::numbers::pi - r.phase) / w;
            best = std::max(best, (*this)(tc));
          }
          return best;
        } else if constexpr (std::is_same_v<T, PiecewiseConstantRate>) {
          double best = (*this)(t0);
          for (std::size_t i = 0; i < r.breakpoints.size(); ++i) {
            if (r.breakpoints[i] > t0 && r.breakpoints[i] <= t1) best = std::max(best, r.levels[i]);
          }
          return best;
        } else {
          double best = std::max((*this)(t0), (*this)(t1));
          for (std::size_t i = 0; i < r.times.size(); ++i) {
            if (r.times[i] > t0 && r.times[i] < t1) best = std::max(best, r.values[i]);
          }
          return best;
        }
      },
      v_);
}

std::optional<double> RateFunction::stationary_offered_load(double mu, double t) const {
  if (const auto* c = std::get_if<ConstantRate>(&v_)) {
    return c->level / mu;
  }
  if (const auto* s = std::get_if<SinusoidRate>(&v_)) {
    const double w = s->omega();
    const double arg = w * t + s->phase;
    return s->base / mu +
           s->amplitude * (mu * std::sin(arg) - w * std::cos(arg)) / (mu * mu + w * w);
  }
  return std::nullopt;
}

RateFunction RateFunction::parse(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ConfigError("rate spec '" + std::string(spec) + "': expected KIND:ARGS");
  }
  const std::string kind(spec.substr(0, colon));
  const std::string_view args = spec.substr(colon + 1);
  if (kind == "constant") {
    return RateFunction(ConstantRate{parse_number(std::string(args), spec)});
  }
  if (kind == "sinusoid") {
    const auto parts = split(args, ',');
    if (parts.size() != 3 && parts.size() != 4) {
      throw ConfigError("rate spec '" + std::string(spec) + "': sinusoid needs A,B,PERIOD[,PHASE]");
    }
    SinusoidRate s{parse_number(parts[0], spec), parse_number(parts[1], spec),
                   parse_number(parts[2], spec), parts.size() == 4 ? parse_number(parts[3], spec) : 0.0};
    return RateFunction(s);
  }
  if (kind == "pwc") {
    PiecewiseConstantRate p;
    for (const auto& cell : split(args, ';')) {
      if (cell.empty()) continue;
      const auto tv = split(cell, ',');
      if (tv.size() != 2) {
        throw ConfigError("rate spec '" + std::string(spec) + "': pwc cells are TIME,LEVEL");
      }
      p.breakpoints.push_back(parse_number(tv[0], spec));
      p.levels.push_back(parse_number(tv[1], spec));
    }
    return RateFunction(p);
  }
  if (kind == "csv") {
    std::ifstream in{std::string(args)};
    if (!in) {
      throw ConfigError("rate spec: cannot open '" + std::string(args) + "'");
    }
    SampledRate r;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto cols = split(line, ',');
      if (cols.size() < 2) {
        throw ConfigError("rate csv: expected two columns in line '" + line + "'");
      }
      try {
        r.times.push_back(parse_number(cols[0], spec));
        r.values.push_back(parse_number(cols[1], spec));
      } catch (const ConfigError&) {
        if (!first) throw;  // only the first line may be a header
      }
      first = false;
    }
    return RateFunction(r);
  }
  throw ConfigError("rate spec '" + std::string(spec) + "': unknown kind '" + kind + "'");
}

std::string RateFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          os << "constant:" << r.level;
        } else if constexpr (std::is_same_v<T, SinusoidRate>) {
          os << "sinusoid:" << r.base << ',' << r.amplitude << ',' << r.period << ',' << r.phase;
        } else if constexpr (std::is_same_v<T, PiecewiseConstantRate>) {
          os << "pwc:";
          for (std::size_t i = 0; i < r.levels.size(); ++i) {
            os << (i ? ";" : "") << r.breakpoints[i] << ',' << r.levels[i];
          }
        } else {
          os << "sampled:" << r.times.size() << " points";
        }
      },
      v_);
  return os.str();
}

double SampledFunction::operator()(double t) const { return interpolate(times, values, t); }

SampledFunction offered_load(const RateFunction& rate, double mu, double horizon,
                             double grid_step, std::optional<double> initial) {
  if (!(grid_step > 0.0)) throw DomainError("offered_load: grid_step must be positive");
  if (!(mu > 0.0)) throw DomainError("offered_load: mu must be positive");
  if (!(horizon >= 0.0)) throw DomainError("offered_load: horizon must be non-negative");
  const auto lam = [&](double t) {
    const double v = rate(t);
    if (!(v >= 0.0)) throw DomainError("offered_load: negative arrival rate encountered");
    return v;
  };
  double r0 = 0.0;
  if (initial) {
    if (!(*initial >= 0.0)) throw DomainError("offered_load: initial value must be non-negative");
    r0 = *initial;
  } else {
    r0 = rate.stationary_offered_load(mu, 0.0).value_or(lam(0.0) / mu);
  }

  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(horizon / grid_step - 1e-9)));
  const double step = horizon > 0.0 ? horizon / static_cast<double>(n) : grid_step;
  SampledFunction out;
  out.times.reserve(n + 1);
  out.values.reserve(n + 1);
  double t = 0.0;
  double r = r0;
  out.times.push_back(t);
  out.values.push_back(r);
  // Exact propagation of the linear part over each substep:
  //   R(t + h) = R(t) e^{-mu h} + int_0^h rate(t + u) e^{-mu (h - u)} du,
  // with the integral by 3-point Gauss-Legendre. The nodes are interior, so
  // rate jumps on the grid are integrated without a one-sided bias.
  const double h_max = 0.01 / std::max(mu, 1.0);
  const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(step / h_max)));
  const double h = step / static_cast<double>(m);
  const double decay = std::exp(-mu * h);
  static constexpr std::array<double, 3> nodes{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  std::array<double, 3> kernel{};
  for (std::size_t q = 0; q < 3; ++q) {
    const double u = 0.5 * h * (1.0 + nodes[q]);
    kernel[q] = 0.5 * h * weights[q] * std::exp(-mu * (h - u));
  }
  for (std::size_t i = 1; i <= n; ++i) {
    const double t0 = static_cast<double>(i - 1) * step;
    for (std::size_t j = 0; j < m; ++j) {
      const double tt = t0 + static_cast<double>(j) * h;
      double inflow = 0.0;
      for (std::size_t q = 0; q < 3; ++q) inflow += kernel[q] * lam(tt + 0.5 * h * (1.0 + nodes[q]));
      r = std::max(r * decay + inflow, 0.0);
    }
    t = static_cast<double>(i) * step;
    out.times.push_back(t);
    out.values.push_back(r);
  }
  return out;
}

std::string_view to_string(ScheduleMethod m) { return m == ScheduleMethod::PSA ? "psa" : "mol"; }

std::size_t StaffingSchedule::cell_index(double t) const {
  const auto it = std::upper_bound(grid.begin(), grid.end(), t);
  if (it == grid.begin()) return 0;
  return static_cast<std::size_t>(it - grid.begin()) - 1;
}

long long StaffingSchedule::level_at(double t) const { return levels[cell_index(t)]; }

std::vector<double> uniform_grid(double t0, double t1, double step) {
  if (!(step > 0.0) || !(t1 >= t0)) throw DomainError("uniform_grid: need step > 0 and t1 >= t0");
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / step + 1e-9));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = t0 + static_cast<double>(i) * step;
  return grid;
}

namespace {

void check_grid(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + ": grid must not be empty");
  require_increasing(grid, what);
}

}  // namespace

StaffingSchedule psa_schedule(const RateFunction& rate, double mu, double epsilon,
                              const std::vector<double>& grid) {
  check_grid(grid, "psa_schedule");
  if (!(mu > 0.0)) throw DomainError("psa_schedule: mu must be positive");
  StaffingSchedule sched{grid, {}, ScheduleMethod::PSA, epsilon, mu};
  sched.levels.reserve(grid.size());
  for (double t : grid) {
    const double load = rate(t) / mu;
    if (!std::isfinite(load)) throw DomainError("psa_schedule: rate must be finite on the grid");
    sched.levels.push_back(load > 0.0 ? staff_exact(load, epsilon).s : 1);
  }
  return sched;
}

StaffingSchedule mol_schedule(const RateFunction& rate, double mu, double epsilon,
                              const std::vector<double>& grid) {
  check_grid(grid, "mol_schedule");
  if (grid.front() < 0.0) throw DomainError("mol_schedule: grid must start at t >= 0");
  const double beta = beta_for_delay_target(epsilon);
  double spacing = grid.size() > 1 ? grid[1] - grid[0] : 1.0;
  for (std::size_t i = 1; i < grid.size(); ++i) spacing = std::min(spacing, grid[i] - grid[i - 1]);
  const double step = std::min(0.01, spacing / 10.0);
  const SampledFunction load = offered_load(rate, mu, grid.back(), step);

  StaffingSchedule sched{grid, {}, ScheduleMethod::MOL, epsilon, mu};
  sched.levels.reserve(grid.size());
  for (double t : grid) {
    const double r = load(t);
    sched.levels.push_back(r > 0.0 ? ceil_snapped(r + beta * std::sqrt(r)) : 1);
  }
  return sched;
}

}  // namespace qed
