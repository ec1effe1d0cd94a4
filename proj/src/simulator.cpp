#include "qed/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "qed/errors.hpp"
#include "qed/specfun.hpp"

namespace qed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMetricCount = 7;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double exp_draw(std::mt19937_64& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

double uniform01(std::mt19937_64& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Thinning against a per-cell constant majorant. Crossing a cell boundary
// restarts the exponential clock there, which is exact by memorylessness.
class NhppGenerator {
public:
  NhppGenerator(const RateFunction& rate, double cell) : rate_(rate), cell_(cell) {
    if (!(cell > 0.0)) throw ConfigError("nhpp: cell width must be positive");
    enter_cell(0.0);
  }

  double next(std::mt19937_64& rng, double limit) {
    while (t_ < limit) {
      if (majorant_ <= 0.0) {
        enter_cell(cell_end_);
        continue;
      }
      const double cand = t_ + exp_draw(rng, majorant_);
      if (cand >= cell_end_) {
        enter_cell(cell_end_);
        continue;
      }
      t_ = cand;
      if (uniform01(rng) * majorant_ <= rate_(cand)) return t_ < limit ? t_ : kInf;
    }
    return kInf;
  }

private:
  void enter_cell(double start) {
    t_ = start;
    cell_end_ = start + cell_;
    majorant_ = rate_.max_on(start, cell_end_);
    if (!std::isfinite(majorant_)) {
      throw ConfigError("nhpp: rate is unbounded on [" + std::to_string(start) + ", " +
                        std::to_string(cell_end_) + "]");
    }
  }

  const RateFunction& rate_;
  double cell_;
  double t_ = 0.0;
  double cell_end_ = 0.0;
  double majorant_ = 0.0;
};

struct QueueSpec {
  double lambda = 0.0;
  const RateFunction* rate = nullptr;
  double mu = 1.0;
  long long s = 1;
  const StaffingSchedule* schedule = nullptr;
  std::optional<long long> capacity;
  double theta = 0.0;
  double initial_load = 0.0;
  double majorant_cell = 0.25;
};

QueueSpec queue_spec(const SimModel& model) {
  QueueSpec q;
  const auto from_model = [&q](const QueueModel& m) {
    q.lambda = m.lambda;
    q.mu = m.mu;
    q.s = m.s;
    if (const auto* f = std::get_if<FiniteBuffer>(&m.extension)) q.capacity = f->n;
    if (const auto* a = std::get_if<Abandonment>(&m.extension)) q.theta = a->theta;
  };
  std::visit(overloaded{
                 [&](const MmsSim& m) { from_model(m.model); },
                 [&](const MmsnSim& m) { from_model(m.model); },
                 [&](const MmsmSim& m) { from_model(m.model); },
                 [&](const MtSim& m) {
                   q.rate = &m.rate;
                   q.mu = m.mu;
                   q.schedule = &m.schedule;
                   if (m.stationary_start) {
                     q.initial_load = m.rate.stationary_offered_load(m.mu, 0.0).value_or(m.rate(0.0) / m.mu);
                   }
                   q.majorant_cell = m.majorant_cell;
                 },
                 [](const auto&) { throw ConfigError("not a queueing model"); },
             },
             model);
  return q;
}

// Stationary M/M/s occupancy for offered load `load` on `level` servers, or the
// infinite-server Poisson(load) law when that system would be overloaded.
long long initial_occupancy(double load, long long level, std::mt19937_64& rng) {
  if (load >= static_cast<double>(level)) {
    return std::poisson_distribution<long long>(load)(rng);
  }
  const StationaryMeasures m = mms_measures(QueueModel{load, 1.0, level});
  double u = uniform01(rng);
  for (std::size_t k = 0; k < m.pi.size(); ++k) {
    u -= m.pi[k];
    if (u < 0.0) return static_cast<long long>(k);
  }
  return static_cast<long long>(m.pi.size());
}

enum class ArrivalOutcome { served_now, delayed, blocked };

// Event loop shared by every M/M/s-type model. The observer receives:
//   interval(t0, t1, in_system, waiting, level)  occupancy on [t0, t1)
//   arrival(t, outcome)
//   start(arrival_time, t)                       a waiting job enters service
//   abandon(arrival_time)
//   state(t, in_system, level)                   after every event
template <class Observer>
void run_queue(const QueueSpec& q, double horizon, std::uint64_t seed, std::uint64_t rep,
               Observer& obs) {
  auto arr_rng = make_stream(seed, rep, StreamTag::arrivals);
  auto svc_rng = make_stream(seed, rep, StreamTag::service);
  auto pat_rng = make_stream(seed, rep, StreamTag::patience);

  std::optional<NhppGenerator> nhpp;
  if (q.rate) nhpp.emplace(*q.rate, q.majorant_cell);
  double last_arrival = 0.0;
  const auto next_arrival = [&]() -> double {
    if (nhpp) return nhpp->next(arr_rng, horizon);
    if (q.lambda <= 0.0) return kInf;
    last_arrival += exp_draw(arr_rng, q.lambda);
    return last_arrival < horizon ? last_arrival : kInf;
  };

  std::size_t cell = 0;
  long long level = q.s;
  double next_boundary = kInf;
  if (q.schedule) {
    cell = q.schedule->cell_index(0.0);
    level = q.schedule->levels[cell];
    const auto& grid = q.schedule->grid;
    next_boundary = cell + 1 < grid.size() ? grid[cell + 1] : kInf;
  }

  long long busy = 0;
  std::deque<double> queue;
  if (q.initial_load > 0.0) {
    auto init_rng = make_stream(seed, rep, StreamTag::initial);
    const long long n0 = initial_occupancy(q.initial_load, level, init_rng);
    busy = std::min(n0, level);
    for (long long i = busy; i < n0; ++i) queue.push_back(-1.0);
  }

  const auto fill = [&](double t) {
    while (busy < level && !queue.empty()) {
      obs.start(queue.front(), t);
      queue.pop_front();
      ++busy;
    }
  };

  double t = 0.0;
  double ta = next_arrival();
  obs.state(t, busy + static_cast<long long>(queue.size()), level);
  while (true) {
    const double rate_s = static_cast<double>(busy) * q.mu;
    const double rate_p = q.theta * static_cast<double>(queue.size());
    const double ts = rate_s > 0.0 ? t + exp_draw(svc_rng, rate_s) : kInf;
    const double tp = rate_p > 0.0 ? t + exp_draw(pat_rng, rate_p) : kInf;
    const double tn = std::min({ta, ts, tp, next_boundary});
    const auto waiting = static_cast<long long>(queue.size());
    obs.interval(t, std::min(tn, horizon), busy + waiting, waiting, level);
    if (tn >= horizon) break;
    t = tn;
    if (tn == ta) {
      const long long n = busy + waiting;
      if (q.capacity && n >= *q.capacity) {
        obs.arrival(t, ArrivalOutcome::blocked);
      } else if (busy < level) {
        obs.arrival(t, ArrivalOutcome::served_now);
        obs.start(t, t);
        ++busy;
      } else {
        obs.arrival(t, ArrivalOutcome::delayed);
        queue.push_back(t);
      }
      ta = next_arrival();
    } else if (tn == ts) {
      --busy;
      fill(t);
    } else if (tn == tp) {
      const auto idx = std::uniform_int_distribution<std::size_t>(0, queue.size() - 1)(pat_rng);
      obs.abandon(queue[idx]);
      queue.erase(queue.begin() + static_cast<std::ptrdiff_t>(idx));
    } else {
      ++cell;
      level = q.schedule->levels[cell];
      const auto& grid = q.schedule->grid;
      next_boundary = cell + 1 < grid.size() ? grid[cell + 1] : kInf;
      fill(t);
    }
    obs.state(t, busy + static_cast<long long>(queue.size()), level);
  }
}

using MetricValues = std::array<double, kMetricCount>;

std::size_t index_of(Metric m) { return static_cast<std::size_t>(m); }

struct StatsObserver {
  double warmup;
  double area_queue = 0.0;
  double empty_time = 0.0;
  double above_time = 0.0;
  double total_time = 0.0;
  long long arrivals = 0;
  long long admitted = 0;
  long long blocked = 0;
  long long delayed = 0;
  long long started = 0;
  long long abandoned = 0;
  double wait_sum = 0.0;

  void interval(double t0, double t1, long long n, long long waiting, long long level) {
    if (t1 <= warmup) return;
    const double dt = t1 - std::max(t0, warmup);
    if (dt <= 0.0) return;
    area_queue += static_cast<double>(waiting) * dt;
    if (n == 0) empty_time += dt;
    if (n > level) above_time += dt;
    total_time += dt;
  }
  void arrival(double t, ArrivalOutcome o) {
    if (t < warmup) return;
    ++arrivals;
    if (o == ArrivalOutcome::blocked) {
      ++blocked;
      return;
    }
    ++admitted;
    if (o == ArrivalOutcome::delayed) ++delayed;
  }
  void start(double arrived, double t) {
    if (arrived < warmup) return;
    ++started;
    wait_sum += t - arrived;
  }
  void abandon(double arrived) {
    if (arrived >= warmup) ++abandoned;
  }
  void state(double, long long, long long) {}

  MetricValues values() const {
    const auto ratio = [](double a, double b) { return b > 0.0 ? a / b : std::nan(""); };
    MetricValues v{};
    v[index_of(Metric::delay_prob)] = ratio(static_cast<double>(delayed), static_cast<double>(admitted));
    v[index_of(Metric::mean_delay)] = ratio(wait_sum, static_cast<double>(started));
    v[index_of(Metric::p_empty)] = ratio(empty_time, total_time);
    v[index_of(Metric::mean_queue)] = ratio(area_queue, total_time);
    v[index_of(Metric::abandon_prob)] = ratio(static_cast<double>(abandoned), static_cast<double>(admitted));
    v[index_of(Metric::block_prob)] = ratio(static_cast<double>(blocked), static_cast<double>(arrivals));
    v[index_of(Metric::frac_above_zero)] = ratio(above_time, total_time);
    return v;
  }
};

struct ProfileObserver {
  double bin_width;
  std::vector<long long> arrivals;
  std::vector<long long> delayed;

  void interval(double, double, long long, long long, long long) {}
  void arrival(double t, ArrivalOutcome o) {
    if (o == ArrivalOutcome::blocked) return;
    const auto i = static_cast<std::size_t>(t / bin_width);
    if (i >= arrivals.size()) return;
    ++arrivals[i];
    if (o == ArrivalOutcome::delayed) ++delayed[i];
  }
  void start(double, double) {}
  void abandon(double) {}
  void state(double, long long, long long) {}
};

struct PathObserver {
  SamplePath* path;
  void interval(double, double, long long, long long, long long) {}
  void arrival(double, ArrivalOutcome) {}
  void start(double, double) {}
  void abandon(double) {}
  void state(double t, long long n, long long level) {
    path->times.push_back(t);
    path->values.push_back(static_cast<double>(n));
    path->levels.push_back(static_cast<double>(level));
  }
};

// Q_{k+1} = max(0, Q_k + A_k - s) observed at the start of each period.
template <class Visit>
void run_bulk(const BulkModel& m, long long periods, std::uint64_t seed, std::uint64_t rep,
              Visit&& visit) {
  auto rng = make_stream(seed, rep, StreamTag::demand);
  std::poisson_distribution<long long> demand(m.lambda);
  long long q = 0;
  for (long long k = 0; k < periods; ++k) {
    visit(k, q);
    q = std::max(0LL, q + demand(rng) - m.s);
  }
}

double hw_drift(const HwDiffusionSim& d, double x) {
  return x > 0.0 ? -d.beta - d.theta * x : -d.beta - x;
}

// Euler-Maruyama with infinitesimal variance 2, started at 0.
template <class Visit>
void run_diffusion(const HwDiffusionSim& d, double horizon, std::uint64_t seed, std::uint64_t rep,
                   Visit&& visit) {
  auto rng = make_stream(seed, rep, StreamTag::diffusion);
  std::normal_distribution<double> z(0.0, 1.0);
  const auto steps = static_cast<long long>(std::llround(horizon / d.step));
  const double sd = std::sqrt(2.0 * d.step);
  double x = 0.0;
  for (long long k = 0; k < steps; ++k) {
    visit(k, x);
    x += hw_drift(d, x) * d.step + sd * z(rng);
  }
}

MetricValues run_replication(const SimConfig& c, std::uint64_t rep) {
  MetricValues nan_values;
  nan_values.fill(std::nan(""));
  if (const auto* b = std::get_if<BulkSim>(&c.model)) {
    const auto periods = static_cast<long long>(std::llround(c.horizon));
    const auto warm = static_cast<long long>(std::llround(c.warmup));
    double sum = 0.0;
    long long empty = 0;
    long long n = 0;
    run_bulk(b->model, periods, c.seed, rep, [&](long long k, long long q) {
      if (k < warm) return;
      ++n;
      sum += static_cast<double>(q);
      if (q == 0) ++empty;
    });
    MetricValues v = nan_values;
    v[index_of(Metric::p_empty)] = static_cast<double>(empty) / static_cast<double>(n);
    v[index_of(Metric::mean_queue)] = sum / static_cast<double>(n);
    v[index_of(Metric::frac_above_zero)] = 1.0 - v[index_of(Metric::p_empty)];
    return v;
  }
  if (const auto* d = std::get_if<HwDiffusionSim>(&c.model)) {
    const auto warm = static_cast<long long>(std::llround(c.warmup / d->step));
    double plus = 0.0;
    long long above = 0;
    long long n = 0;
    run_diffusion(*d, c.horizon, c.seed, rep, [&](long long k, double x) {
      if (k < warm) return;
      ++n;
      if (x > 0.0) {
        ++above;
        plus += x;
      }
    });
    MetricValues v = nan_values;
    v[index_of(Metric::frac_above_zero)] = static_cast<double>(above) / static_cast<double>(n);
    v[index_of(Metric::mean_queue)] = plus / static_cast<double>(n);
    return v;
  }
  const QueueSpec q = queue_spec(c.model);
  StatsObserver obs{c.warmup};
  run_queue(q, c.horizon, c.seed, rep, obs);
  return obs.values();
}

// Runs body(rep) for every replication, spreading indices over threads.
template <class Body>
void for_each_replication(int replications, int threads, Body&& body) {
  const int workers = std::clamp(threads, 1, replications);
  if (workers == 1) {
    for (int r = 0; r < replications; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int r = w; r < replications; r += workers) body(r);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

bool unstable_model(const SimModel& model) {
  if (const auto* m = std::get_if<MmsSim>(&model)) return m->model.utilization() >= 1.0;
  return false;
}

void check_queue_model(const QueueModel& m, const char* name) {
  if (!(m.lambda > 0.0) || !std::isfinite(m.lambda)) {
    throw ConfigError(std::string(name) + ": lambda must be positive");
  }
  if (!(m.mu > 0.0) || !std::isfinite(m.mu)) throw ConfigError(std::string(name) + ": mu must be positive");
  if (m.s < 1) throw ConfigError(std::string(name) + ": servers must be >= 1");
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t replication, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replication),
                    static_cast<std::uint32_t>(replication >> 32),
                    static_cast<std::uint32_t>(tag)};
  return std::mt19937_64(seq);
}

std::vector<double> nhpp_arrivals(const RateFunction& rate, double horizon, std::mt19937_64& rng,
                                  double cell_width) {
  if (!(horizon >= 0.0)) throw ConfigError("nhpp_arrivals: horizon must be non-negative");
  NhppGenerator gen(rate, cell_width);
  std::vector<double> out;
  for (double t = gen.next(rng, horizon); t < horizon; t = gen.next(rng, horizon)) out.push_back(t);
  return out;
}

void SimConfig::validate() const {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be positive");
  if (!(warmup >= 0.0) || !(warmup < horizon)) throw ConfigError("warmup must lie in [0, horizon)");
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  std::visit(overloaded{
                 [](const MmsSim& m) {
                   check_queue_model(m.model, "mms");
                   if (!std::holds_alternative<NoExtension>(m.model.extension)) {
                     throw ConfigError("mms: model must not carry a buffer or abandonment");
                   }
                 },
                 [](const MmsnSim& m) {
                   check_queue_model(m.model, "mmsn");
                   const auto* f = std::get_if<FiniteBuffer>(&m.model.extension);
                   if (!f || f->n < m.model.s) throw ConfigError("mmsn: needs a buffer n >= s");
                 },
                 [](const MmsmSim& m) {
                   check_queue_model(m.model, "mmsm");
                   const auto* a = std::get_if<Abandonment>(&m.model.extension);
                   if (!a || !(a->theta >= 0.0) || !std::isfinite(a->theta)) {
                     throw ConfigError("mmsm: needs an abandonment rate theta >= 0");
                   }
                 },
                 [](const MtSim& m) {
                   if (!(m.mu > 0.0)) throw ConfigError("mt: mu must be positive");
                   if (m.schedule.grid.empty() || m.schedule.grid.size() != m.schedule.levels.size()) {
                     throw ConfigError("mt: schedule grid and levels must match");
                   }
                   for (long long l : m.schedule.levels) {
                     if (l < 1) throw ConfigError("mt: schedule levels must be positive");
                   }
                   if (!(m.majorant_cell > 0.0)) throw ConfigError("mt: majorant cell must be positive");
                 },
                 [](const BulkSim& b) {
                   if (!(b.model.lambda > 0.0) || b.model.s < 1) {
                     throw ConfigError("bulk: need lambda > 0 and s >= 1");
                   }
                 },
                 [](const HwDiffusionSim& d) {
                   if (!(d.step > 0.0)) throw ConfigError("hw_diffusion: step must be positive");
                   if (!(d.theta >= 0.0)) throw ConfigError("hw_diffusion: theta must be >= 0");
                   if (!std::isfinite(d.beta)) throw ConfigError("hw_diffusion: beta must be finite");
                 },
             },
             model);
}

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::delay_prob: return "delay_prob";
    case Metric::mean_delay: return "mean_delay";
    case Metric::p_empty: return "p_empty";
    case Metric::mean_queue: return "mean_queue";
    case Metric::abandon_prob: return "abandon_prob";
    case Metric::block_prob: return "block_prob";
    case Metric::frac_above_zero: return "frac_above_zero";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (std::size_t i = 0; i < kMetricCount; ++i) {
    const auto m = static_cast<Metric>(i);
    if (to_string(m) == name) return m;
  }
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

std::string_view model_name(const SimModel& model) {
  return std::visit(overloaded{
                        [](const MmsSim&) { return std::string_view("mms"); },
                        [](const MmsnSim&) { return std::string_view("mmsn"); },
                        [](const MmsmSim&) { return std::string_view("mmsm"); },
                        [](const MtSim&) { return std::string_view("mt"); },
                        [](const BulkSim&) { return std::string_view("bulk"); },
                        [](const HwDiffusionSim&) { return std::string_view("hw"); },
                    },
                    model);
}

bool metric_applies(const SimModel& model, Metric m) {
  switch (m) {
    case Metric::delay_prob:
    case Metric::mean_delay:
      return !std::holds_alternative<BulkSim>(model) && !std::holds_alternative<HwDiffusionSim>(model);
    case Metric::p_empty:
      return !std::holds_alternative<HwDiffusionSim>(model);
    case Metric::mean_queue:
    case Metric::frac_above_zero:
      return true;
    case Metric::abandon_prob:
      return std::holds_alternative<MmsmSim>(model);
    case Metric::block_prob:
      return std::holds_alternative<MmsnSim>(model);
  }
  return false;
}

std::pair<double, double> SimEstimate::interval(double level) const {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
  if (replications < 2 || !std::isfinite(std_error)) return {point, point};
  const boost::math::students_t dist(static_cast<double>(replications - 1));
  const double q = boost::math::quantile(dist, 0.5 + 0.5 * level);
  return {point - q * std_error, point + q * std_error};
}

bool SimEstimate::covers(double value, double level) const {
  const auto [lo_, hi_] = interval(level);
  return lo_ <= value && value <= hi_;
}

SimEstimate estimate_from_replications(const std::vector<double>& values) {
  SimEstimate e;
  e.replications = static_cast<int>(values.size());
  if (values.empty()) {
    e.point = e.std_error = e.lo = e.hi = std::nan("");
    return e;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  e.point = sum / n;
  if (values.size() < 2) {
    e.std_error = std::nan("");
  } else {
    double ss = 0.0;
    for (double v : values) ss += (v - e.point) * (v - e.point);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  std::tie(e.lo, e.hi) = e.interval(0.95);
  return e;
}

const SimEstimate& SimReport::at(Metric m) const {
  for (const auto& [k, v] : estimates) {
    if (k == m) return v;
  }
  throw ConfigError("metric '" + std::string(to_string(m)) + "' was not simulated");
}

SimReport simulate(const SimConfig& config, const std::vector<Metric>& metrics) {
  config.validate();
  if (metrics.empty()) throw ConfigError("no metrics requested");
  for (Metric m : metrics) {
    if (!metric_applies(config.model, m)) {
      throw ConfigError("metric '" + std::string(to_string(m)) + "' does not apply to model '" +
                        std::string(model_name(config.model)) + "'");
    }
  }
  std::vector<MetricValues> per_rep(static_cast<std::size_t>(config.replications));
  for_each_replication(config.replications, config.threads, [&](int r) {
    per_rep[static_cast<std::size_t>(r)] = run_replication(config, static_cast<std::uint64_t>(r));
  });

  SimReport report;
  report.seed = config.seed;
  report.replications = config.replications;
  report.unstable = unstable_model(config.model);
  for (Metric m : metrics) {
    std::vector<double> xs;
    xs.reserve(per_rep.size());
    for (const auto& v : per_rep) {
      const double x = v[index_of(m)];
      if (std::isfinite(x)) xs.push_back(x);
    }
    report.estimates.emplace_back(m, estimate_from_replications(xs));
  }
  return report;
}

std::vector<ProfileBin> simulate_delay_profile(const SimConfig& config, double bin_width) {
  config.validate();
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  if (std::holds_alternative<BulkSim>(config.model) || std::holds_alternative<HwDiffusionSim>(config.model)) {
    throw ConfigError("delay profile needs a queueing model");
  }
  const QueueSpec q = queue_spec(config.model);
  const auto bins = static_cast<std::size_t>(std::ceil(config.horizon / bin_width - 1e-9));
  std::vector<ProfileObserver> per_rep(static_cast<std::size_t>(config.replications));
  for_each_replication(config.replications, config.threads, [&](int r) {
    auto& obs = per_rep[static_cast<std::size_t>(r)];
    obs = ProfileObserver{bin_width, std::vector<long long>(bins, 0), std::vector<long long>(bins, 0)};
    run_queue(q, config.horizon, config.seed, static_cast<std::uint64_t>(r), obs);
  });

  // Ratio estimator sum(D_r) / sum(A_r) with a delta-method standard error.
  std::vector<ProfileBin> out(bins);
  const double n = static_cast<double>(config.replications);
  for (std::size_t i = 0; i < bins; ++i) {
    long long a_tot = 0;
    long long d_tot = 0;
    for (const auto& obs : per_rep) {
      a_tot += obs.arrivals[i];
      d_tot += obs.delayed[i];
    }
    ProfileBin& b = out[i];
    b.t0 = static_cast<double>(i) * bin_width;
    b.t1 = std::min(config.horizon, b.t0 + bin_width);
    b.arrivals = a_tot;
    if (a_tot == 0) {
      b.delay_prob = std::nan("");
      b.std_error = std::nan("");
      continue;
    }
    b.delay_prob = static_cast<double>(d_tot) / static_cast<double>(a_tot);
    const double a_bar = static_cast<double>(a_tot) / n;
    double ss = 0.0;
    for (const auto& obs : per_rep) {
      const double resid = static_cast<double>(obs.delayed[i]) - b.delay_prob * static_cast<double>(obs.arrivals[i]);
      ss += resid * resid;
    }
    b.std_error = n > 1.0 ? std::sqrt(ss / (n - 1.0) / n) / a_bar : std::nan("");
  }
  return out;
}

SamplePath sample_path(const SimConfig& config, PathScaling scaling, std::size_t stride) {
  config.validate();
  if (stride == 0) throw ConfigError("sample_path: stride must be >= 1");
  SamplePath path;
  path.scaling = scaling;
  if (const auto* b = std::get_if<BulkSim>(&config.model)) {
    run_bulk(b->model, static_cast<long long>(std::llround(config.horizon)), config.seed, 0,
             [&](long long k, long long q) {
               if (static_cast<std::size_t>(k) % stride != 0) return;
               path.times.push_back(static_cast<double>(k));
               path.values.push_back(static_cast<double>(q));
               path.levels.push_back(static_cast<double>(b->model.s));
             });
  } else if (const auto* d = std::get_if<HwDiffusionSim>(&config.model)) {
    // The diffusion is already on the centered-scaled axis.
    run_diffusion(*d, config.horizon, config.seed, 0, [&](long long k, double x) {
      if (static_cast<std::size_t>(k) % stride != 0) return;
      path.times.push_back(static_cast<double>(k) * d->step);
      path.values.push_back(x);
    });
    return path;
  } else {
    PathObserver obs{&path};
    run_queue(queue_spec(config.model), config.horizon, config.seed, 0, obs);
    if (stride > 1) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < path.times.size(); i += stride, ++w) {
        path.times[w] = path.times[i];
        path.values[w] = path.values[i];
        path.levels[w] = path.levels[i];
      }
      path.times.resize(w);
      path.values.resize(w);
      path.levels.resize(w);
    }
  }
  if (scaling == PathScaling::centered_scaled) {
    for (std::size_t i = 0; i < path.values.size(); ++i) {
      const double s = path.levels[i];
      path.values[i] = (path.values[i] - s) / std::sqrt(s);
    }
  }
  return path;
}

}  // namespace qed
