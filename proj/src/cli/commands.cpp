#include "qed/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qed/cli/output.hpp"
#include "qed/dimensioning.hpp"
#include "qed/errors.hpp"
#include "qed/exact_queues.hpp"
#include "qed/grw_bulk.hpp"
#include "qed/qed_asymptotics.hpp"
#include "qed/simulator.hpp"
#include "qed/specfun.hpp"
#include "qed/time_varying.hpp"

namespace qed::cli {

namespace {

struct Common {
  std::string format = "table";
  std::string out;
  int precision = 6;

  OutputSpec spec() const {
    OutputSpec s{parse_format(format), out, precision};
    s.validate();
    return s;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--format", c.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  app->add_option("--out", c.out, "output file (default: standard output)");
  app->add_option("--precision", c.precision, "decimal digits")->check(CLI::Range(1, 15));
}

long long as_count(double v, const char* flag, long long min) {
  if (!std::isfinite(v) || v != std::floor(v) || v < static_cast<double>(min) || v > 9e18) {
    throw ConfigError(std::string(flag) + ": expected an integer >= " + std::to_string(min));
  }
  return static_cast<long long>(v);
}

template <class T>
const T& need(const std::optional<T>& v, const char* flag, std::string_view context) {
  if (!v) throw ConfigError(std::string(flag) + ": required for " + std::string(context));
  return *v;
}

double positive(const std::optional<double>& v, const char* flag, std::string_view context) {
  const double x = need(v, flag, context);
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(flag) + ": must be positive");
  return x;
}

Cell opt_num(const std::optional<double>& v) { return v ? num(*v) : Cell{}; }

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
  Common common;
  std::string model;
  std::optional<double> lambda;
  double mu = 1.0;
  std::optional<double> servers;
  std::optional<double> buffer;
  std::optional<double> theta;
  std::optional<double> beta;
};

Table measures_table(const std::vector<std::pair<std::string, std::optional<double>>>& rows) {
  Table t{"measures", {"quantity", "value"}, {}};
  for (const auto& [name, value] : rows) {
    if (value) t.rows.push_back({name, num(*value)});
  }
  return t;
}

Table approximation_table(double exact, const std::vector<std::pair<std::string, double>>& rows) {
  Table t{"qed", {"approximation", "value", "abs_err"}, {}};
  for (const auto& [name, value] : rows) t.rows.push_back({name, num(value), num(std::fabs(value - exact))});
  return t;
}

Document cmd_analyze(const AnalyzeArgs& a) {
  Document doc{"analyze", {{"model", a.model}}, {}};
  if (a.model == "grw") {
    const double beta = need(a.beta, "--beta", "--model grw");
    const GrwConstants c = grw_constants(beta);
    doc.meta.emplace_back("beta", num(beta));
    doc.tables.push_back(Table{"measures",
                               {"quantity", "value"},
                               {{std::string("p_zero"), num(c.p_zero)},
                                {std::string("mean_max"), num(c.mean_max)},
                                {std::string("brownian_mean_bound"), num(grw_brownian_mean_bound(beta))}}});
    return doc;
  }
  const double lambda = positive(a.lambda, "--lambda", "analyze");
  const long long s = as_count(need(a.servers, "--servers", "analyze"), "--servers", 1);
  doc.meta.emplace_back("lambda", num(lambda));
  doc.meta.emplace_back("servers", s);

  if (a.model == "bulk") {
    const BulkModel m{lambda, s};
    m.validate();
    const BulkStationary b = bulk_stationary(m);
    const double beta = (static_cast<double>(s) - lambda) / std::sqrt(lambda);
    doc.meta.emplace_back("beta", num(beta));
    doc.tables.push_back(measures_table({{"p_empty", b.p_empty},
                                         {"mean_queue", b.mean_queue},
                                         {"mean_queue_over_sqrt_s", b.mean_queue_over_sqrt_s},
                                         {"mean_queue_over_sqrt_lambda", b.mean_queue_over_sqrt_lambda}}));
    if (beta > 0.0 && beta < 2.0 * std::sqrt(std::numbers::pi)) {
      const GrwConstants c = grw_constants(beta);
      Table t{"qed", {"approximation", "value", "abs_err"}, {}};
      t.rows.push_back({std::string("grw_p_zero"), num(c.p_zero), num(std::fabs(c.p_zero - b.p_empty))});
      t.rows.push_back({std::string("grw_mean_max"), num(c.mean_max),
                        num(std::fabs(c.mean_max - b.mean_queue_over_sqrt_lambda))});
      doc.tables.push_back(std::move(t));
    }
    return doc;
  }

  if (!(a.mu > 0.0)) throw ConfigError("--mu: must be positive");
  QueueModel m{lambda, a.mu, s};
  doc.meta.emplace_back("mu", num(a.mu));
  const double load = m.offered_load();
  const double beta = (static_cast<double>(s) - load) / std::sqrt(load);
  doc.meta.emplace_back("offered_load", num(load));
  doc.meta.emplace_back("beta", num(beta));

  if (a.model == "mms") {
    const StationaryMeasures r = mms_measures(m);
    const QedBounds b = qed_bounds(s, load);
    doc.meta.emplace_back("alpha", num(b.alpha));
    doc.tables.push_back(measures_table({{"delay_prob", r.delay_prob},
                                         {"mean_delay", r.mean_delay},
                                         {"mean_queue", r.mean_queue},
                                         {"utilization", r.utilization},
                                         {"p_empty", r.pi.empty() ? std::nullopt : std::optional(r.pi[0])}}));
    doc.tables.push_back(approximation_table(r.delay_prob, {{"g_beta", g(beta)},
                                                            {"corrected", corrected_delay(s, load)},
                                                            {"lower_bound", b.lower},
                                                            {"upper_bound", b.upper}}));
    return doc;
  }
  if (a.model == "mmsn") {
    const long long n = as_count(need(a.buffer, "--buffer", "--model mmsn"), "--buffer", s);
    m.extension = FiniteBuffer{n};
    doc.meta.emplace_back("buffer", n);
    const StationaryMeasures r = mmsn_measures(m);
    doc.tables.push_back(measures_table({{"delay_prob", r.delay_prob},
                                         {"block_prob", r.block_prob},
                                         {"mean_delay", r.mean_delay},
                                         {"mean_queue", r.mean_queue},
                                         {"utilization", r.utilization}}));
    const double gamma = static_cast<double>(n - s) / std::sqrt(static_cast<double>(s));
    doc.meta.emplace_back("gamma", num(gamma));
    if (beta > 0.0 && gamma > 0.0) {
      doc.tables.push_back(approximation_table(r.delay_prob, {{"finite_buffer_limit", qed_finite_buffer_delay(beta, gamma)}}));
    }
    return doc;
  }
  if (a.model == "mmsm") {
    const double theta = need(a.theta, "--theta", "--model mmsm");
    if (!(theta >= 0.0)) throw ConfigError("--theta: must be non-negative");
    m.extension = Abandonment{theta};
    doc.meta.emplace_back("theta", num(theta));
    const StationaryMeasures r = erlang_a_measures(m);
    doc.tables.push_back(measures_table({{"delay_prob", r.delay_prob},
                                         {"abandon_prob", r.abandon_prob},
                                         {"mean_delay", r.mean_delay},
                                         {"mean_queue", r.mean_queue},
                                         {"utilization", r.utilization}}));
    if (theta > 0.0) {
      const double theta_scaled = theta / a.mu;
      const GarnettLimits lim = garnett_limits(beta, theta_scaled);
      Table t{"qed", {"approximation", "value", "abs_err"}, {}};
      t.rows.push_back({std::string("garnett_delay"), num(lim.delay_prob), num(std::fabs(lim.delay_prob - r.delay_prob))});
      const double ab = lim.abandon_coef / std::sqrt(load);
      t.rows.push_back({std::string("garnett_abandon"), num(ab), num(std::fabs(ab - r.abandon_prob.value_or(0.0)))});
      doc.tables.push_back(std::move(t));
    }
    return doc;
  }
  throw ConfigError("--model: expected mms, mmsn, mmsm, bulk or grw");
}

// ---------------------------------------------------------------- staff

struct StaffArgs {
  Common common;
  std::optional<double> lambda;
  std::optional<double> epsilon;
  std::optional<double> cost_ratio;
  std::optional<double> sigma;
  std::string rule = "all";
};

std::vector<Cell> solution_row(const StaffingSolution& s) {
  return {std::string(to_string(s.rule)), s.s, opt_num(s.beta_used), num(s.predicted), num(s.achieved)};
}

Document cmd_staff(const StaffArgs& a) {
  const double lambda = positive(a.lambda, "--lambda", "staff");
  if (a.epsilon.has_value() == a.cost_ratio.has_value()) {
    throw CLI::ValidationError("staff", "exactly one of --epsilon and --cost-ratio is required");
  }
  Document doc{"staff", {{"lambda", num(lambda)}}, {}};
  Table t{"staffing", {"rule", "s", "beta", "predicted", "achieved"}, {}};

  if (a.sigma) {
    if (!a.epsilon) throw CLI::ValidationError("staff", "--sigma requires --epsilon");
    doc.meta.emplace_back("target", std::string("delay"));
    doc.meta.emplace_back("epsilon", num(*a.epsilon));
    doc.meta.emplace_back("sigma", num(*a.sigma));
    const long long s = staff_uncertain(lambda, *a.sigma, *a.epsilon);
    t.rows.push_back({std::string("uncertain"), s, num(normal_quantile(1.0 - *a.epsilon)), Cell{}, Cell{}});
    doc.tables.push_back(std::move(t));
    return doc;
  }

  StaffingProblem problem{lambda, DelayTarget{0.5}};
  std::vector<StaffingRule> rules;
  if (a.epsilon) {
    problem.target = DelayTarget{*a.epsilon};
    doc.meta.emplace_back("target", std::string("delay"));
    doc.meta.emplace_back("epsilon", num(*a.epsilon));
    rules = {StaffingRule::exact, StaffingRule::qed};
  } else {
    problem.target = CostTarget{*a.cost_ratio};
    doc.meta.emplace_back("target", std::string("cost"));
    doc.meta.emplace_back("cost_ratio", num(*a.cost_ratio));
    rules = {StaffingRule::exact, StaffingRule::qed, StaffingRule::refined};
  }
  if (a.rule != "all") {
    if (a.rule == "exact") rules = {StaffingRule::exact};
    else if (a.rule == "qed") rules = {StaffingRule::qed};
    else rules = {StaffingRule::refined};
  }
  for (StaffingRule r : rules) t.rows.push_back(solution_row(solve(problem, r)));
  doc.tables.push_back(std::move(t));
  return doc;
}

// ---------------------------------------------------------------- table1

Document cmd_table1() {
  Document doc{"table1", {{"beta", num(1.0)}}, {}};
  Table t{"table1", {"s", "lambda", "alpha", "lower", "exact", "upper", "rel_gap", "refined", "refined_err"}, {}};
  for (long long s : {1LL, 2LL, 5LL, 10LL, 20LL, 50LL, 100LL, 200LL, 500LL, 1000LL}) {
    const BoundsRow r = bounds_row(s, 1.0);
    t.rows.push_back({r.s, fixed(r.lambda, 5), fixed(r.alpha, 3), num(r.lower), num(r.exact), num(r.upper),
                      sci(r.rel_gap), num(r.refined), sci(r.refined_err)});
  }
  doc.tables.push_back(std::move(t));
  return doc;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  Common common;
  std::string model;
  std::optional<double> lambda;
  std::optional<double> mu;
  std::optional<double> servers;
  std::optional<double> buffer;
  std::optional<double> theta;
  std::optional<double> beta;
  double step = 1e-3;
  std::optional<std::string> rate;
  std::string schedule = "mol";
  std::optional<double> epsilon;
  double grid_step = 0.25;
  std::optional<double> bin;
  std::optional<double> horizon;
  std::optional<double> arrivals;
  std::optional<double> warmup;
  std::optional<double> reps;
  std::string seed = "1";
  double threads = 1;
  std::vector<std::string> metrics;
  std::optional<std::string> path;
  double stride = 1;
};

std::uint64_t parse_seed(const std::string& text) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used, 0);
    if (used == text.size() && text.front() != '-') return v;
  } catch (const std::exception&) {
  }
  try {
    std::size_t used = 0;
    const double d = std::stod(text, &used);
    if (used == text.size() && d >= 0.0 && d == std::floor(d) && d < 1.8e19) {
      return static_cast<std::uint64_t>(d);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("--seed: expected a non-negative 64-bit integer");
}

Document cmd_simulate(const SimulateArgs& a) {
  const bool queue_model = a.model == "mms" || a.model == "mmsn" || a.model == "mmsm";
  SimConfig cfg;
  cfg.seed = parse_seed(a.seed);
  cfg.threads = static_cast<int>(as_count(a.threads, "--threads", 1));
  int default_reps = 10;
  Document doc{"simulate", {{"model", a.model}}, {}};

  if (a.arrivals && !queue_model) {
    throw ConfigError("--arrivals: only for --model mms, mmsn or mmsm");
  }
  if (queue_model) {
    const double lambda = positive(a.lambda, "--lambda", "--model " + a.model);
    const double mu = a.mu.value_or(1.0);
    if (!(mu > 0.0)) throw ConfigError("--mu: must be positive");
    const long long s = as_count(need(a.servers, "--servers", a.model), "--servers", 1);
    QueueModel m{lambda, mu, s};
    doc.meta.emplace_back("lambda", num(lambda));
    doc.meta.emplace_back("mu", num(mu));
    doc.meta.emplace_back("servers", s);
    if (a.model == "mms") {
      cfg.model = MmsSim{m};
    } else if (a.model == "mmsn") {
      const long long n = as_count(need(a.buffer, "--buffer", "--model mmsn"), "--buffer", s);
      m.extension = FiniteBuffer{n};
      doc.meta.emplace_back("buffer", n);
      cfg.model = MmsnSim{m};
    } else {
      const double theta = need(a.theta, "--theta", "--model mmsm");
      m.extension = Abandonment{theta};
      doc.meta.emplace_back("theta", num(theta));
      cfg.model = MmsmSim{m};
    }
  } else if (a.model == "bulk") {
    const double lambda = positive(a.lambda, "--lambda", "--model bulk");
    const long long s = as_count(need(a.servers, "--servers", "bulk"), "--servers", 1);
    doc.meta.emplace_back("lambda", num(lambda));
    doc.meta.emplace_back("servers", s);
    cfg.model = BulkSim{BulkModel{lambda, s}};
  } else if (a.model == "hw") {
    const double beta = need(a.beta, "--beta", "--model hw");
    const double theta = a.theta.value_or(0.0);
    doc.meta.emplace_back("beta", num(beta));
    doc.meta.emplace_back("theta", num(theta));
    doc.meta.emplace_back("step", num(a.step));
    cfg.model = HwDiffusionSim{beta, theta, a.step};
    default_reps = 4;
  } else if (a.model == "mt") {
    const RateFunction rate = RateFunction::parse(need(a.rate, "--rate", "--model mt"));
    const double mu = a.mu.value_or(1.0);
    if (!(mu > 0.0)) throw ConfigError("--mu: must be positive");
    const double epsilon = need(a.epsilon, "--epsilon", "--model mt");
    if (!(a.grid_step > 0.0)) throw ConfigError("--grid-step: must be positive");
    const double horizon = a.horizon.value_or(24.0);
    if (!(horizon > 0.0)) throw ConfigError("--horizon: must be positive");
    const auto grid = uniform_grid(0.0, horizon, a.grid_step);
    StaffingSchedule sched = a.schedule == "psa" ? psa_schedule(rate, mu, epsilon, grid)
                                                 : mol_schedule(rate, mu, epsilon, grid);
    doc.meta.emplace_back("rate", rate.describe());
    doc.meta.emplace_back("mu", num(mu));
    doc.meta.emplace_back("schedule", a.schedule);
    doc.meta.emplace_back("epsilon", num(epsilon));
    doc.meta.emplace_back("grid_step", num(a.grid_step));
    cfg.model = MtSim{rate, std::move(sched), mu};
  } else {
    throw ConfigError("--model: expected mms, mmsn, mmsm, mt, bulk or hw");
  }

  cfg.replications = static_cast<int>(as_count(a.reps.value_or(default_reps), "--reps", 1));
  if (queue_model && !a.horizon) {
    const double lambda = *a.lambda;
    const double span = a.arrivals.value_or(1e6) / (lambda * cfg.replications);
    cfg.warmup = a.warmup.value_or(0.01 * span);
    cfg.horizon = cfg.warmup + span;
  } else {
    if (std::holds_alternative<MtSim>(cfg.model)) {
      cfg.horizon = a.horizon.value_or(24.0);
      cfg.warmup = a.warmup.value_or(1.0 / a.mu.value_or(1.0));
    } else if (const auto* d = std::get_if<HwDiffusionSim>(&cfg.model)) {
      cfg.horizon = a.horizon.value_or(1e4);
      cfg.warmup = a.warmup.value_or(d->beta > 0.0 ? 10.0 / d->beta : 10.0);
    } else {
      cfg.horizon = a.horizon.value_or(1e6);
      cfg.warmup = a.warmup.value_or(0.01 * cfg.horizon);
    }
  }
  cfg.validate();

  doc.meta.emplace_back("seed", std::to_string(cfg.seed));
  doc.meta.emplace_back("replications", static_cast<long long>(cfg.replications));
  doc.meta.emplace_back("horizon", num(cfg.horizon));
  doc.meta.emplace_back("warmup", num(cfg.warmup));

  if (a.path) {
    const PathScaling scaling = *a.path == "scaled" ? PathScaling::centered_scaled : PathScaling::raw;
    const auto stride = static_cast<std::size_t>(as_count(a.stride, "--stride", 1));
    const SamplePath p = sample_path(cfg, scaling, stride);
    doc.meta.emplace_back("scaling", *a.path);
    Table t{"path", {"time", "value"}, {}};
    const bool levels = !p.levels.empty();
    if (levels) t.columns.emplace_back("level");
    for (std::size_t i = 0; i < p.times.size(); ++i) {
      std::vector<Cell> row{num(p.times[i]), num(p.values[i])};
      if (levels) row.push_back(static_cast<long long>(p.levels[i]));
      t.rows.push_back(std::move(row));
    }
    doc.tables.push_back(std::move(t));
    return doc;
  }

  std::vector<Metric> metrics;
  for (const auto& name : a.metrics) metrics.push_back(parse_metric(name));
  const bool mt = std::holds_alternative<MtSim>(cfg.model);
  if (metrics.empty() && !mt) {
    for (std::size_t i = 0; i <= static_cast<std::size_t>(Metric::frac_above_zero); ++i) {
      const auto m = static_cast<Metric>(i);
      if (metric_applies(cfg.model, m)) metrics.push_back(m);
    }
  }
  if (!metrics.empty()) {
    const SimReport report = simulate(cfg, metrics);
    doc.meta.emplace_back("unstable", std::string(report.unstable ? "true" : "false"));
    Table t{"estimates", {"metric", "point", "stderr", "lo", "hi"}, {}};
    for (const auto& [m, e] : report.estimates) {
      t.rows.push_back({std::string(to_string(m)), num(e.point), num(e.std_error), num(e.lo), num(e.hi)});
    }
    doc.tables.push_back(std::move(t));
  }
  if (mt) {
    const double bin = a.bin.value_or(a.grid_step);
    const auto& sched = std::get<MtSim>(cfg.model).schedule;
    Table t{"profile", {"t0", "t1", "level", "delay_prob", "stderr", "arrivals", "after_warmup"}, {}};
    for (const ProfileBin& b : simulate_delay_profile(cfg, bin)) {
      t.rows.push_back({num(b.t0), num(b.t1), sched.level_at(b.t0), num(b.delay_prob), num(b.std_error),
                        b.arrivals, static_cast<long long>(b.t0 >= cfg.warmup ? 1 : 0)});
    }
    doc.tables.push_back(std::move(t));
  }
  return doc;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qedkit: many-server queues in the quality-and-efficiency-driven regime"};
  app.name("qedkit");
  app.require_subcommand(1);

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "exact measures with QED approximations");
  analyze->add_option("--model", an.model, "mms, mmsn, mmsm, bulk or grw")
      ->required()
      ->check(CLI::IsMember({"mms", "mmsn", "mmsm", "bulk", "grw"}));
  analyze->add_option("--lambda", an.lambda, "arrival rate (bulk: mean demand per period)");
  analyze->add_option("--mu", an.mu, "service rate per server");
  analyze->add_option("--servers", an.servers, "number of servers (bulk: capacity per period)");
  analyze->add_option("--buffer", an.buffer, "system capacity n (mmsn)");
  analyze->add_option("--theta", an.theta, "abandonment rate (mmsm)");
  analyze->add_option("--beta", an.beta, "random-walk drift (grw)");
  add_common(analyze, an.common);

  StaffArgs st;
  auto* staff = app.add_subcommand("staff", "capacity for a delay or cost target");
  staff->add_option("--lambda", st.lambda, "arrival rate (offered load)")->required();
  staff->add_option("--epsilon", st.epsilon, "delay-probability target");
  staff->add_option("--cost-ratio", st.cost_ratio, "server cost over delay cost");
  staff->add_option("--sigma", st.sigma, "standard deviation of an uncertain arrival rate");
  staff->add_option("--rule", st.rule, "exact, qed, refined or all")
      ->check(CLI::IsMember({"exact", "qed", "refined", "all"}));
  add_common(staff, st.common);

  Common t1;
  auto* table1 = app.add_subcommand("table1", "bounds on the Erlang C formula for beta = 1");
  add_common(table1, t1);

  SimulateArgs sm;
  auto* sim = app.add_subcommand("simulate", "stochastic simulation with confidence intervals");
  sim->add_option("--model", sm.model, "mms, mmsn, mmsm, mt, bulk or hw")
      ->required()
      ->check(CLI::IsMember({"mms", "mmsn", "mmsm", "mt", "bulk", "hw"}));
  sim->add_option("--lambda", sm.lambda, "arrival rate (bulk: mean demand per period)");
  sim->add_option("--mu", sm.mu, "service rate per server");
  sim->add_option("--servers", sm.servers, "number of servers");
  sim->add_option("--buffer", sm.buffer, "system capacity n (mmsn)");
  sim->add_option("--theta", sm.theta, "abandonment rate (mmsm, hw)");
  sim->add_option("--beta", sm.beta, "diffusion drift (hw)");
  sim->add_option("--step", sm.step, "Euler step (hw)");
  sim->add_option("--rate", sm.rate, "rate function (mt), e.g. sinusoid:30,20,24");
  sim->add_option("--schedule", sm.schedule, "psa or mol (mt)")->check(CLI::IsMember({"psa", "mol"}));
  sim->add_option("--epsilon", sm.epsilon, "delay target of the schedule (mt)");
  sim->add_option("--grid-step", sm.grid_step, "schedule grid spacing (mt)");
  sim->add_option("--bin", sm.bin, "profile bin width (mt, default: grid step)");
  sim->add_option("--horizon", sm.horizon, "time per replication, warm-up included (bulk: periods)");
  sim->add_option("--arrivals", sm.arrivals, "expected arrivals over all replications after warm-up");
  sim->add_option("--warmup", sm.warmup, "discarded initial time");
  sim->add_option("--reps", sm.reps, "independent replications");
  sim->add_option("--seed", sm.seed, "64-bit seed");
  sim->add_option("--threads", sm.threads, "worker threads");
  sim->add_option("--metric", sm.metrics, "metrics to estimate (repeatable or comma-separated)")
      ->delimiter(',');
  sim->add_option("--path", sm.path, "emit one sample path instead: raw or scaled")
      ->check(CLI::IsMember({"raw", "scaled"}));
  sim->add_option("--stride", sm.stride, "keep every n-th path point");
  add_common(sim, sm.common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (*analyze) {
      emit(cmd_analyze(an), an.common.spec(), out);
    } else if (*staff) {
      emit(cmd_staff(st), st.common.spec(), out);
    } else if (*table1) {
      emit(cmd_table1(), t1.spec(), out);
    } else if (*sim) {
      emit(cmd_simulate(sm), sm.common.spec(), out);
    }
  } catch (const CLI::ParseError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_usage;
  } catch (const ConfigError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_usage;
  } catch (const DomainError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_domain;
  } catch (const InstabilityError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_domain;
  } catch (const NumericalError& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_numerical;
  } catch (const std::exception& e) {
    err << "qedkit: " << e.what() << '\n';
    return exit_failure;
  }
  return exit_ok;
}

}  // namespace qed::cli
