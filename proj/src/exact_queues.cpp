#include "qed/exact_queues.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qed/errors.hpp"

namespace qed {

namespace {

void require_rates(double lambda, double mu, const char* what) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError(std::string(what) + ": lambda must be positive and finite");
  }
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw DomainError(std::string(what) + ": mu must be positive and finite");
  }
}

void require_servers(long long s, const char* what) {
  if (s < 1) {
    throw DomainError(std::string(what) + ": s must be >= 1");
  }
}

struct TailSums {
  double waiting = 0.0;   // E[(Q - s)^+]
  double busy = 0.0;      // E[min(Q, s)]
  double at_least_s = 0.0;
};

TailSums accumulate(const std::vector<double>& pi, long long s) {
  TailSums t;
  for (std::size_t k = 0; k < pi.size(); ++k) {
    const auto kk = static_cast<long long>(k);
    if (kk >= s) {
      t.waiting += static_cast<double>(kk - s) * pi[k];
      t.at_least_s += pi[k];
      t.busy += static_cast<double>(s) * pi[k];
    } else {
      t.busy += static_cast<double>(kk) * pi[k];
    }
  }
  return t;
}

}  // namespace

double erlang_b(long long s, double lambda) {
  require_servers(s, "erlang_b");
  require_rates(lambda, 1.0, "erlang_b");
  double b = 1.0;
  for (long long k = 1; k <= s; ++k) {
    b = lambda * b / (static_cast<double>(k) + lambda * b);
  }
  return b;
}

double erlang_c(long long s, double lambda) {
  require_servers(s, "erlang_c");
  require_rates(lambda, 1.0, "erlang_c");
  if (lambda >= static_cast<double>(s)) {
    throw InstabilityError("erlang_c: offered load must be below the number of servers");
  }
  const double rho = lambda / static_cast<double>(s);
  const double b = erlang_b(s, lambda);
  return 1.0 / (rho + (1.0 - rho) / b);
}

double erlang_c_real(double s, double lambda) {
  require_rates(lambda, 1.0, "erlang_c_real");
  if (!std::isfinite(s) || !(s > lambda)) {
    throw InstabilityError("erlang_c_real: need s > lambda");
  }
  // Substituting t = u / lambda gives 1/C = int_0^inf (u/lambda) e^{-u} (1 + u/lambda)^{s-1} du.
  const auto log_f = [&](double u) {
    return std::log(u / lambda) - u + (s - 1.0) * std::log1p(u / lambda);
  };
  const double slack = s - lambda;
  const double peak = 0.5 * (slack + std::sqrt(slack * slack + 4.0 * lambda));
  const double log_peak = log_f(peak);
  const double curvature = 1.0 / (peak * peak) + std::fabs(s - 1.0) / ((lambda + peak) * (lambda + peak));
  const double width = 1.0 / std::sqrt(curvature);

  const auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    return std::exp(log_f(u) - log_peak);
  };

  double right = peak + 40.0 * width;
  while (f(right) > 1e-30) {
    right += 40.0 * width;
  }
  const double left = std::max(0.0, peak - 40.0 * width);

  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  constexpr double tol = 1e-12;
  double total = 0.0;
  double err_total = 0.0;
  const double cuts[] = {0.0, left, peak, right};
  for (int i = 0; i < 3; ++i) {
    if (cuts[i + 1] <= cuts[i]) continue;
    double err = 0.0;
    total += GK::integrate(f, cuts[i], cuts[i + 1], 20, tol, &err);
    err_total += err;
  }
  double err = 0.0;
  total += GK::integrate(f, right, std::numeric_limits<double>::infinity(), 20, tol, &err);
  err_total += err;

  if (!(total > 0.0) || err_total > 1e-10 * total) {
    std::ostringstream msg;
    msg << "erlang_c_real: quadrature did not reach relative tolerance 1e-10 (s=" << s
        << ", lambda=" << lambda << ", integral=" << total << ", error=" << err_total << ")";
    throw NumericalError(msg.str());
  }
  // C = 1 / (exp(log_peak) * total)
  return std::exp(-log_peak) / total;
}

StationaryMeasures mms_measures(const QueueModel& model) {
  require_rates(model.lambda, model.mu, "mms_measures");
  require_servers(model.s, "mms_measures");
  if (!std::holds_alternative<NoExtension>(model.extension)) {
    throw DomainError("mms_measures: model must not carry a buffer or abandonment extension");
  }
  const double a = model.offered_load();
  const double s = static_cast<double>(model.s);
  if (a >= s) {
    throw InstabilityError("mms_measures: utilization must be below 1");
  }
  const double rho = a / s;
  const double c = erlang_c(model.s, a);

  StationaryMeasures m;
  m.delay_prob = c;
  m.mean_delay = c / (s * model.mu - model.lambda);
  m.mean_queue = model.lambda * m.mean_delay;
  m.utilization = rho;

  // pi_s = C (1 - rho); below s use pi_{k-1} = pi_k k / a, above it pi_{k+1} = rho pi_k.
  constexpr double tail_target = 1e-12;
  constexpr long long max_extra = 2'000'000;
  long long extra = 0;
  double tail = c;
  while (tail >= tail_target && extra < max_extra) {
    tail *= rho;
    ++extra;
  }
  m.pi.assign(static_cast<std::size_t>(model.s + extra), 0.0);
  const double pi_s = c * (1.0 - rho);
  double p = pi_s;
  for (long long k = model.s; k >= 1; --k) {
    p *= static_cast<double>(k) / a;
    m.pi[static_cast<std::size_t>(k - 1)] = p;
  }
  p = pi_s;
  for (long long k = model.s; k < model.s + extra; ++k) {
    m.pi[static_cast<std::size_t>(k)] = p;
    p *= rho;
  }
  m.tail_mass = tail;
  return m;
}

BirthDeathSolution solve_birth_death(const RateFn& birth, const RateFn& death,
                                     const SeriesControl& control,
                                     std::optional<std::size_t> last_state,
                                     std::size_t max_states) {
  control.validate();
  std::vector<double> log_w{0.0};
  double log_max = 0.0;
  double scaled_sum = 1.0;  // sum of exp(log_w - log_max)
  double tail = 0.0;        // unnormalized tail estimate, same scale as scaled_sum
  bool closed = false;

  const std::size_t limit = last_state ? *last_state : max_states;
  for (std::size_t k = 1; k <= limit; ++k) {
    const double up = birth(k - 1);
    if (!(up >= 0.0) || !std::isfinite(up)) {
      throw DomainError("solve_birth_death: birth rates must be finite and non-negative");
    }
    if (up == 0.0) {
      closed = true;
      break;
    }
    const double down = death(k);
    if (!(down > 0.0) || !std::isfinite(down)) {
      throw DomainError("solve_birth_death: death rates must be positive above state 0");
    }
    const double lw = log_w.back() + std::log(up) - std::log(down);
    log_w.push_back(lw);
    if (lw > log_max) {
      scaled_sum *= std::exp(log_max - lw);
      log_max = lw;
    }
    scaled_sum += std::exp(lw - log_max);

    if (last_state) continue;
    // Geometric tail estimate from the next transition ratio.
    const double next_up = birth(k);
    if (next_up == 0.0) {
      closed = true;
      break;
    }
    const double ratio = next_up / death(k + 1);
    if (ratio < 1.0 && k > 1) {
      const double est = std::exp(lw - log_max) * ratio / (1.0 - ratio);
      if (est < control.abs_tol * scaled_sum) {
        tail = est;
        closed = true;
        break;
      }
    }
  }
  if (!last_state && !closed) {
    throw InstabilityError(
        "solve_birth_death: normalization series did not converge (divergent or too slow)");
  }

  BirthDeathSolution out;
  const double norm = scaled_sum + tail;
  out.pi.reserve(log_w.size());
  for (double lw : log_w) {
    out.pi.push_back(std::exp(lw - log_max) / norm);
  }
  out.tail_mass = tail / norm;
  out.truncated = tail > 0.0;
  return out;
}

StationaryMeasures mmsn_measures(const QueueModel& model) {
  require_rates(model.lambda, model.mu, "mmsn_measures");
  require_servers(model.s, "mmsn_measures");
  const auto* buffer = std::get_if<FiniteBuffer>(&model.extension);
  if (buffer == nullptr) {
    throw DomainError("mmsn_measures: model needs a finite_buffer extension");
  }
  if (buffer->n < model.s) {
    throw DomainError("mmsn_measures: need n >= s");
  }
  const double lambda = model.lambda;
  const double mu = model.mu;
  const long long s = model.s;
  const auto sol = solve_birth_death(
      [lambda](std::size_t) { return lambda; },
      [mu, s](std::size_t k) { return mu * static_cast<double>(std::min<long long>(static_cast<long long>(k), s)); },
      SeriesControl{}, static_cast<std::size_t>(buffer->n));

  StationaryMeasures m;
  m.pi = sol.pi;
  const double blocked = m.pi.back();
  const TailSums t = accumulate(m.pi, s);
  m.block_prob = blocked;
  m.delay_prob = blocked < 1.0 ? (t.at_least_s - blocked) / (1.0 - blocked) : 1.0;
  m.mean_queue = t.waiting;
  m.mean_delay = t.waiting / (lambda * (1.0 - blocked));
  m.utilization = t.busy / static_cast<double>(s);
  m.tail_mass = 0.0;
  return m;
}

StationaryMeasures erlang_a_measures(const QueueModel& model) {
  require_rates(model.lambda, model.mu, "erlang_a_measures");
  require_servers(model.s, "erlang_a_measures");
  const auto* ab = std::get_if<Abandonment>(&model.extension);
  if (ab == nullptr) {
    throw DomainError("erlang_a_measures: model needs an abandonment extension");
  }
  const double theta = ab->theta;
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw DomainError("erlang_a_measures: theta must be non-negative");
  }
  if (theta == 0.0) {
    QueueModel plain = model;
    plain.extension = NoExtension{};
    StationaryMeasures m = mms_measures(plain);
    m.abandon_prob = 0.0;
    return m;
  }
  const double lambda = model.lambda;
  const double mu = model.mu;
  const long long s = model.s;
  const auto sol = solve_birth_death(
      [lambda](std::size_t) { return lambda; },
      [mu, s, theta](std::size_t k) {
        const auto kk = static_cast<long long>(k);
        return mu * static_cast<double>(std::min(kk, s)) +
               theta * static_cast<double>(std::max(kk - s, 0LL));
      },
      SeriesControl{});

  StationaryMeasures m;
  m.pi = sol.pi;
  m.tail_mass = sol.tail_mass;
  const TailSums t = accumulate(m.pi, s);
  m.delay_prob = t.at_least_s + sol.tail_mass;
  m.mean_queue = t.waiting;
  m.mean_delay = t.waiting / lambda;
  m.abandon_prob = theta * t.waiting / lambda;
  m.utilization = t.busy / static_cast<double>(s);
  return m;
}

StationaryMeasures stationary_measures(const QueueModel& model) {
  return std::visit(
      [&](const auto& ext) -> StationaryMeasures {
        using T = std::decay_t<decltype(ext)>;
        if constexpr (std::is_same_v<T, NoExtension>) {
          return mms_measures(model);
        } else if constexpr (std::is_same_v<T, FiniteBuffer>) {
          return mmsn_measures(model);
        } else {
          return erlang_a_measures(model);
        }
      },
      model.extension);
}

}  // namespace qed
