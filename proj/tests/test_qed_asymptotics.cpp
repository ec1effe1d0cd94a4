#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "qed/errors.hpp"
#include "qed/exact_queues.hpp"
#include "qed/qed_asymptotics.hpp"
#include "qed/specfun.hpp"

using namespace qed;
using doctest::Approx;

namespace {

struct PrintedRow {
  long long s;
  double alpha, lower, exact, upper, rel_gap, refined;
};

// The printed table for beta = 1.
constexpr std::array<PrintedRow, 10> kTable{{
    {1, 0.830, 0.36571, 0.38197, 0.39437, 7.504e-2, 0.45085},
    {2, 0.879, 0.32678, 0.33333, 0.33936, 3.772e-2, 0.36395},
    {5, 0.924, 0.28886, 0.29097, 0.29328, 1.518e-2, 0.30185},
    {10, 0.946, 0.26937, 0.27030, 0.27142, 7.616e-3, 0.27540},
    {20, 0.962, 0.25565, 0.25608, 0.25663, 3.818e-3, 0.25851},
    {50, 0.976, 0.24361, 0.24377, 0.24398, 1.531e-3, 0.24470},
    {100, 0.983, 0.23761, 0.23769, 0.23779, 7.665e-4, 0.23814},
    {200, 0.988, 0.23340, 0.23344, 0.23349, 3.836e-4, 0.23366},
    {500, 0.993, 0.22969, 0.22970, 0.22972, 1.536e-4, 0.22979},
    {1000, 0.995, 0.22783, 0.22783, 0.22784, 7.683e-5, 0.22788},
}};

// Composite Simpson on [a, b].
template <class F>
double simpson(F&& f, double a, double b, int n = 20000) {
  const double step = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * step) * (i % 2 ? 4.0 : 2.0);
  return acc * step / 3.0;
}

}  // namespace

TEST_CASE("g, h and the loss coefficient at reference points") {
  CHECK(std::fabs(g(1.0) - 0.223361) < 1e-6);
  CHECK(std::fabs(g(0.5) - 0.504539) < 1e-6);
  CHECK(std::fabs(g(0.1) - 0.880287) < 1e-6);
  CHECK(std::fabs(h(1.0) - 0.22336) < 5e-6);
  CHECK(std::fabs(h(0.5) - 1.009078) < 2e-6);
  CHECK(h(1e3) < 1e-3);
  CHECK(std::fabs(loss_coefficient(1.0) - 0.287601) < 2e-6);
  CHECK(loss_coefficient(1.0) == Approx(std::exp(-0.5) / std::sqrt(2.0 * M_PI) / (0.5 * std::erfc(-1.0 / std::sqrt(2.0)))).epsilon(1e-14));
  CHECK(std::fabs(loss_coefficient(2.0) - 0.055248) < 1e-6);
  CHECK(std::fabs(loss_coefficient(1e-9) - 2.0 * normal_pdf(0.0)) < 1e-8);
  CHECK_THROWS_AS(g(0.0), DomainError);
  CHECK_THROWS_AS(h(-1.0), DomainError);
  CHECK_THROWS_AS(loss_coefficient(0.0), DomainError);
}

TEST_CASE("g, h and the loss coefficient are strictly decreasing") {
  double pg = 2.0, ph = INFINITY, pl = INFINITY;
  for (double b = 0.01; b <= 12.0; b += 0.01) {
    CHECK(g(b) < pg);
    CHECK(h(b) < ph);
    CHECK(loss_coefficient(b) < pl);
    pg = g(b);
    ph = h(b);
    pl = loss_coefficient(b);
  }
  CHECK(g(1e-8) > 0.99999);
  CHECK(g(40.0) < 1e-300 + 1e-20);
  CHECK(g(40.0) >= 0.0);
  CHECK(h(1e-6) * 1e-6 == Approx(1.0).epsilon(1e-5));
}

TEST_CASE("g far out uses the Mills ratio without 0/0") {
  for (double b = 7.5; b < 9.0; b += 0.1) {
    const double direct = 1.0 / (1.0 + b * normal_cdf(b) / normal_pdf(b));
    CHECK(g(b) == Approx(direct).epsilon(1e-12));
  }
  CHECK(std::isfinite(g(50.0)));
}

TEST_CASE("infinite-server approximation") {
  CHECK(infinite_server_delay_approx(50.0, 50.0) == Approx(0.5).epsilon(1e-15));
  CHECK(std::fabs(infinite_server_delay_approx(110.0, 100.0) - 0.158655) < 1e-6);
  for (double lambda : {2.0, 30.0, 400.0}) {
    for (long long s = static_cast<long long>(lambda) + 1; s < static_cast<long long>(lambda * 1.5) + 5; ++s) {
      CHECK(infinite_server_delay_approx(static_cast<double>(s), lambda) <= erlang_c(s, lambda));
    }
  }
}

TEST_CASE("corrected delay examples and domain") {
  CHECK(std::fabs(corrected_delay(10, lambda_for_servers(10, 1.0)) - 0.27540) < 1e-5);
  CHECK(std::fabs(corrected_delay(100, lambda_for_servers(100, 1.0)) - 0.23814) < 1e-5);
  CHECK(std::fabs(corrected_delay(1, lambda_for_servers(1, 1.0)) - 0.45085) < 1e-5);
  CHECK_THROWS_AS(corrected_delay(5, 5.0), InstabilityError);
  const double b = 0.7;
  CHECK(g_correction(b) == Approx(g(b) * g(b) *
                                  (1.0 / 3.0 + b * b / 6.0 +
                                   normal_cdf(b) / normal_pdf(b) * (b / 2.0 + b * b * b / 6.0)))
                               .epsilon(1e-14));
}

TEST_CASE("log utilization gap has no cancellation") {
  for (double e : {1e-12, 1e-8, 1e-4, 0.1, 0.5}) {
    const double rho = 1.0 - e;
    const double series = -(e * e / 2.0 + e * e * e / 3.0 + e * e * e * e / 4.0);
    if (e < 1e-3) CHECK(log_utilization_gap(e) == Approx(series).epsilon(1e-8));
    else CHECK(log_utilization_gap(e) == Approx(1.0 - rho + std::log(rho)).epsilon(1e-12));
  }
}

TEST_CASE("bounds reproduce the printed table") {
  for (const PrintedRow& p : kTable) {
    CAPTURE(p.s);
    const BoundsRow r = bounds_row(p.s, 1.0);
    CHECK(std::fabs(r.alpha - p.alpha) <= 5e-4 + 1e-12);
    CHECK(std::fabs(r.lower - p.lower) <= 1e-5);
    CHECK(std::fabs(r.exact - p.exact) <= 1e-5);
    CHECK(std::fabs(r.upper - p.upper) <= 1e-5);
    CHECK(std::fabs(r.refined - p.refined) <= 1e-5);
    CHECK(r.rel_gap == Approx(p.rel_gap).epsilon(2e-3));
    CHECK(r.refined_err == Approx(std::fabs(r.refined - r.exact) / r.exact).epsilon(1e-12));
    CHECK(r.lambda + std::sqrt(r.lambda) == Approx(static_cast<double>(p.s)).epsilon(1e-14));
  }
}

TEST_CASE("bounds: ordering, sandwich and decay along the ladder") {
  double prev_gap = INFINITY;
  for (const PrintedRow& p : kTable) {
    const BoundsRow r = bounds_row(p.s, 1.0);
    CHECK(r.lower <= r.exact);
    CHECK(r.exact <= r.upper);
    CHECK(r.upper - r.lower < prev_gap);
    prev_gap = r.upper - r.lower;
    CHECK(std::fabs(r.refined - r.exact) < std::fabs(g(1.0) - r.exact));
  }
  CHECK(std::fabs(bounds_row(10).alpha - 0.946) < 5e-4);
  CHECK(std::fabs(bounds_row(20).alpha - 0.962) < 5e-4);
}

TEST_CASE("bounds hold on a random grid") {
  std::mt19937_64 rng(20240917);
  std::uniform_real_distribution<double> lam(1.0, 2000.0);
  std::uniform_real_distribution<double> bet(0.25, 2.0);
  for (int i = 0; i < 2000; ++i) {
    const double lambda = lam(rng);
    const long long s = static_cast<long long>(std::ceil(lambda + bet(rng) * std::sqrt(lambda)));
    const QedBounds b = qed_bounds(s, lambda);
    const double c = erlang_c(s, lambda);
    CAPTURE(lambda);
    CAPTURE(s);
    CHECK(b.lower <= c);
    CHECK(c <= b.upper);
    CHECK(b.gamma_s < b.alpha);
    CHECK(b.alpha < b.beta);
  }
  CHECK_THROWS_AS(qed_bounds(4, 4.0), InstabilityError);
}

TEST_CASE("Halfin-Whitt diffusion stationary law") {
  const HwStationary d = hw_diffusion_stationary(1.0);
  CHECK(std::fabs(d.p_positive() - 0.22336) < 5e-6);
  CHECK(d.tail_above(0.0) == 1.0);
  CHECK(d.cdf_below(0.0) == 1.0);
  CHECK(std::fabs(d.mean_positive_part() - 0.22336) < 5e-6);
  CHECK(d.tail_above(2.0) == Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(d.cdf_below(-1.0) == Approx(normal_cdf(0.0) / normal_cdf(1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(d.tail_above(-0.1), DomainError);
  CHECK_THROWS_AS(d.cdf_below(0.1), DomainError);
  CHECK_THROWS_AS(hw_diffusion_stationary(0.0), DomainError);

  for (double beta : {0.3, 1.0, 2.5}) {
    const HwStationary law(beta);
    // Densities of the two conditional pieces.
    const double above = simpson([&](double x) { return beta * law.tail_above(x); }, 0.0, 60.0 / beta);
    const double below = simpson(
        [&](double x) { return normal_pdf(beta + x) / normal_cdf(beta); }, -beta - 40.0, 0.0);
    CHECK(std::fabs(above - 1.0) < 1e-10);
    CHECK(std::fabs(below - 1.0) < 1e-10);
    CHECK(law.p_positive() + (1.0 - law.p_positive()) == 1.0);
  }
}

TEST_CASE("Garnett limits") {
  const GarnettLimits z = garnett_limits(0.0, 1.0);
  CHECK(z.delay_prob == Approx(0.5).epsilon(1e-14));
  CHECK(z.abandon_coef == Approx(normal_pdf(0.0)).epsilon(1e-13));
  CHECK_THROWS_AS(garnett_limits(1.0, 0.0), DomainError);
  double prev = 0.0;
  for (double b = 0.05; b < 3.0; b += 0.05) {
    const GarnettLimits l = garnett_limits(b, 1.0);
    CHECK(l.delay_prob > 0.0);
    CHECK(l.delay_prob < 1.0);
    const double dev = std::fabs(l.delay_prob - 0.5);
    CHECK(dev > prev);
    prev = dev;
    // theta = mu: the chain is M/M/infinity, so the delay limit is 1 - Phi(beta).
    CHECK(l.delay_prob == Approx(normal_ccdf(b)).epsilon(1e-12));
  }
  for (double b = -2.0; b <= 2.0; b += 0.25) {
    for (double theta : {0.1, 1.0, 5.0}) {
      const GarnettLimits l = garnett_limits(b, theta);
      CHECK(l.delay_prob > 0.0);
      CHECK(l.delay_prob < 1.0);
      CHECK(l.abandon_coef >= 0.0);
    }
  }
  CHECK(normal_hazard(0.0) == Approx(2.0 * normal_pdf(0.0)).epsilon(1e-14));
}

TEST_CASE("finite-buffer limit") {
  CHECK(std::fabs(qed_finite_buffer_delay(0.5, 60.0) - 0.504539) < 1e-6);
  CHECK(qed_finite_buffer_delay(0.5, 1.0) == Approx(0.2860601).epsilon(1e-6));
  for (double b : {0.1, 0.5, 1.0, 2.0}) {
    for (double gm : {0.1, 1.0, 3.0}) CHECK(qed_finite_buffer_delay(b, gm) < g(b));
  }
  CHECK_THROWS_AS(qed_finite_buffer_delay(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(qed_finite_buffer_delay(1.0, 0.0), DomainError);
  CHECK_THROWS_AS((QedPoint{1.0, -1.0, std::nullopt}.validate()), DomainError);
}

TEST_CASE("scaled server counts") {
  CHECK(scaled_servers(100.0, 0.5, ScalingRule::QED) == 105);
  CHECK(scaled_servers(100.0, 0.5, ScalingRule::ED) == 101);
  CHECK(scaled_servers(100.0, 0.5, ScalingRule::QD) == 150);
  CHECK(scaled_servers(100.0, 0.2, ScalingRule::ED) == 101);
  CHECK(scaled_servers(0.3, 0.1, ScalingRule::QED) == 1);
  for (double lambda = 0.5; lambda < 500.0; lambda *= 1.3) {
    for (ScalingRule r : {ScalingRule::ED, ScalingRule::QED, ScalingRule::QD}) {
      CHECK(static_cast<double>(scaled_servers(lambda, 0.3, r)) > lambda);
    }
  }
}
