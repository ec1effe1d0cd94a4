#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles/poisson.hpp"
#include "oracles/queues.hpp"
#include "qed/errors.hpp"
#include "qed/exact_queues.hpp"
#include "qed/qed_asymptotics.hpp"
#include "qed/specfun.hpp"

using namespace qed;
using doctest::Approx;

namespace {

double lambda_on_ladder(long long s) {
  const double r = (-1.0 + std::sqrt(1.0 + 4.0 * static_cast<double>(s))) / 2.0;
  return r * r;
}

QueueModel mms(double lambda, long long s) { return {lambda, 1.0, s, NoExtension{}}; }
QueueModel mmsn(double lambda, long long s, long long n) { return {lambda, 1.0, s, FiniteBuffer{n}}; }
QueueModel mmsm(double lambda, long long s, double theta) { return {lambda, 1.0, s, Abandonment{theta}}; }

double total(const StationaryMeasures& m) {
  return std::accumulate(m.pi.begin(), m.pi.end(), 0.0) + m.tail_mass;
}

}  // namespace

TEST_CASE("Erlang B examples") {
  CHECK(erlang_b(1, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(erlang_b(2, 1.0) == Approx(0.2).epsilon(1e-15));
  const double lambda = 10'000.0;
  const long long s = static_cast<long long>(std::floor(lambda + std::sqrt(lambda) + 0.5));
  CHECK(std::fabs(std::sqrt(lambda) * erlang_b(s, lambda) - 0.28760) < 5e-3);
}

TEST_CASE("Erlang B and C agree with direct summation") {
  for (double a : {0.3, 1.0, 4.7, 25.0, 80.0}) {
    for (long long s = 1; s <= 150; ++s) {
      CHECK(erlang_b(s, a) == Approx(oracle::erlang_b(s, a)).epsilon(1e-12));
      if (static_cast<double>(s) > a) CHECK(erlang_c(s, a) == Approx(oracle::erlang_c(s, a)).epsilon(1e-11));
    }
  }
}

TEST_CASE("Erlang C examples") {
  CHECK(erlang_c(1, 0.6) == Approx(0.6).epsilon(1e-14));
  CHECK(std::fabs(erlang_c(4, 3.2) - 0.596432) < 5e-7);
  CHECK(std::fabs(erlang_c(10, 7.29844) - 0.27030) < 5e-6);
  CHECK_THROWS_AS(erlang_c(4, 4.0), InstabilityError);
  CHECK_THROWS_AS(erlang_c(4, 5.0), InstabilityError);
  CHECK_THROWS_AS(erlang_b(0, 1.0), DomainError);
  CHECK_THROWS_AS(erlang_b(1, 0.0), DomainError);
}

TEST_CASE("Erlang C matches the Erlang B identity") {
  for (double a : {0.5, 3.3, 17.0, 120.5}) {
    for (long long s = 1; s <= 200; ++s) {
      if (static_cast<double>(s) <= a) continue;
      const double rho = a / static_cast<double>(s);
      CHECK(std::fabs(erlang_c(s, a) - 1.0 / (rho + (1.0 - rho) / erlang_b(s, a))) < 1e-12);
    }
  }
}

TEST_CASE("Erlang B and C are monotone") {
  for (double a : {0.7, 9.0, 55.0}) {
    double prev_b = 2.0;
    double prev_c = 2.0;
    for (long long s = 1; s <= 150; ++s) {
      const double b = erlang_b(s, a);
      CHECK(b < prev_b);
      prev_b = b;
      if (static_cast<double>(s) > a) {
        const double c = erlang_c(s, a);
        CHECK(c < prev_c);
        CHECK(c >= b);
        prev_c = c;
      }
    }
  }
  for (long long s : {1LL, 5LL, 40LL}) {
    double prev = 0.0;
    for (double a = 0.05; a < static_cast<double>(s); a += 0.05 * static_cast<double>(s)) {
      const double c = erlang_c(s, a);
      CHECK(c > prev);
      prev = c;
    }
  }
}

TEST_CASE("real-argument Erlang C") {
  CHECK(std::fabs(erlang_c_real(4.0, 3.2) - 0.596432) < 1e-6);
  CHECK(std::fabs(erlang_c_real(2.0, 1.0) - 1.0 / 3.0) < 1e-9);
  const double mid = erlang_c_real(10.5, 7.29844);
  CHECK(mid < erlang_c(10, 7.29844));
  CHECK(mid > erlang_c(11, 7.29844));
  for (double a : {0.4, 2.5, 30.0, 400.0}) {
    for (long long s = static_cast<long long>(a) + 1; s < static_cast<long long>(a) + 30; ++s) {
      CHECK(std::fabs(erlang_c_real(static_cast<double>(s), a) - erlang_c(s, a)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(erlang_c_real(3.0, 3.0), InstabilityError);
}

TEST_CASE("M/M/s measures") {
  const StationaryMeasures m1 = mms_measures(mms(0.6, 1));
  CHECK(m1.mean_delay == Approx(1.5).epsilon(1e-12));
  CHECK(m1.delay_prob == Approx(0.6).epsilon(1e-12));

  const StationaryMeasures m10 = mms_measures(mms(9.5, 10));
  CHECK(std::fabs(m10.mean_delay - 1.65117) < 5e-6);
  CHECK(std::fabs(m10.delay_prob - 0.825586) < 5e-7);

  const StationaryMeasures g = mms_measures(mms(0.5, 1));
  for (std::size_t k = 0; k < std::min<std::size_t>(g.pi.size(), 40); ++k) {
    CHECK(g.pi[k] == Approx(0.5 * std::pow(0.5, static_cast<double>(k))).epsilon(1e-12));
  }
  CHECK(std::fabs(total(g) - 1.0) < 1e-10);
  CHECK_THROWS_AS(mms_measures(mms(3.0, 3)), InstabilityError);
}

TEST_CASE("M/M/s measures: Little's law and the law itself") {
  for (double a : {0.9, 7.29844, 48.0, 950.0}) {
    for (long long s : {static_cast<long long>(a) + 1, static_cast<long long>(a * 1.1) + 2}) {
      const StationaryMeasures m = mms_measures(mms(a, s));
      CHECK(std::fabs(m.mean_queue - a * m.mean_delay) < 1e-9 * std::fmax(1.0, m.mean_queue));
      CHECK(std::fabs(total(m) - 1.0) < 1e-10);
      CHECK(m.utilization == Approx(a / static_cast<double>(s)).epsilon(1e-14));
      const oracle::Law law = oracle::mmsn_law(a, s, static_cast<long long>(m.pi.size()) + 4000);
      for (std::size_t k = 0; k < std::min<std::size_t>(m.pi.size(), 300); ++k) {
        CHECK(std::fabs(m.pi[k] - static_cast<double>(law.pi[k])) < 1e-11);
      }
    }
  }
}

TEST_CASE("birth-death solver examples") {
  const BirthDeathSolution inf = solve_birth_death([](std::size_t) { return 1.0; },
                                                   [](std::size_t k) { return static_cast<double>(k); });
  const auto pois = oracle::poisson_pmf_table(1.0, 30);
  for (std::size_t k = 0; k < std::min<std::size_t>(inf.pi.size(), 30); ++k) {
    CHECK(std::fabs(inf.pi[k] - static_cast<double>(pois[k])) < 1e-13);
  }
  CHECK(inf.tail_mass < 1e-12);

  const BirthDeathSolution two = solve_birth_death(
      [](std::size_t) { return 1.0; }, [](std::size_t k) { return std::fmin(static_cast<double>(k), 1.0); }, {},
      std::size_t{1});
  REQUIRE(two.pi.size() == 2);
  CHECK(two.pi[1] == Approx(erlang_b(1, 1.0)).epsilon(1e-14));

  const BirthDeathSolution coll = solve_birth_death(
      [](std::size_t) { return 1.0; },
      [](std::size_t k) {
        const double kd = static_cast<double>(k);
        return std::fmin(kd, 2.0) + std::fmax(kd - 2.0, 0.0);
      });
  for (std::size_t k = 0; k < std::min<std::size_t>(coll.pi.size(), 30); ++k) {
    CHECK(std::fabs(coll.pi[k] - static_cast<double>(pois[k])) < 1e-13);
  }
}

TEST_CASE("birth-death solver detects a divergent normalization") {
  CHECK_THROWS_AS(solve_birth_death([](std::size_t) { return 2.0; }, [](std::size_t) { return 1.0; }, {},
                                    std::nullopt, 10'000),
                  InstabilityError);
}

TEST_CASE("finite buffer: loss model and truncation limit") {
  const StationaryMeasures loss = mmsn_measures(mmsn(1.0, 1, 1));
  REQUIRE(loss.block_prob.has_value());
  CHECK(*loss.block_prob == Approx(0.5).epsilon(1e-14));
  for (double a : {0.5, 4.0, 30.0}) {
    for (long long s : {1LL, 5LL, 33LL}) {
      const StationaryMeasures m = mmsn_measures(mmsn(a, s, s));
      CHECK(std::fabs(*m.block_prob - erlang_b(s, a)) < 1e-12);
      CHECK(m.delay_prob == 0.0);
    }
  }
  for (double a : {0.5, 7.0, 90.0}) {
    const long long s = static_cast<long long>(a * 1.15) + 1;
    const long long n = s + static_cast<long long>(std::ceil(40.0 * std::sqrt(static_cast<double>(s))));
    const StationaryMeasures fin = mmsn_measures(mmsn(a, s, n));
    const StationaryMeasures inf = mms_measures(mms(a, s));
    CHECK(std::fabs(fin.delay_prob - inf.delay_prob) < 1e-8);
    CHECK(std::fabs(fin.mean_queue - inf.mean_queue) < 1e-8);
    CHECK(*fin.block_prob < 1e-8);
  }
  CHECK_THROWS_AS(mmsn_measures(mmsn(1.0, 3, 2)), DomainError);
  // Overloaded systems are still stable with a finite buffer.
  CHECK_NOTHROW(mmsn_measures(mmsn(5.0, 2, 6)));
}

TEST_CASE("finite buffer against direct law") {
  const double a = 10.0;
  const long long s = 12;
  const long long n = 16;
  const StationaryMeasures m = mmsn_measures(mmsn(a, s, n));
  const oracle::Law law = oracle::mmsn_law(a, s, n);
  long double wait = 0.0L;
  for (long long k = s; k < n; ++k) wait += law.pi[k];
  CHECK(*m.block_prob == Approx(static_cast<double>(law.pi[n])).epsilon(1e-12));
  CHECK(m.delay_prob == Approx(static_cast<double>(wait / (1.0L - law.pi[n]))).epsilon(1e-12));
  CHECK(std::fabs(total(m) - 1.0) < 1e-10);
}

TEST_CASE("finite buffer in the two-fold scaling") {
  const double lambda = 10'000.0;
  const double beta = 0.5;
  const double gamma = 1.0;
  const long long s = static_cast<long long>(std::floor(lambda + beta * std::sqrt(lambda) + 0.5));
  const long long n = s + static_cast<long long>(std::floor(gamma * std::sqrt(static_cast<double>(s)) + 0.5));
  CHECK(std::fabs(mmsn_measures(mmsn(lambda, s, n)).delay_prob - 0.28607) < 5e-3);
}

TEST_CASE("Erlang-A reductions") {
  const StationaryMeasures m = erlang_a_measures(mmsm(1.0, 2, 1.0));
  CHECK(m.delay_prob == Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));
  REQUIRE(m.abandon_prob.has_value());
  // theta * E[(Pois(1) - 2)^+] / lambda by direct summation.
  CHECK(*m.abandon_prob == Approx(oracle::plus_mean(1.0, 2)).epsilon(1e-10));
  CHECK(*m.abandon_prob == Approx(0.103638).epsilon(1e-5));

  for (double a : {0.7, 8.0, 60.0}) {
    const long long s = static_cast<long long>(a * 1.2) + 1;
    const StationaryMeasures lim = erlang_a_measures(mmsm(a, s, 1e-12));
    const StationaryMeasures ref = mms_measures(mms(a, s));
    CHECK(std::fabs(lim.delay_prob - ref.delay_prob) < 1e-8);
    CHECK(std::fabs(lim.mean_queue - ref.mean_queue) < 1e-8 * std::fmax(1.0, ref.mean_queue));
  }
  CHECK_THROWS_AS(erlang_a_measures(mmsm(3.0, 3, 0.0)), InstabilityError);
  CHECK_NOTHROW(erlang_a_measures(mmsm(50.0, 10, 0.5)));
}

TEST_CASE("Erlang-A against direct law, Little's law") {
  for (double theta : {0.1, 0.5, 2.0}) {
    for (double a : {5.0, 40.0}) {
      const long long s = static_cast<long long>(a);
      const StationaryMeasures m = erlang_a_measures(mmsm(a, s, theta));
      const oracle::Law law = oracle::erlang_a_law(a, s, theta, s + 3000);
      long double delayed = 0.0L;
      long double queue = 0.0L;
      for (long long k = s; k < static_cast<long long>(law.pi.size()); ++k) {
        delayed += law.pi[k];
        queue += static_cast<long double>(k - s) * law.pi[k];
      }
      CHECK(m.delay_prob == Approx(static_cast<double>(delayed)).epsilon(1e-10));
      CHECK(m.mean_queue == Approx(static_cast<double>(queue)).epsilon(1e-10));
      CHECK(*m.abandon_prob == Approx(theta * static_cast<double>(queue) / a).epsilon(1e-10));
      CHECK(std::fabs(m.mean_queue - a * m.mean_delay) < 1e-9 * std::fmax(1.0, m.mean_queue));
      CHECK(std::fabs(total(m) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("D'Auria lower bound by the limit g") {
  for (double lambda = 0.25; lambda <= 5000.0; lambda *= 1.9) {
    for (double beta = 0.1; beta <= 3.0; beta += 0.2) {
      const double s_real = lambda + beta * std::sqrt(lambda);
      const long long s = static_cast<long long>(std::ceil(s_real));
      const double b = (static_cast<double>(s) - lambda) / std::sqrt(lambda);
      CHECK(erlang_c(s, lambda) >= g(b));
    }
  }
}

TEST_CASE("dispatch and ladder reproduction") {
  CHECK(stationary_measures(mms(0.6, 1)).delay_prob == Approx(0.6));
  CHECK(stationary_measures(mmsn(1.0, 1, 1)).block_prob.has_value());
  CHECK(stationary_measures(mmsm(1.0, 2, 1.0)).abandon_prob.has_value());
  CHECK(std::fabs(erlang_c(10, lambda_on_ladder(10)) - 0.27030) < 5e-6);
  CHECK(std::fabs(erlang_c(100, lambda_on_ladder(100)) - 0.23769) < 5e-6);
}
