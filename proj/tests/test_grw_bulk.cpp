#include <doctest.h>

#include <array>
#include <cmath>

#include "oracles/lindley.hpp"
#include "oracles/poisson.hpp"
#include "oracles/zeta.hpp"
#include "qed/errors.hpp"
#include "qed/grw_bulk.hpp"

using namespace qed;
using doctest::Approx;

TEST_CASE("Poisson positive-part examples") {
  CHECK(pois_plus_stats(1.0, 0).plus_mean == Approx(1.0).epsilon(1e-14));
  CHECK(pois_plus_stats(1.0, 1).plus_mean == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(pois_plus_stats(1.0, 1).p_gt == Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(pois_plus_stats(0.0, 1), DomainError);
}

TEST_CASE("Poisson positive parts against brute force") {
  for (double m : {0.5, 2.0, 10.0, 50.0}) {
    for (long long c = 0; c <= 100; ++c) {
      const PoissonPlusStats p = pois_plus_stats(m, c);
      CHECK(std::fabs(p.p_gt - oracle::p_gt(m, c)) < 1e-12);
      CHECK(std::fabs(p.plus_mean - oracle::plus_mean(m, c)) < 1e-12);
    }
  }
}

TEST_CASE("bulk queue examples") {
  const BulkStationary b = bulk_stationary({4.0, 5});
  CHECK(std::fabs(b.p_empty - 0.615565) < 1e-4);
  CHECK(b.mean_queue_over_sqrt_s == Approx(b.mean_queue / std::sqrt(5.0)).epsilon(1e-14));
  CHECK(b.mean_queue_over_sqrt_lambda == Approx(b.mean_queue / 2.0).epsilon(1e-14));
  // The figure value is E[Q]/sqrt(lambda); E[Q]/sqrt(s) is 0.517086.
  CHECK(std::fabs(b.mean_queue_over_sqrt_lambda - 0.57812) < 1e-4);
  CHECK(std::fabs(b.mean_queue_over_sqrt_s - 0.517086) < 1e-6);
  CHECK(b.terms_used > 10);

  const BulkStationary tiny = bulk_stationary({1e-4, 3});
  CHECK(tiny.p_empty > 1.0 - 1e-9);
  CHECK(tiny.mean_queue < 1e-9);

  CHECK_THROWS_AS(bulk_stationary({5.0, 5}), InstabilityError);
  CHECK_THROWS_AS(bulk_stationary({-1.0, 5}), DomainError);
}

TEST_CASE("bulk queue against value iteration of the recursion") {
  struct Case {
    double lambda;
    long long s;
  };
  for (const Case c : std::array<Case, 6>{{{0.5, 1}, {1.0, 2}, {4.0, 5}, {3.0, 6}, {7.5, 9}, {10.0, 12}}}) {
    CAPTURE(c.lambda);
    CAPTURE(c.s);
    const BulkStationary b = bulk_stationary({c.lambda, c.s});
    const oracle::LindleyResult vi = oracle::lindley_value_iteration(c.lambda, c.s);
    CHECK(std::fabs(b.p_empty - vi.p_empty) < 1e-6);
    CHECK(std::fabs(b.mean_queue - vi.mean_queue) < 1e-6);
    CHECK(b.p_empty > 0.0);
    CHECK(b.p_empty <= 1.0);
  }
}

TEST_CASE("GRW constants at reference points") {
  const GrwConstants one = grw_constants(1.0);
  CHECK(std::fabs(one.p_zero - 0.800543) < 1e-5);
  CHECK(std::fabs(one.mean_max - 0.126373) < 1e-5);
  const GrwConstants half = grw_constants(0.5);
  CHECK(std::fabs(half.p_zero - 0.529325) < 1e-5);
  CHECK(std::fabs(half.mean_max - 0.532063) < 1e-5);
  const GrwConstants tenth = grw_constants(0.1);
  CHECK(std::fabs(tenth.p_zero - 0.133419) < 1e-5);
  CHECK(std::fabs(tenth.mean_max - 4.44199) < 1e-5);
  CHECK(one.terms_used > 0);
  CHECK_THROWS_AS(grw_constants(0.0), DomainError);
  CHECK_THROWS_AS(grw_constants(2.0 * std::sqrt(M_PI)), DomainError);
}

TEST_CASE("GRW constants against direct random-walk sums") {
  for (double beta : {0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 3.0}) {
    CAPTURE(beta);
    const GrwConstants z = grw_constants(beta);
    const oracle::GrwDirect d = oracle::grw_direct(beta);
    CHECK(z.p_zero == Approx(d.p_zero).epsilon(1e-8));
    CHECK(z.mean_max == Approx(d.mean_max).epsilon(1e-8));
  }
}

TEST_CASE("GRW mean stays below the Brownian bound") {
  for (double beta = 0.06; beta < 3.0; beta += 0.02) {
    const GrwConstants z = grw_constants(beta);
    CHECK(z.mean_max <= grw_brownian_mean_bound(beta));
    CHECK(z.mean_max > 0.0);
    CHECK(z.p_zero > 0.0);
    CHECK(z.p_zero < 1.0);
  }
}

TEST_CASE("bulk queue approaches the GRW limit along beta = 0.5") {
  const GrwConstants lim = grw_constants(0.5);
  double prev_p = INFINITY;
  double prev_m = INFINITY;
  for (double lambda : {4.0, 16.0, 36.0, 100.0}) {
    const long long s = static_cast<long long>(lambda + 0.5 * std::sqrt(lambda));
    REQUIRE(static_cast<double>(s) == lambda + 0.5 * std::sqrt(lambda));
    const BulkStationary b = bulk_stationary({lambda, s});
    const double dp = std::fabs(b.p_empty - lim.p_zero);
    const double dm = std::fabs(b.mean_queue_over_sqrt_s - lim.mean_max);
    CHECK(dp < prev_p);
    CHECK(dm < prev_m);
    prev_p = dp;
    prev_m = dm;
  }
}

TEST_CASE("many-sources staffing") {
  CHECK(many_sources_staffing(100.0, 20.0, 1.0) == 120.0);
  CHECK(many_sources_staffing(100.0, 10.0, 0.5) == 105.0);
  CHECK(20.0 * grw_constants(0.5).mean_max == Approx(10.6413).epsilon(1e-5));
  CHECK_THROWS_AS(many_sources_staffing(0.0, 1.0, 1.0), DomainError);
}
