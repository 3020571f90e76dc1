/*
 * Copyright 2026 the kgcert authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "kgcert/rng.hpp"
#include "kgcert/stats.hpp"
#include "oracles.hpp"

using namespace kgcert;
namespace oracle = kgcert::testing;

TEST_SUITE_BEGIN("stats");

TEST_CASE("phi_inverse basics") {
  CHECK(phi_inverse(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  // Frozen from the bisection oracle on the series-based CDF.
  CHECK(std::fabs(phi_inverse(0.9) - 1.2815516) < 1e-6);
  CHECK(std::fabs(phi_inverse(0.9) - oracle::phi_inverse_oracle(0.9)) < 1e-9);

  for (double p : {0.001, 0.01, 0.2, 0.77, 0.999}) {
    CHECK(phi_inverse(p) == doctest::Approx(-phi_inverse(1.0 - p)).epsilon(1e-9));
  }

  CHECK_THROWS_AS(phi_inverse(0.0), std::domain_error);
  CHECK_THROWS_AS(phi_inverse(1.0), std::domain_error);
  CHECK_THROWS_AS(phi_inverse(-0.5), std::domain_error);
}

TEST_CASE("phi_inverse inverts the CDF and is strictly increasing") {
  double previous = -1e300;
  for (int i = -50; i <= 50; ++i) {
    const double z = 0.1 * i;  // [-5, 5]
    const double round_trip = phi_inverse(normal_cdf(z));
    CHECK(std::fabs(round_trip - z) < 1e-8);
    CHECK(round_trip > previous);
    previous = round_trip;
  }
}

TEST_CASE("clopper_pearson_lcb closed forms") {
  CHECK(clopper_pearson_lcb(100, 0, 0.999) == 0.0);
  // Single trial, single success: the bound solves p = 1 - C exactly.
  for (double confidence : {0.95, 0.999}) {
    CHECK(clopper_pearson_lcb(1, 1, confidence) ==
          doctest::Approx(1.0 - confidence).epsilon(1e-9));
  }
  CHECK_THROWS_AS(clopper_pearson_lcb(10, 11, 0.9), std::domain_error);
  CHECK_THROWS_AS(clopper_pearson_lcb(10, -1, 0.9), std::domain_error);
}

TEST_CASE("clopper_pearson_lcb matches the binomial tail oracle") {
  CHECK(std::fabs(clopper_pearson_lcb(1000, 990, 0.999) -
                  oracle::clopper_pearson_lcb_oracle(1000, 990, 0.999)) < 1e-8);

  Rng rng(2024);
  for (int i = 0; i < 40; ++i) {
    const auto n = static_cast<int64_t>(1 + rng.below(2000));
    const auto k = static_cast<int64_t>(rng.below(n + 1));
    const double confidence = rng.uniform() < 0.5 ? 0.95 : 0.999;
    const double ours = clopper_pearson_lcb(n, k, confidence);
    const double reference = oracle::clopper_pearson_lcb_oracle(n, k, confidence);
    CAPTURE(n);
    CAPTURE(k);
    CAPTURE(confidence);
    CHECK(std::fabs(ours - reference) < 1e-8);
  }
}

TEST_CASE("clopper_pearson_lcb monotonicity") {
  double previous = -1.0;
  for (int64_t k : {0, 1, 10, 400, 900, 1000}) {
    const double bound = clopper_pearson_lcb(1000, k, 0.999);
    CHECK(bound >= previous);
    CHECK(bound <= static_cast<double>(k) / 1000.0);
    previous = bound;
  }
  // Tighter confidence means a lower bound.
  CHECK(clopper_pearson_lcb(1000, 900, 0.999) < clopper_pearson_lcb(1000, 900, 0.95));
}

TEST_CASE("lcb coverage under simulation") {
  // 2000 simulated binomials at known p; the bound must undershoot p at least
  // a C fraction of the time (the acceptance suite runs the full 10k version).
  const double p = 0.9;
  const int64_t n = 200;
  const double confidence = 0.95;
  Rng rng(7);
  int64_t covered = 0;
  const int sims = 2000;
  for (int s = 0; s < sims; ++s) {
    int64_t successes = 0;
    for (int64_t t = 0; t < n; ++t) successes += rng.uniform() < p;
    covered += clopper_pearson_lcb(n, successes, confidence) <= p;
  }
  CHECK(static_cast<double>(covered) / sims >= confidence - 0.015);
}

TEST_CASE("incomplete beta sanity") {
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
  // I_x(1, 1) = x.
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37));
  // Symmetry I_x(a,b) + I_{1-x}(b,a) = 1.
  CHECK(regularized_incomplete_beta(5.0, 2.0, 0.3) +
            regularized_incomplete_beta(2.0, 5.0, 0.7) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_SUITE_END();
