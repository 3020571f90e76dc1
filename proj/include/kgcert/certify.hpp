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

#ifndef KGCERT_CERTIFY_HPP_
#define KGCERT_CERTIFY_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "kgcert/kg.hpp"
#include "kgcert/models.hpp"
#include "kgcert/rng.hpp"

namespace kgcert {

struct CertConfig {
  int32_t n0 = 1000;          // noisy trials per query
  double confidence = 0.999;  // one-sided confidence level C
  double sigma = 0.0;         // certification noise std (the sigma quantile)
  uint64_t seed = 0;
  int32_t threads = 1;        // parallelism; never affects the results

  void validate() const;
};

// Outcome of certifying one query. cr = sigma * phi_inverse(p_lower) when the
// lower bound clears 1/2, otherwise 0 (abstention).
struct CertificationRecord {
  Query query;
  int64_t query_id = 0;
  int32_t count = 0;    // successes out of n0
  double p_lower = 0.0; // Clopper-Pearson lower bound
  double cr = 0.0;      // certified radius
  bool certified = false;
};

struct RobustnessReport {
  double acr = 0.0;             // mean certified radius
  double acr_over_sigma = 0.0;  // mean of per-query cr / sigma
  std::vector<std::pair<double, double>> ca_curve;  // (radius, certified accuracy)
  double ca0 = 0.0;             // certified accuracy at radius 0
  int64_t num_queries = 0;
  double sigma = 0.0;
};

// One noisy trial: perturbs the query's head embedding with N(0, sigma^2)
// noise and reports whether the filtered top-1 prediction hits the gold
// target. Known true tails other than the gold one are masked out first.
bool smoothed_trial(const EmbeddingModel& model, const Query& query,
                    const FilterIndex& filter, double sigma, Rng& rng);

// Runs n0 trials with per-trial substreams keyed by (seed, query_id, trial),
// then turns the success count into a confidence-bounded certified radius.
CertificationRecord certify_query(const EmbeddingModel& model, const Query& query,
                                  const FilterIndex& filter, const CertConfig& config,
                                  int64_t query_id);

// Certifies every query, optionally in parallel. Output is identical for any
// thread count.
std::vector<CertificationRecord> certify_queries(const EmbeddingModel& model,
                                                 std::span<const Query> queries,
                                                 const FilterIndex& filter,
                                                 const CertConfig& config);

// Aggregates records into ACR, ACR/sigma and the CA curve. CA(R) counts
// records with cr strictly greater than R.
RobustnessReport aggregate_report(std::span<const CertificationRecord> records,
                                  double sigma, std::span<const double> radii);

// Convenience wrapper: certify + aggregate.
RobustnessReport robustness_report(const EmbeddingModel& model,
                                   std::span<const Query> queries,
                                   const FilterIndex& filter, const CertConfig& config,
                                   std::span<const double> radii,
                                   std::vector<CertificationRecord>* records = nullptr);

}  // namespace kgcert

#endif  // KGCERT_CERTIFY_HPP_
