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

#include "kgcert/certify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "kgcert/stats.hpp"

namespace kgcert {

void CertConfig::validate() const {
  if (n0 < 1) throw ConfigError("n0 must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw ConfigError("confidence must lie in (0, 1)");
  }
  if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

bool smoothed_trial(const EmbeddingModel& model, const Query& query,
                    const FilterIndex& filter, double sigma, Rng& rng) {
  std::vector<double> head(model.entity_cols());
  rng.fill_normal(head, sigma);
  const auto original = model.entity(query.head);
  for (size_t i = 0; i < head.size(); ++i) head[i] += original[i];

  std::vector<double> scores = score_all_tails(model, head, query.relation);
  for (EntityId known : filter.tails(query.head, query.relation)) {
    if (known != query.target) {
      scores[known] = -std::numeric_limits<double>::infinity();
    }
  }
  // Deterministic argmax: lowest index wins ties.
  EntityId best = 0;
  for (int64_t i = 1; i < model.num_entities; ++i) {
    if (scores[i] > scores[best]) best = static_cast<EntityId>(i);
  }
  return best == query.target;
}

CertificationRecord certify_query(const EmbeddingModel& model, const Query& query,
                                  const FilterIndex& filter, const CertConfig& config,
                                  int64_t query_id) {
  config.validate();
  CertificationRecord record;
  record.query = query;
  record.query_id = query_id;
  const uint64_t cert_seed =
      mix64(config.seed + static_cast<uint64_t>(RngPurpose::kCertification));
  for (int32_t trial = 0; trial < config.n0; ++trial) {
    Rng rng = Rng::stream(cert_seed, static_cast<uint64_t>(query_id),
                          static_cast<uint64_t>(trial));
    if (smoothed_trial(model, query, filter, config.sigma, rng)) ++record.count;
  }
  record.p_lower = clopper_pearson_lcb(config.n0, record.count, config.confidence);
  record.certified = record.p_lower > 0.5;
  record.cr = record.certified ? config.sigma * phi_inverse(record.p_lower) : 0.0;
  return record;
}

std::vector<CertificationRecord> certify_queries(const EmbeddingModel& model,
                                                 std::span<const Query> queries,
                                                 const FilterIndex& filter,
                                                 const CertConfig& config) {
  config.validate();
  std::vector<CertificationRecord> records(queries.size());
  const int32_t threads =
      std::min<int32_t>(config.threads, static_cast<int32_t>(queries.size()));
  if (threads <= 1) {
    for (size_t i = 0; i < queries.size(); ++i) {
      records[i] = certify_query(model, queries[i], filter, config,
                                 static_cast<int64_t>(i));
    }
    return records;
  }

  // Queries are independent and each one derives its own RNG substreams, so
  // the merged result does not depend on scheduling.
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next.fetch_add(1); i < queries.size(); i = next.fetch_add(1)) {
      records[i] = certify_query(model, queries[i], filter, config,
                                 static_cast<int64_t>(i));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int32_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& thread : pool) thread.join();
  return records;
}

RobustnessReport aggregate_report(std::span<const CertificationRecord> records,
                                  double sigma, std::span<const double> radii) {
  if (records.empty()) throw Error("aggregate_report: no certification records");

  RobustnessReport report;
  report.sigma = sigma;
  report.num_queries = static_cast<int64_t>(records.size());
  const double n = static_cast<double>(records.size());

  int64_t certified_at_zero = 0;
  for (const auto& record : records) {
    report.acr += record.cr;
    if (sigma > 0.0) report.acr_over_sigma += record.cr / sigma;
    if (record.cr > 0.0) ++certified_at_zero;
  }
  report.acr /= n;
  report.acr_over_sigma /= n;
  report.ca0 = static_cast<double>(certified_at_zero) / n;

  report.ca_curve.reserve(radii.size());
  for (double radius : radii) {
    int64_t covered = 0;
    for (const auto& record : records) {
      if (record.cr > radius) ++covered;
    }
    report.ca_curve.emplace_back(radius, static_cast<double>(covered) / n);
  }
  return report;
}

RobustnessReport robustness_report(const EmbeddingModel& model,
                                   std::span<const Query> queries,
                                   const FilterIndex& filter, const CertConfig& config,
                                   std::span<const double> radii,
                                   std::vector<CertificationRecord>* records_out) {
  auto records = certify_queries(model, queries, filter, config);
  RobustnessReport report = aggregate_report(records, config.sigma, radii);
  if (records_out) *records_out = std::move(records);
  return report;
}

}  // namespace kgcert
