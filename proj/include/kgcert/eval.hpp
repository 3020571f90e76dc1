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

#ifndef KGCERT_EVAL_HPP_
#define KGCERT_EVAL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgcert/kg.hpp"
#include "kgcert/models.hpp"

namespace kgcert {

// Clean evaluation, or evaluation with every entity embedding perturbed by
// alpha-scaled Gaussian noise (one draw per entity per run).
struct EvalCondition {
  double alpha = 0.0;
  uint64_t seed = 0;

  bool is_clean() const { return alpha == 0.0; }
  std::string label() const;
};

struct RankingMetrics {
  double mrr = 0.0;
  double mr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  int64_t num_queries = 0;
  std::string condition;
  double alpha = 0.0;
  uint64_t seed = 0;
};

// Rank of the gold target with other known-true tails masked out. Ties take
// the mean of the best and worst tied positions: `fractional` carries the
// exact value (used by MRR), `rank` rounds half-up (used by MR and Hits@k).
struct RankResult {
  double fractional = 0.0;
  int64_t rank = 0;
};

RankResult filtered_rank_result(const EmbeddingModel& model, const Query& query,
                                const FilterIndex& filter,
                                std::optional<std::span<const double>> head_override =
                                    std::nullopt);

int64_t filtered_rank(const EmbeddingModel& model, const Query& query,
                      const FilterIndex& filter,
                      std::optional<std::span<const double>> head_override =
                          std::nullopt);

RankingMetrics link_prediction(const EmbeddingModel& model,
                               std::span<const Query> queries,
                               const FilterIndex& filter,
                               const EvalCondition& condition);

// A projection query: follow 1-3 relations from the anchor; answers are all
// entities reachable by that relation sequence over train + valid + test.
struct PathQuery {
  EntityId anchor = 0;
  std::vector<RelationId> relations;
  std::vector<EntityId> answers;  // sorted

  int32_t hops() const { return static_cast<int32_t>(relations.size()); }
};

// Samples up to `cap` distinct path queries whose final edge lies in the
// given split. Deterministic per seed.
std::vector<PathQuery> enumerate_path_queries(const KnowledgeGraph& kg, Split split,
                                              int32_t hops, int64_t cap, uint64_t seed);

// Beam search over relation compositions: keeps the top `beam` intermediates
// per hop, accumulating the sum of per-hop scores, and scores each final
// entity by the best path reaching it. With beam >= |E| this is exact
// max-sum dynamic programming.
struct PathScores {
  std::vector<double> final_scores;   // per entity
  std::vector<EntityId> ranking;      // entities sorted by final score
};

PathScores answer_path_query(const EmbeddingModel& model, const PathQuery& query,
                             int32_t beam);

// Filtered metrics per hop count: each (query, answer) pair is ranked with
// the query's other answers masked out.
std::map<int32_t, RankingMetrics> multihop_metrics(const EmbeddingModel& model,
                                                   std::span<const PathQuery> queries,
                                                   int32_t beam);

}  // namespace kgcert

#endif  // KGCERT_EVAL_HPP_
