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

#include "kgcert/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_set>

#include "kgcert/rng.hpp"
#include "kgcert/train.hpp"

namespace kgcert {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Mean-rank tie convention: rank = mean of best and worst tied position.
RankResult rank_of_target(std::span<const double> scores, EntityId target) {
  const double target_score = scores[target];
  int64_t better = 0;
  int64_t tied = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (static_cast<EntityId>(i) == target) continue;
    if (scores[i] > target_score) {
      ++better;
    } else if (scores[i] == target_score) {
      ++tied;
    }
  }
  RankResult result;
  result.fractional = static_cast<double>(better) + 1.0 + static_cast<double>(tied) / 2.0;
  result.rank = better + 1 + (tied + 1) / 2;  // fractional rounded half-up
  return result;
}

void mask_known_tails(std::span<double> scores, std::span<const EntityId> known,
                      EntityId keep) {
  for (EntityId tail : known) {
    if (tail != keep) scores[tail] = kNegInf;
  }
}

struct MetricAccumulator {
  double mrr = 0.0;
  double mr = 0.0;
  int64_t hits1 = 0, hits3 = 0, hits10 = 0;
  int64_t n = 0;

  void add(const RankResult& r) {
    mrr += 1.0 / r.fractional;
    mr += static_cast<double>(r.rank);
    hits1 += r.rank <= 1;
    hits3 += r.rank <= 3;
    hits10 += r.rank <= 10;
    ++n;
  }

  RankingMetrics finish(const EvalCondition& condition) const {
    if (n == 0) throw Error("ranking metrics over an empty query set");
    RankingMetrics m;
    const double dn = static_cast<double>(n);
    m.mrr = mrr / dn;
    m.mr = mr / dn;
    m.hits1 = static_cast<double>(hits1) / dn;
    m.hits3 = static_cast<double>(hits3) / dn;
    m.hits10 = static_cast<double>(hits10) / dn;
    m.num_queries = n;
    m.condition = condition.label();
    m.alpha = condition.alpha;
    m.seed = condition.seed;
    return m;
  }
};

// Entity table with one alpha-scaled Gaussian draw added to every row.
EmbeddingModel perturbed_copy(const EmbeddingModel& model, const EvalCondition& cond) {
  EmbeddingModel copy = model;
  const double sigma = sigma_quantile(model.entity_table);
  Rng rng = purpose_stream(cond.seed, RngPurpose::kEvalNoise);
  std::vector<double> noise(model.entity_cols());
  for (int64_t e = 0; e < model.num_entities; ++e) {
    rng.fill_normal(noise, sigma);
    auto row = copy.entity_mut(e);
    for (size_t i = 0; i < noise.size(); ++i) row[i] += cond.alpha * noise[i];
  }
  return copy;
}

}  // namespace

std::string EvalCondition::label() const {
  if (is_clean()) return "clean";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "perturbed(alpha=%g,seed=%llu)", alpha,
                static_cast<unsigned long long>(seed));
  return buf;
}

RankResult filtered_rank_result(const EmbeddingModel& model, const Query& query,
                                const FilterIndex& filter,
                                std::optional<std::span<const double>> head_override) {
  const std::span<const double> head =
      head_override ? *head_override : model.entity(query.head);
  std::vector<double> scores = score_all_tails(model, head, query.relation);
  mask_known_tails(scores, filter.tails(query.head, query.relation), query.target);
  return rank_of_target(scores, query.target);
}

int64_t filtered_rank(const EmbeddingModel& model, const Query& query,
                      const FilterIndex& filter,
                      std::optional<std::span<const double>> head_override) {
  return filtered_rank_result(model, query, filter, head_override).rank;
}

RankingMetrics link_prediction(const EmbeddingModel& model,
                               std::span<const Query> queries,
                               const FilterIndex& filter,
                               const EvalCondition& condition) {
  if (queries.empty()) throw Error("link_prediction: empty query set");
  const EmbeddingModel* eval_model = &model;
  EmbeddingModel storage;
  if (!condition.is_clean()) {
    storage = perturbed_copy(model, condition);
    eval_model = &storage;
  }
  MetricAccumulator acc;
  for (const Query& query : queries) {
    acc.add(filtered_rank_result(*eval_model, query, filter));
  }
  return acc.finish(condition);
}

std::vector<PathQuery> enumerate_path_queries(const KnowledgeGraph& kg, Split split,
                                              int32_t hops, int64_t cap, uint64_t seed) {
  if (hops < 1 || hops > 3) throw ConfigError("path queries support 1-3 hops");
  if (cap <= 0) return {};
  const auto& split_triples = kg.triples(split);
  if (split_triples.empty()) return {};

  // Adjacency over the full graph (all splits), forward and backward.
  std::vector<std::vector<std::pair<RelationId, EntityId>>> out_edges(kg.num_entities());
  std::vector<std::vector<std::pair<RelationId, EntityId>>> in_edges(kg.num_entities());
  for (Split s : kAllSplits) {
    for (const Triple& triple : kg.triples(s)) {
      out_edges[triple.head].emplace_back(triple.relation, triple.tail);
      in_edges[triple.tail].emplace_back(triple.relation, triple.head);
    }
  }

  Rng rng = purpose_stream(seed, RngPurpose::kQuerySampling, static_cast<uint64_t>(hops));
  std::vector<PathQuery> queries;
  std::set<std::pair<EntityId, std::vector<RelationId>>> seen;
  const int64_t max_attempts = cap * 50 + 100;

  for (int64_t attempt = 0;
       attempt < max_attempts && static_cast<int64_t>(queries.size()) < cap;
       ++attempt) {
    // Seed the path with an edge from the target split, then extend backward
    // through the full graph.
    const Triple& last = split_triples[rng.below(split_triples.size())];
    std::vector<RelationId> relations{last.relation};
    EntityId anchor = last.head;
    bool dead_end = false;
    for (int32_t hop = 1; hop < hops; ++hop) {
      const auto& incoming = in_edges[anchor];
      if (incoming.empty()) {
        dead_end = true;
        break;
      }
      const auto& [relation, head] = incoming[rng.below(incoming.size())];
      relations.insert(relations.begin(), relation);
      anchor = head;
    }
    if (dead_end) continue;
    if (!seen.emplace(anchor, relations).second) continue;

    // Answers: all entities reachable from the anchor via the relation chain.
    std::unordered_set<EntityId> frontier{anchor};
    for (RelationId relation : relations) {
      std::unordered_set<EntityId> next;
      for (EntityId entity : frontier) {
        for (const auto& [r, tail] : out_edges[entity]) {
          if (r == relation) next.insert(tail);
        }
      }
      frontier = std::move(next);
    }
    if (frontier.empty()) continue;

    PathQuery query;
    query.anchor = anchor;
    query.relations = std::move(relations);
    query.answers.assign(frontier.begin(), frontier.end());
    std::sort(query.answers.begin(), query.answers.end());
    queries.push_back(std::move(query));
  }
  return queries;
}

PathScores answer_path_query(const EmbeddingModel& model, const PathQuery& query,
                             int32_t beam) {
  if (beam < 1) throw ConfigError("beam must be >= 1");
  if (query.relations.empty()) throw Error("path query with no relations");

  std::vector<double> scores =
      score_all_tails(model, model.entity(query.anchor), query.relations[0]);

  for (size_t hop = 1; hop < query.relations.size(); ++hop) {
    // Keep the best `beam` intermediates (score desc, index asc).
    std::vector<EntityId> order(model.num_entities);
    std::iota(order.begin(), order.end(), 0);
    const size_t keep = std::min<size_t>(beam, order.size());
    std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                      [&](EntityId a, EntityId b) {
                        if (scores[a] != scores[b]) return scores[a] > scores[b];
                        return a < b;
                      });

    std::vector<double> next(model.num_entities, kNegInf);
    std::vector<double> hop_scores(model.num_entities);
    for (size_t i = 0; i < keep; ++i) {
      const EntityId intermediate = order[i];
      const double path_score = scores[intermediate];
      score_all_tails(model, model.entity(intermediate), query.relations[hop],
                      hop_scores);
      for (int64_t tail = 0; tail < model.num_entities; ++tail) {
        next[tail] = std::max(next[tail], path_score + hop_scores[tail]);
      }
    }
    scores = std::move(next);
  }

  PathScores result;
  result.ranking.resize(model.num_entities);
  std::iota(result.ranking.begin(), result.ranking.end(), 0);
  std::sort(result.ranking.begin(), result.ranking.end(),
            [&](EntityId a, EntityId b) {
              if (scores[a] != scores[b]) return scores[a] > scores[b];
              return a < b;
            });
  result.final_scores = std::move(scores);
  return result;
}

std::map<int32_t, RankingMetrics> multihop_metrics(const EmbeddingModel& model,
                                                   std::span<const PathQuery> queries,
                                                   int32_t beam) {
  if (queries.empty()) throw Error("multihop_metrics: empty query set");
  std::map<int32_t, MetricAccumulator> accumulators;
  for (const PathQuery& query : queries) {
    const PathScores scored = answer_path_query(model, query, beam);
    std::vector<double> masked = scored.final_scores;
    for (EntityId answer : query.answers) masked[answer] = kNegInf;
    // Each answer is ranked with the other answers filtered out.
    for (EntityId answer : query.answers) {
      masked[answer] = scored.final_scores[answer];
      accumulators[query.hops()].add(rank_of_target(masked, answer));
      masked[answer] = kNegInf;
    }
  }
  std::map<int32_t, RankingMetrics> metrics;
  for (const auto& [hops, acc] : accumulators) {
    metrics.emplace(hops, acc.finish(EvalCondition{}));
  }
  return metrics;
}

}  // namespace kgcert
