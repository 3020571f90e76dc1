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

#include <algorithm>
#include <cmath>

#include "kgcert/eval.hpp"
#include "kgcert/train.hpp"
#include "test_util.hpp"

using namespace kgcert;
using namespace kgcert::testing;

namespace {

// Five entities, one forward relation. Entity scores are steered directly
// through a DistMult model with identity-like relation weights.
struct RankFixture {
  TempDir dir{"eval"};
  KnowledgeGraph kg;
  FilterIndex filter;
  EmbeddingModel model;

  RankFixture() {
    kg = add_reverse_relations(
        graph_from_lines(dir, "a\tr\tb\na\tr\tc\n", "", "a\tr\td\n"));
    filter = build_filter_index(kg);
    // Entities: a=0, b=1, c=2, d=3 (from splits); dim 1 keeps scores scalar.
    model = init_model(ModelFamily::kDistMult, 1, kg.num_entities(),
                       kg.num_relations(), 0, 0.0);
    model.relation_table = {1.0, 1.0};
    model.entity_table = {1.0, 0.0, 0.0, 0.0};
  }

  void set_scores(std::vector<double> values) {
    // score(a, r, t) = e_t with e_a = 1, so table entries are the scores.
    for (size_t i = 0; i < values.size(); ++i) model.entity_table[i] = values[i];
    model.entity_table[0] = 1.0;
  }
};

}  // namespace

TEST_SUITE_BEGIN("eval");

TEST_CASE("filtered_rank basic orderings") {
  RankFixture fx;
  const Query query{0, 0, 3};  // (a, r, ?) -> d, with b and c filtered away

  SUBCASE("strictly best gold gets rank 1") {
    fx.set_scores({0.0, 5.0, 5.0, 9.0});
    CHECK(filtered_rank(fx.model, query, fx.filter) == 1);
  }
  SUBCASE("one unfiltered competitor above gives rank 2") {
    // a itself is not filtered (only known tails of (a, r) are masked) and
    // scores 1, above the gold's 0.5.
    fx.set_scores({1.0, 5.0, 5.0, 0.5});
    CHECK(filtered_rank(fx.model, query, fx.filter) == 2);
  }
  SUBCASE("filtering can only improve the rank") {
    fx.set_scores({-1.0, 5.0, 6.0, 2.0});
    const auto filtered = filtered_rank_result(fx.model, query, fx.filter);
    FilterIndex empty_filter;
    const auto unfiltered = filtered_rank_result(fx.model, query, empty_filter);
    CHECK(filtered.rank <= unfiltered.rank);
    CHECK(filtered.rank == 1);
    CHECK(unfiltered.rank == 3);
  }
  SUBCASE("head_override replaces the head embedding") {
    fx.set_scores({0.0, 5.0, 5.0, 2.0});
    const std::vector<double> flipped{-1.0};
    // Negated head reverses the score order.
    CHECK(filtered_rank(fx.model, query, fx.filter) == 1);
    CHECK(filtered_rank(fx.model, query, fx.filter, std::span<const double>(flipped)) ==
          2);
  }
}

TEST_CASE("full tie over five entities gives the mean rank 3") {
  TempDir dir("evaltie");
  // No filtered competitors: the only known tail for (a, r) is the gold.
  auto kg = add_reverse_relations(
      graph_from_lines(dir, "a\tr\tb\nc\ts\td\ne\ts\td\n"));
  auto filter = build_filter_index(kg);
  auto model = init_model(ModelFamily::kDistMult, 1, kg.num_entities(),
                          kg.num_relations(), 0, 0.0);
  // All-zero tables: every tail ties at score 0.
  const Query query{0, 0, 1};
  REQUIRE(kg.num_entities() == 5);
  const auto result = filtered_rank_result(model, query, filter);
  CHECK(result.fractional == 3.0);
  CHECK(result.rank == 3);
}

TEST_CASE("link_prediction aggregates and perturbation conditions") {
  RankFixture fx;
  fx.set_scores({0.0, 1.0, 2.0, 9.0});
  const auto queries = queries_from_split(fx.kg, Split::kTest);

  SUBCASE("rank-1 everywhere gives all-ones metrics") {
    // Forward query (a, r, ?) -> d and reverse query (d, r_rev, ?) -> a both
    // place their gold first once the reverse relation flips the sign.
    fx.model.entity_table = {0.25, 1.0, 2.0, 9.0};
    fx.model.relation_table = {1.0, -1.0};
    const auto metrics = link_prediction(fx.model, queries, fx.filter, EvalCondition{});
    CHECK(metrics.mrr == 1.0);
    CHECK(metrics.mr == 1.0);
    CHECK(metrics.hits1 == 1.0);
    CHECK(metrics.hits10 == 1.0);
    CHECK(metrics.num_queries == 2);
  }

  SUBCASE("alpha 0 perturbed equals clean") {
    const auto clean = link_prediction(fx.model, queries, fx.filter, EvalCondition{});
    const auto zero = link_prediction(fx.model, queries, fx.filter,
                                      EvalCondition{0.0, 42});
    CHECK(clean.mrr == zero.mrr);
    CHECK(clean.mr == zero.mr);
    CHECK(clean.hits10 == zero.hits10);
    CHECK(zero.condition == "clean");
  }

  SUBCASE("metric invariants hold") {
    const auto metrics = link_prediction(fx.model, queries, fx.filter, EvalCondition{});
    CHECK(metrics.hits1 <= metrics.hits3);
    CHECK(metrics.hits3 <= metrics.hits10);
    CHECK(metrics.mrr > 0.0);
    CHECK(metrics.mrr <= 1.0);
    CHECK(metrics.mr >= 1.0);
    CHECK(metrics.mr <= static_cast<double>(fx.kg.num_entities()));
    CHECK(metrics.mrr >= metrics.hits1);
  }

  SUBCASE("perturbed evaluation is deterministic per seed") {
    const EvalCondition condition{1.5, 7};
    const auto a = link_prediction(fx.model, queries, fx.filter, condition);
    const auto b = link_prediction(fx.model, queries, fx.filter, condition);
    CHECK(a.mrr == b.mrr);
    CHECK(a.mr == b.mr);
    const auto other = link_prediction(fx.model, queries, fx.filter,
                                       EvalCondition{1.5, 8});
    CHECK(a.condition != other.condition);
  }

  CHECK_THROWS_AS(link_prediction(fx.model, {}, fx.filter, EvalCondition{}), Error);
}

TEST_CASE("perturbed metrics degrade as alpha grows on a trained model") {
  TempDir dir("evaldeg");
  const auto files = write_cluster_graph(dir, 40, 4, 220, 5, 5);
  const auto kg = add_reverse_relations(
      load_dataset(files.train, files.valid, files.test));
  const auto filter = build_filter_index(kg);

  TrainConfig config;
  config.family = ModelFamily::kDistMult;
  config.dim = 16;
  config.epochs = 60;
  config.learning_rate = 0.05;
  config.lambda = 0.1;
  config.alpha = 0.5;

  const auto result = train(kg, config);
  const auto queries = queries_from_split(kg, Split::kTest);

  // Two evaluation seeds averaged per condition.
  const auto mean_mrr = [&](double alpha) {
    double total = 0.0;
    for (uint64_t seed : {1ull, 2ull}) {
      total += link_prediction(result.model, queries, filter,
                               EvalCondition{alpha, seed})
                   .mrr;
    }
    return total / 2.0;
  };
  const double clean = link_prediction(result.model, queries, filter, EvalCondition{})
                           .mrr;
  const double mild = mean_mrr(0.5);
  const double heavy = mean_mrr(5.0);
  CHECK(clean > heavy);
  CHECK(mild >= heavy);
}

TEST_CASE("path query enumeration") {
  TempDir dir("evalpath");
  // Chain a -r-> b -s-> c.
  const auto kg = add_reverse_relations(graph_from_lines(dir, "a\tr\tb\nb\ts\tc\n"));

  SUBCASE("cap zero yields nothing") {
    CHECK(enumerate_path_queries(kg, Split::kTrain, 2, 0, 1).empty());
  }

  SUBCASE("hop bounds are validated") {
    CHECK_THROWS_AS(enumerate_path_queries(kg, Split::kTrain, 0, 5, 1), ConfigError);
    CHECK_THROWS_AS(enumerate_path_queries(kg, Split::kTrain, 4, 5, 1), ConfigError);
  }

  SUBCASE("the unique forward 2p path is found with its answer") {
    const auto queries = enumerate_path_queries(kg, Split::kTrain, 2, 200, 1);
    const EntityId a = *kg.entity_id("a");
    const EntityId c = *kg.entity_id("c");
    bool found = false;
    for (const auto& query : queries) {
      if (query.anchor == a && query.relations == std::vector<RelationId>{0, 1}) {
        found = true;
        CHECK(query.answers == std::vector<EntityId>{c});
      }
      CHECK(query.hops() == 2);
      CHECK_FALSE(query.answers.empty());
    }
    CHECK(found);
  }

  SUBCASE("one-hop queries mirror the split's link queries") {
    const auto queries = enumerate_path_queries(kg, Split::kTrain, 1, 200, 1);
    const auto filter = build_filter_index(kg);
    for (const auto& query : queries) {
      REQUIRE(query.relations.size() == 1);
      CHECK(query.answers == filter.tails(query.anchor, query.relations[0]));
    }
  }
}

TEST_CASE("beam search: one hop follows score_all_tails exactly") {
  RankFixture fx;
  fx.set_scores({0.25, 1.0, -2.0, 9.0});
  PathQuery query;
  query.anchor = 0;
  query.relations = {0};
  query.answers = {1};
  const auto result = answer_path_query(fx.model, query, 2);
  const auto direct = score_all_tails(fx.model, fx.model.entity(0), 0);
  CHECK(result.final_scores == direct);
  CHECK(result.ranking.front() == 3);  // highest score first
  CHECK_THROWS_AS(answer_path_query(fx.model, query, 0), ConfigError);
}

TEST_CASE("beam search with full width equals brute-force enumeration") {
  TempDir dir("evalbeam");
  const auto files = write_cluster_graph(dir, 15, 3, 60, 9, 5);
  const auto kg = add_reverse_relations(
      load_dataset(files.train, files.valid, files.test));
  const auto model = init_model(ModelFamily::kTransE, 4, kg.num_entities(),
                                kg.num_relations(), 21, 0.6);

  const auto queries2 = enumerate_path_queries(kg, Split::kTest, 2, 5, 3);
  const auto queries3 = enumerate_path_queries(kg, Split::kTest, 3, 5, 3);
  std::vector<PathQuery> queries = queries2;
  queries.insert(queries.end(), queries3.begin(), queries3.end());
  REQUIRE_FALSE(queries.empty());

  const auto n = kg.num_entities();
  for (const auto& query : queries) {
    const auto beam = answer_path_query(model, query, static_cast<int32_t>(n));

    // Brute force max-sum over all intermediate assignments.
    std::vector<double> best = score_all_tails(model, model.entity(query.anchor),
                                               query.relations[0]);
    for (size_t hop = 1; hop < query.relations.size(); ++hop) {
      std::vector<double> next(n, -1e300);
      for (EntityId mid = 0; mid < n; ++mid) {
        const auto hop_scores = score_all_tails(model, model.entity(mid),
                                                query.relations[hop]);
        for (EntityId tail = 0; tail < n; ++tail) {
          next[tail] = std::max(next[tail], best[mid] + hop_scores[tail]);
        }
      }
      best = std::move(next);
    }
    for (EntityId e = 0; e < n; ++e) {
      CHECK(beam.final_scores[e] == doctest::Approx(best[e]).epsilon(1e-12));
    }
  }
}

TEST_CASE("multihop metrics: 1p equals link prediction exactly") {
  TempDir dir("evalmh");
  const auto files = write_cluster_graph(dir, 30, 3, 150, 13, 5);
  const auto kg = add_reverse_relations(
      load_dataset(files.train, files.valid, files.test));
  const auto filter = build_filter_index(kg);
  const auto model = init_model(ModelFamily::kDistMult, 8, kg.num_entities(),
                                kg.num_relations(), 3, 0.4);

  const auto path_queries = enumerate_path_queries(kg, Split::kTest, 1, 100, 7);
  REQUIRE_FALSE(path_queries.empty());

  // The matched link-prediction query set: one per (query, answer) pair.
  std::vector<Query> link_queries;
  for (const auto& pq : path_queries) {
    for (EntityId answer : pq.answers) {
      link_queries.push_back(Query{pq.anchor, pq.relations[0], answer});
    }
  }

  const auto mh = multihop_metrics(model, path_queries, 32);
  REQUIRE(mh.count(1) == 1);
  const auto lp = link_prediction(model, link_queries, filter, EvalCondition{});
  CHECK(mh.at(1).mrr == lp.mrr);
  CHECK(mh.at(1).mr == lp.mr);
  CHECK(mh.at(1).hits1 == lp.hits1);
  CHECK(mh.at(1).hits3 == lp.hits3);
  CHECK(mh.at(1).hits10 == lp.hits10);
  CHECK(mh.at(1).num_queries == lp.num_queries);
}

TEST_CASE("a trained chain model answers the 2p query at rank 1") {
  TempDir dir("evalchain");
  const auto kg = add_reverse_relations(
      graph_from_lines(dir, "a\tr\tb\nb\ts\tc\nd\tr\te\ne\ts\tf\n"));
  TrainConfig config;
  config.family = ModelFamily::kDistMult;
  config.dim = 8;
  config.epochs = 80;
  config.learning_rate = 0.05;
  config.lambda = 0.1;
  config.seed = 2;
  const auto result = train(kg, config);

  PathQuery query;
  query.anchor = *kg.entity_id("a");
  query.relations = {*kg.relation_id("r"), *kg.relation_id("s")};
  query.answers = {*kg.entity_id("c")};
  const auto scored = answer_path_query(result.model, query, kg.num_entities());
  CHECK(scored.ranking.front() == *kg.entity_id("c"));
}

TEST_SUITE_END();
