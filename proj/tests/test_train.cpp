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

#include "kgcert/eval.hpp"
#include "kgcert/train.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace kgcert;
namespace oracle = kgcert::testing;
using kgcert::testing::TempDir;
using kgcert::testing::chain_lines;
using kgcert::testing::graph_from_lines;

namespace {

// Joint loss as a pure function of flattened (entity || relation) parameters
// for fixed draws; feeds the finite-difference oracle.
double joint_loss_at(EmbeddingModel model, const std::vector<double>& params,
                     std::span<const Triple> batch, const BatchDraws& draws,
                     const TrainConfig& config) {
  std::copy(params.begin(), params.begin() + model.entity_table.size(),
            model.entity_table.begin());
  std::copy(params.begin() + model.entity_table.size(), params.end(),
            model.relation_table.begin());
  const BatchLosses losses = joint_loss_and_grads(model, batch, draws, config, nullptr);
  return losses.original + config.lambda * losses.denoising;
}

}  // namespace

TEST_SUITE_BEGIN("train");

TEST_CASE("sigma_quantile basics") {
  CHECK(sigma_quantile(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(sigma_quantile(std::vector<double>{-0.7, 0.7, 0.7, -0.7}) == 0.7);
  CHECK_THROWS_AS(sigma_quantile(std::vector<double>{}), Error);
}

TEST_CASE("sigma_quantile of standard normal data sits near 3") {
  // The 99.73% quantile of |N(0,1)| is the three-sigma point. Monte-Carlo
  // estimate with 10k draws; nearest-rank keeps it within a wide band.
  std::vector<double> samples(10000);
  Rng rng(123);
  rng.fill_normal(samples);
  const double sigma = sigma_quantile(samples);
  CHECK(sigma == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("sigma_quantile scales exactly with the table") {
  std::vector<double> samples(501);
  Rng rng(5);
  rng.fill_normal(samples);
  const double base = sigma_quantile(samples);
  std::vector<double> scaled = samples;
  for (double& v : scaled) v *= 2.5;
  CHECK(sigma_quantile(scaled) == doctest::Approx(2.5 * base).epsilon(1e-15));
}

TEST_CASE("perturb_entity basics") {
  const auto model = init_model(ModelFamily::kComplEx, 4, 3, 2, 1, 0.3);

  SUBCASE("alpha 0 leaves the embedding untouched") {
    Rng rng(1);
    const auto draw = perturb_entity(model, 1, 0.0, 1.0, rng);
    const auto row = model.entity(1);
    for (size_t i = 0; i < draw.perturbed.size(); ++i) {
      CHECK(draw.perturbed[i] == row[i]);
    }
  }
  SUBCASE("sigma 0 draws zero noise") {
    Rng rng(1);
    const auto draw = perturb_entity(model, 1, 0.5, 0.0, rng);
    for (double n : draw.noise) CHECK(n == 0.0);
  }
  SUBCASE("fixed seed reproduces the draw") {
    Rng rng_a(9), rng_b(9);
    const auto a = perturb_entity(model, 2, 0.5, 1.3, rng_a);
    const auto b = perturb_entity(model, 2, 0.5, 1.3, rng_b);
    CHECK(a.noise == b.noise);
    CHECK(a.perturbed == b.perturbed);
  }
}

TEST_CASE("denoising_loss hand-computed cases") {
  SUBCASE("distmult d=1 toy") {
    auto model = init_model(ModelFamily::kDistMult, 1, 2, 1, 0, 0.0);
    model.entity_table = {1.0, 1.0};  // e0 = e1 = 1
    model.relation_table = {1.0};
    NoiseDraw draw;
    draw.entity = 0;
    draw.alpha_used = 1.0;
    draw.sigma_used = 1.0;
    draw.noise = {0.5};
    draw.perturbed = {1.5};
    // noise estimate = r * t = 1, loss = (0.5 - 1)^2.
    CHECK(denoising_loss(model, draw, 0, 1) == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("zero noise at the transe singular point") {
    auto model = init_model(ModelFamily::kTransE, 2, 2, 1, 0, 0.0);
    // h + r - t = 0 everywhere with zero tables; gradient is the zero
    // subgradient, noise is zero, so the loss vanishes.
    NoiseDraw draw;
    draw.entity = 0;
    draw.alpha_used = 0.5;
    draw.sigma_used = 0.0;
    draw.noise = {0.0, 0.0};
    draw.perturbed = {0.0, 0.0};
    CHECK(denoising_loss(model, draw, 0, 1) == 0.0);
  }
}

TEST_CASE("original_loss closed forms") {
  SUBCASE("single entity gives zero loss") {
    auto model = init_model(ModelFamily::kDistMult, 2, 1, 1, 3, 0.4);
    const Triple triple{0, 0, 0};
    CHECK(original_loss(model, std::vector<Triple>{triple}, 0.1) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("uniform scores over four entities give ln 4") {
    auto model = init_model(ModelFamily::kDistMult, 2, 4, 1, 3, 0.0);
    const Triple triple{0, 0, 2};  // all-zero tables: every tail scores 0
    for (double smoothing : {0.0, 0.1}) {
      CHECK(original_loss(model, std::vector<Triple>{triple}, smoothing) ==
            doctest::Approx(std::log(4.0)).epsilon(1e-12));
    }
  }
}

TEST_CASE("joint loss parameter gradients match finite differences") {
  // d=2, |E|=3 instances across all families, exercising the second-order
  // coupling inside the denoising term.
  for (ModelFamily family : kAllFamilies) {
    for (uint64_t seed = 0; seed < 6; ++seed) {
      const auto model = init_model(family, 2, 3, 2, 77 + seed, 0.8);
      TrainConfig config;
      config.family = family;
      config.dim = 2;
      config.alpha = 0.4;
      config.lambda = 0.7;
      config.label_smoothing = 0.1;

      const std::vector<Triple> batch = {{0, 0, 1}, {2, 1, 0}, {1, 0, 2}};
      Rng rng(seed);
      const BatchDraws draws = draw_batch_noise(model, batch, config, 0.6, rng);

      GradBuffer grads;
      grads.resize_like(model);
      joint_loss_and_grads(model, batch, draws, config, &grads);
      std::vector<double> analytic = grads.entity;
      analytic.insert(analytic.end(), grads.relation.begin(), grads.relation.end());

      std::vector<double> params = model.entity_table;
      params.insert(params.end(), model.relation_table.begin(),
                    model.relation_table.end());
      const auto numeric = oracle::finite_difference_gradient(
          [&](const std::vector<double>& x) {
            return joint_loss_at(model, x, batch, draws, config);
          },
          params);

      CAPTURE(family_name(family));
      CAPTURE(seed);
      CHECK(oracle::gradients_close(analytic, numeric, 1e-4));
    }
  }
}

TEST_CASE("joint_step bookkeeping") {
  TempDir dir("train_step");
  const auto kg = add_reverse_relations(graph_from_lines(dir, chain_lines(4)));

  SUBCASE("lambda 0 reports joint equal to original") {
    TrainConfig config;
    config.lambda = 0.0;
    config.epochs = 1;
    const auto model = init_model(config.family, config.dim, kg.num_entities(),
                                  kg.num_relations(), 0, 0.1);
    auto working = model;
    Optimizer optimizer(working, config);
    Rng rng(0);
    const auto report = joint_step(working, kg.triples(Split::kTrain), config, 0.5,
                                   optimizer, rng, 0, 0);
    CHECK(report.joint == report.original);
    CHECK(report.denoising >= 0.0);
  }

  SUBCASE("ledger identity holds exactly") {
    TrainConfig config;
    config.lambda = 0.37;
    const auto model = init_model(config.family, config.dim, kg.num_entities(),
                                  kg.num_relations(), 1, 0.1);
    auto working = model;
    Optimizer optimizer(working, config);
    Rng rng(1);
    const auto report = joint_step(working, kg.triples(Split::kTrain), config, 0.5,
                                   optimizer, rng, 3, 7);
    CHECK(report.joint - (report.original + config.lambda * report.denoising) == 0.0);
    CHECK(report.epoch == 3);
    CHECK(report.batch == 7);
    CHECK(report.original >= 0.0);
    CHECK(report.denoising >= 0.0);
  }
}

TEST_CASE("with lambda 0 the final parameters are independent of alpha") {
  TempDir dir("train_l0");
  const auto kg = add_reverse_relations(graph_from_lines(dir, chain_lines(6)));
  TrainConfig config;
  config.epochs = 4;
  config.lambda = 0.0;
  config.seed = 5;

  config.alpha = 0.1;
  const auto low = train(kg, config);
  config.alpha = 2.0;
  const auto high = train(kg, config);
  CHECK(low.model.entity_table == high.model.entity_table);
  CHECK(low.model.relation_table == high.model.relation_table);

  // ...and with lambda > 0 alpha does matter.
  config.lambda = 0.5;
  config.alpha = 0.1;
  const auto la = train(kg, config);
  config.alpha = 2.0;
  const auto lb = train(kg, config);
  CHECK(la.model.entity_table != lb.model.entity_table);
}

TEST_CASE("train determinism and degenerate epoch count") {
  TempDir dir("train_det");
  const auto kg = add_reverse_relations(graph_from_lines(dir, chain_lines(5)));
  TrainConfig config;
  config.epochs = 3;
  config.seed = 11;
  config.alpha = 0.5;
  config.lambda = 0.2;

  const auto a = train(kg, config);
  const auto b = train(kg, config);
  CHECK(a.model.entity_table == b.model.entity_table);
  CHECK(a.model.relation_table == b.model.relation_table);
  REQUIRE(a.log.size() == 3);
  CHECK(a.log[0].loss_joint == b.log[0].loss_joint);

  config.epochs = 0;
  const auto untouched = train(kg, config);
  const auto fresh = init_model(config.family, config.dim, kg.num_entities(),
                                kg.num_relations(), config.seed, config.init_scale);
  CHECK(untouched.model.entity_table == fresh.entity_table);
  CHECK(untouched.log.empty());
}

TEST_CASE("losses decrease while memorizing a tiny chain") {
  TempDir dir("train_fit");
  const auto kg = add_reverse_relations(graph_from_lines(dir, chain_lines(6)));
  TrainConfig config;
  config.family = ModelFamily::kDistMult;
  config.dim = 8;
  config.epochs = 60;
  config.learning_rate = 0.05;
  config.alpha = 0.5;
  config.lambda = 0.2;
  config.seed = 3;

  const auto result = train(kg, config);
  CHECK(result.log.front().loss_original > result.log.back().loss_original);

  // A trained model should place every training target in the top ranks.
  const auto filter = build_filter_index(kg);
  const auto queries = queries_from_split(kg, Split::kTrain);
  const auto metrics = link_prediction(result.model, queries, filter, EvalCondition{});
  CHECK(metrics.hits1 >= 0.9);
}

TEST_CASE("config validation rejects bad values") {
  TrainConfig config;
  config.epochs = -1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.learning_rate = 0.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.alpha = -0.1;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.lambda = -1.0;
  CHECK_THROWS_AS(config.validate(), ConfigError);
  config = TrainConfig{};
  config.perturb_prob = 1.5;
  CHECK_THROWS_AS(config.validate(), ConfigError);
}

TEST_SUITE_END();
