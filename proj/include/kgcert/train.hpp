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

#ifndef KGCERT_TRAIN_HPP_
#define KGCERT_TRAIN_HPP_

#include <functional>
#include <span>
#include <vector>

#include "kgcert/kg.hpp"
#include "kgcert/models.hpp"
#include "kgcert/rng.hpp"

namespace kgcert {

enum class OptimizerKind : uint8_t { kSgd = 0, kAdam = 1 };
enum class SigmaRefresh : uint8_t { kPerEpoch = 0, kOnce = 1 };

struct TrainConfig {
  ModelFamily family = ModelFamily::kDistMult;
  int32_t dim = 32;
  int32_t epochs = 100;
  int32_t batch_size = 128;
  double learning_rate = 0.01;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double alpha = 0.5;        // noise scale applied to drawn noise
  double lambda = 0.1;       // weight of the denoising loss
  double perturb_prob = 1.0; // probability a batch head is perturbed
  SigmaRefresh sigma_refresh = SigmaRefresh::kPerEpoch;
  uint64_t seed = 0;
  double init_scale = 0.1;
  double label_smoothing = 0.1;

  void validate() const;  // throws ConfigError
};

// One Gaussian perturbation of an entity embedding: perturbed = original +
// alpha * noise, noise ~ N(0, sigma^2) per component. The denoising target is
// the added displacement alpha * noise.
struct NoiseDraw {
  EntityId entity = 0;
  std::vector<double> noise;
  std::vector<double> perturbed;
  double sigma_used = 0.0;
  double alpha_used = 0.0;

  double added(size_t i) const { return alpha_used * noise[i]; }
};

struct LossReport {
  double original = 0.0;
  double denoising = 0.0;
  double joint = 0.0;  // original + lambda * denoising, exactly
  int32_t epoch = 0;
  int32_t batch = 0;
};

// 99.73% nearest-rank quantile of the pooled absolute values of all entity
// table components. This is the noise standard deviation used by training,
// perturbed evaluation, and certification.
double sigma_quantile(std::span<const double> entity_table);

NoiseDraw perturb_entity(const EmbeddingModel& model, EntityId entity, double alpha,
                         double sigma, Rng& rng);

// Squared error between the drawn noise and the model's noise estimate
// -grad_energy_head at the perturbed embedding.
double denoising_loss(const EmbeddingModel& model, const NoiseDraw& draw,
                      RelationId r, EntityId t);

// 1-vs-all cross-entropy over all candidate tails, with label smoothing;
// mean over the batch.
double original_loss(const EmbeddingModel& model, std::span<const Triple> batch,
                     double label_smoothing);

// Dense gradient buffers shaped like the model tables.
struct GradBuffer {
  std::vector<double> entity;
  std::vector<double> relation;

  void resize_like(const EmbeddingModel& model);
  void clear();
};

struct BatchDraws {
  std::vector<NoiseDraw> draws;    // parallel to the batch
  std::vector<uint8_t> active;     // 1 if the draw participates in the loss
};

// Draws one perturbation per batch head. Always consumes the same amount of
// randomness regardless of alpha/lambda so that disabling the denoising term
// does not shift any other draw.
BatchDraws draw_batch_noise(const EmbeddingModel& model, std::span<const Triple> batch,
                            const TrainConfig& config, double sigma, Rng& rng);

struct BatchLosses {
  double original = 0.0;
  double denoising = 0.0;
};

// Losses plus (optionally) parameter gradients of original + lambda *
// denoising for a fixed set of noise draws. Pure in the model: this is the
// function the finite-difference checks probe.
BatchLosses joint_loss_and_grads(const EmbeddingModel& model,
                                 std::span<const Triple> batch,
                                 const BatchDraws& draws, const TrainConfig& config,
                                 GradBuffer* grads);

class Optimizer {
 public:
  Optimizer(const EmbeddingModel& model, const TrainConfig& config);

  // One update from accumulated gradients.
  void apply(EmbeddingModel& model, const GradBuffer& grads);

 private:
  OptimizerKind kind_;
  double learning_rate_;
  double beta1_, beta2_, eps_;
  int64_t step_ = 0;
  std::vector<double> m_entity_, v_entity_, m_relation_, v_relation_;
};

// One optimization step on a batch: draw noise, compute joint loss and
// gradients, apply the optimizer. Aborts on non-finite loss.
LossReport joint_step(EmbeddingModel& model, std::span<const Triple> batch,
                      const TrainConfig& config, double sigma, Optimizer& optimizer,
                      Rng& rng, int32_t epoch, int32_t batch_index);

struct EpochLog {
  int32_t epoch = 0;
  double loss_original = 0.0;
  double loss_denoising = 0.0;
  double loss_joint = 0.0;
  double sigma = 0.0;
  double wall_time_s = 0.0;
};

struct TrainResult {
  EmbeddingModel model;
  std::vector<EpochLog> log;
};

// Full training run on the train split of a reverse-augmented graph.
// Deterministic per (config, seed). The optional callback observes each
// epoch's aggregate losses.
TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch = nullptr);

}  // namespace kgcert

#endif  // KGCERT_TRAIN_HPP_
