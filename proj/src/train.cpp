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

#include "kgcert/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace kgcert {

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(perturb_prob >= 0.0 && perturb_prob <= 1.0)) {
    throw ConfigError("perturb_prob must lie in [0, 1]");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw ConfigError("adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw ConfigError("adam_eps must be > 0");
  if (!(init_scale >= 0.0)) throw ConfigError("init_scale must be >= 0");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) {
    throw ConfigError("label_smoothing must lie in [0, 1)");
  }
}

double sigma_quantile(std::span<const double> entity_table) {
  if (entity_table.empty()) throw Error("sigma_quantile: empty entity table");
  std::vector<double> magnitudes(entity_table.size());
  for (size_t i = 0; i < entity_table.size(); ++i) {
    const double v = std::fabs(entity_table[i]);
    if (!std::isfinite(v)) throw Error("sigma_quantile: non-finite component");
    magnitudes[i] = v;
  }
  // Nearest-rank estimator: the ceil(q*n)-th smallest value (1-based).
  const double q = 0.9973;
  const auto n = static_cast<int64_t>(magnitudes.size());
  int64_t rank = static_cast<int64_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<int64_t>(rank, 1, n);
  std::nth_element(magnitudes.begin(), magnitudes.begin() + (rank - 1), magnitudes.end());
  return magnitudes[rank - 1];
}

NoiseDraw perturb_entity(const EmbeddingModel& model, EntityId entity, double alpha,
                         double sigma, Rng& rng) {
  model.check_entity(entity);
  if (sigma < 0.0) throw Error("perturb_entity: sigma must be >= 0");
  if (alpha < 0.0) throw Error("perturb_entity: alpha must be >= 0");

  NoiseDraw draw;
  draw.entity = entity;
  draw.sigma_used = sigma;
  draw.alpha_used = alpha;
  draw.noise.resize(model.entity_cols());
  rng.fill_normal(draw.noise, sigma);
  const auto original = model.entity(entity);
  draw.perturbed.resize(original.size());
  for (size_t i = 0; i < original.size(); ++i) {
    draw.perturbed[i] = original[i] + alpha * draw.noise[i];
  }
  return draw;
}

double denoising_loss(const EmbeddingModel& model, const NoiseDraw& draw,
                      RelationId r, EntityId t) {
  std::vector<double> grad(model.entity_cols());
  grad_energy_head(model, draw.perturbed, r, t, grad);
  double loss = 0.0;
  for (size_t i = 0; i < grad.size(); ++i) {
    const double diff = draw.added(i) + grad[i];  // added noise - (-grad)
    loss += diff * diff;
  }
  if (!std::isfinite(loss)) throw Error("denoising_loss: non-finite value");
  return loss;
}

namespace {

// Cross-entropy over all tails for one query, with label smoothing. Returns
// the loss; if `d_logits` is non-null it receives softmax(z) - y.
double cross_entropy_all_tails(std::span<const double> logits, EntityId target,
                               double label_smoothing, std::span<double> d_logits) {
  const auto n = static_cast<int64_t>(logits.size());
  double max_logit = logits[0];
  for (double z : logits) max_logit = std::max(max_logit, z);
  double sum_exp = 0.0;
  double sum_logits = 0.0;
  for (double z : logits) {
    sum_exp += std::exp(z - max_logit);
    sum_logits += z;
  }
  const double lse = max_logit + std::log(sum_exp);
  const double off = label_smoothing / static_cast<double>(n);
  const double loss =
      lse - (1.0 - label_smoothing) * logits[target] - off * sum_logits;

  if (!d_logits.empty()) {
    for (int64_t i = 0; i < n; ++i) {
      d_logits[i] = std::exp(logits[i] - lse) - off;
    }
    d_logits[target] -= 1.0 - label_smoothing;
  }
  return loss;
}

// Parameter gradient of the denoising loss for one draw. The loss couples
// parameters both directly through the energy gradient and, for the distance
// families, through the Hessian of the energy at the perturbed head, so this
// is where the second-order terms live. `weight` folds in lambda and the
// batch normalization.
void accumulate_denoising_grad(const EmbeddingModel& model, const NoiseDraw& draw,
                               RelationId r, EntityId t, double weight,
                               GradBuffer& grads) {
  const int32_t dim = model.dim;
  const int32_t cols = model.entity_cols();
  const auto rel = model.relation(r);
  const auto tail = model.entity(t);
  std::span<double> d_head{grads.entity.data() + draw.entity * cols,
                           static_cast<size_t>(cols)};
  std::span<double> d_rel{grads.relation.data() + r * model.relation_cols(),
                          static_cast<size_t>(model.relation_cols())};
  std::span<double> d_tail{grads.entity.data() + t * cols, static_cast<size_t>(cols)};

  std::vector<double> g(cols);
  grad_energy_head(model, draw.perturbed, r, t, g);
  // z = 2 * (added noise + g) is d(loss)/d(g).
  std::vector<double> z(cols);
  for (int32_t i = 0; i < cols; ++i) z[i] = 2.0 * (draw.added(i) + g[i]);

  switch (model.family) {
    case ModelFamily::kTransE: {
      // g = v / s with v = h + r - t. Hessian-vector product:
      //   H z = (z - v (v.z) / s^2) / s.
      double s2 = 0.0;
      std::vector<double> v(dim);
      for (int32_t i = 0; i < dim; ++i) {
        v[i] = draw.perturbed[i] + rel[i] - tail[i];
        s2 += v[i] * v[i];
      }
      if (s2 == 0.0) return;  // singular point: zero subgradient
      const double s = std::sqrt(s2);
      double v_dot_z = 0.0;
      for (int32_t i = 0; i < dim; ++i) v_dot_z += v[i] * z[i];
      for (int32_t i = 0; i < dim; ++i) {
        const double hz = (z[i] - v[i] * v_dot_z / s2) / s;
        d_head[i] += weight * hz;
        d_rel[i] += weight * hz;
        d_tail[i] -= weight * hz;
      }
      return;
    }
    case ModelFamily::kDistMult: {
      // g = -(r * t) is independent of the head: no Hessian term.
      for (int32_t i = 0; i < dim; ++i) {
        d_rel[i] -= weight * z[i] * tail[i];
        d_tail[i] -= weight * z[i] * rel[i];
      }
      return;
    }
    case ModelFamily::kComplEx: {
      // Head-independent as well; only relation/tail couplings remain.
      for (int32_t i = 0; i < dim; ++i) {
        const double za = z[i], zb = z[dim + i];
        const double c = rel[i], d = rel[dim + i];
        const double e = tail[i], f = tail[dim + i];
        d_rel[i] -= weight * (za * e + zb * f);
        d_rel[dim + i] += weight * (zb * e - za * f);
        d_tail[i] += weight * (zb * d - za * c);
        d_tail[dim + i] -= weight * (za * d + zb * c);
      }
      return;
    }
    case ModelFamily::kRotatE: {
      // g = w / s with w = h - conj(r) t in planar complex coordinates.
      std::vector<double> w(cols);
      std::vector<double> rho(cols);  // conj(r) * t
      double s2 = 0.0;
      for (int32_t i = 0; i < dim; ++i) {
        const double c = std::cos(rel[i]);
        const double sn = std::sin(rel[i]);
        rho[i] = c * tail[i] + sn * tail[dim + i];
        rho[dim + i] = c * tail[dim + i] - sn * tail[i];
        w[i] = draw.perturbed[i] - rho[i];
        w[dim + i] = draw.perturbed[dim + i] - rho[dim + i];
        s2 += w[i] * w[i] + w[dim + i] * w[dim + i];
      }
      if (s2 == 0.0) return;
      const double s = std::sqrt(s2);
      double w_dot_z = 0.0;
      for (int32_t i = 0; i < cols; ++i) w_dot_z += w[i] * z[i];
      for (int32_t i = 0; i < dim; ++i) {
        const double c = std::cos(rel[i]);
        const double sn = std::sin(rel[i]);
        const double hz_re = (z[i] - w[i] * w_dot_z / s2) / s;
        const double hz_im = (z[dim + i] - w[dim + i] * w_dot_z / s2) / s;
        d_head[i] += weight * hz_re;
        d_head[dim + i] += weight * hz_im;
        // d(loss)/d(rho) = -H z, chained into the tail and the phase.
        d_tail[i] -= weight * (hz_re * c - hz_im * sn);
        d_tail[dim + i] -= weight * (hz_re * sn + hz_im * c);
        d_rel[i] -= weight * (hz_re * rho[dim + i] - hz_im * rho[i]);
      }
      return;
    }
  }
}

}  // namespace

double original_loss(const EmbeddingModel& model, std::span<const Triple> batch,
                     double label_smoothing) {
  if (batch.empty()) throw Error("original_loss: empty batch");
  std::vector<double> logits(model.num_entities);
  double total = 0.0;
  for (const Triple& triple : batch) {
    score_all_tails(model, model.entity(triple.head), triple.relation, logits);
    total += cross_entropy_all_tails(logits, triple.tail, label_smoothing, {});
  }
  return total / static_cast<double>(batch.size());
}

void GradBuffer::resize_like(const EmbeddingModel& model) {
  entity.assign(model.entity_table.size(), 0.0);
  relation.assign(model.relation_table.size(), 0.0);
}

void GradBuffer::clear() {
  std::fill(entity.begin(), entity.end(), 0.0);
  std::fill(relation.begin(), relation.end(), 0.0);
}

BatchDraws draw_batch_noise(const EmbeddingModel& model, std::span<const Triple> batch,
                            const TrainConfig& config, double sigma, Rng& rng) {
  BatchDraws out;
  out.draws.reserve(batch.size());
  out.active.reserve(batch.size());
  for (const Triple& triple : batch) {
    // Bernoulli gate and noise are always drawn, active or not, so the
    // stream position is independent of alpha, lambda and perturb_prob.
    const bool active = rng.uniform() < config.perturb_prob;
    out.draws.push_back(perturb_entity(model, triple.head, config.alpha, sigma, rng));
    out.active.push_back(active ? 1 : 0);
  }
  return out;
}

BatchLosses joint_loss_and_grads(const EmbeddingModel& model,
                                 std::span<const Triple> batch,
                                 const BatchDraws& draws, const TrainConfig& config,
                                 GradBuffer* grads) {
  if (batch.empty()) throw Error("joint_loss_and_grads: empty batch");

  BatchLosses losses;
  const double batch_scale = 1.0 / static_cast<double>(batch.size());
  const int32_t cols = model.entity_cols();
  std::vector<double> logits(model.num_entities);
  std::vector<double> d_logits(model.num_entities);

  for (const Triple& triple : batch) {
    score_all_tails(model, model.entity(triple.head), triple.relation, logits);
    std::span<double> d_logits_span = grads ? std::span<double>(d_logits)
                                            : std::span<double>{};
    losses.original += batch_scale * cross_entropy_all_tails(logits, triple.tail,
                                                             config.label_smoothing,
                                                             d_logits_span);
    if (grads) {
      std::span<double> d_head{grads->entity.data() + triple.head * cols,
                               static_cast<size_t>(cols)};
      std::span<double> d_rel{
          grads->relation.data() + triple.relation * model.relation_cols(),
          static_cast<size_t>(model.relation_cols())};
      for (int64_t tail = 0; tail < model.num_entities; ++tail) {
        const double w = batch_scale * d_logits[tail];
        if (w == 0.0) continue;
        std::span<double> d_tail{grads->entity.data() + tail * cols,
                                 static_cast<size_t>(cols)};
        accumulate_score_grad(model, model.entity(triple.head), triple.relation,
                              static_cast<EntityId>(tail), w, d_head, d_rel, d_tail);
      }
    }
  }

  int64_t num_active = 0;
  for (uint8_t active : draws.active) num_active += active;
  if (num_active > 0) {
    const double denoise_scale = 1.0 / static_cast<double>(num_active);
    NoiseDraw live;
    for (size_t i = 0; i < batch.size(); ++i) {
      if (!draws.active[i]) continue;
      // The perturbed head is a function of the current parameters,
      // perturbed = entity + alpha * noise, so gradients flow through it.
      live = draws.draws[i];
      const auto row = model.entity(live.entity);
      for (size_t j = 0; j < live.perturbed.size(); ++j) {
        live.perturbed[j] = row[j] + live.added(j);
      }
      losses.denoising += denoise_scale *
                          denoising_loss(model, live, batch[i].relation, batch[i].tail);
      if (grads && config.lambda > 0.0) {
        accumulate_denoising_grad(model, live, batch[i].relation, batch[i].tail,
                                  config.lambda * denoise_scale, *grads);
      }
    }
  }
  return losses;
}

Optimizer::Optimizer(const EmbeddingModel& model, const TrainConfig& config)
    : kind_(config.optimizer),
      learning_rate_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_eps) {
  if (kind_ == OptimizerKind::kAdam) {
    m_entity_.assign(model.entity_table.size(), 0.0);
    v_entity_.assign(model.entity_table.size(), 0.0);
    m_relation_.assign(model.relation_table.size(), 0.0);
    v_relation_.assign(model.relation_table.size(), 0.0);
  }
}

void Optimizer::apply(EmbeddingModel& model, const GradBuffer& grads) {
  if (kind_ == OptimizerKind::kSgd) {
    for (size_t i = 0; i < model.entity_table.size(); ++i) {
      model.entity_table[i] -= learning_rate_ * grads.entity[i];
    }
    for (size_t i = 0; i < model.relation_table.size(); ++i) {
      model.relation_table[i] -= learning_rate_ * grads.relation[i];
    }
    return;
  }

  ++step_;
  const double bias1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bias2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  auto update = [&](std::vector<double>& params, const std::vector<double>& grad,
                    std::vector<double>& m, std::vector<double>& v) {
    for (size_t i = 0; i < params.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * grad[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * grad[i] * grad[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      params[i] -= learning_rate_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  };
  update(model.entity_table, grads.entity, m_entity_, v_entity_);
  update(model.relation_table, grads.relation, m_relation_, v_relation_);
}

LossReport joint_step(EmbeddingModel& model, std::span<const Triple> batch,
                      const TrainConfig& config, double sigma, Optimizer& optimizer,
                      Rng& rng, int32_t epoch, int32_t batch_index) {
  GradBuffer grads;
  grads.resize_like(model);

  const BatchDraws draws = draw_batch_noise(model, batch, config, sigma, rng);
  const BatchLosses losses = joint_loss_and_grads(model, batch, draws, config, &grads);

  LossReport report;
  report.original = losses.original;
  report.denoising = losses.denoising;
  report.joint = losses.original + config.lambda * losses.denoising;
  report.epoch = epoch;
  report.batch = batch_index;
  if (!std::isfinite(report.joint)) {
    throw Error("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                std::to_string(batch_index));
  }
  optimizer.apply(model, grads);
  return report;
}

TrainResult train(const KnowledgeGraph& kg, const TrainConfig& config,
                  const std::function<void(const EpochLog&)>& on_epoch) {
  config.validate();
  if (!kg.reverse_augmented()) {
    throw Error("train: graph must be reverse-augmented");
  }
  const auto& triples = kg.triples(Split::kTrain);
  if (triples.empty()) throw Error("train: no training triples");

  TrainResult result;
  result.model = init_model(config.family, config.dim, kg.num_entities(),
                            kg.num_relations(), config.seed, config.init_scale);
  Optimizer optimizer(result.model, config);
  Rng rng = purpose_stream(config.seed, RngPurpose::kTrainLoop);

  double sigma = sigma_quantile(result.model.entity_table);
  std::vector<int64_t> order(triples.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Triple> batch;

  for (int32_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    if (config.sigma_refresh == SigmaRefresh::kPerEpoch) {
      sigma = sigma_quantile(result.model.entity_table);
    }
    rng.shuffle(std::span<int64_t>(order));

    EpochLog log;
    log.epoch = epoch;
    log.sigma = sigma;
    int32_t num_batches = 0;
    for (size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const size_t end = std::min(order.size(), begin + config.batch_size);
      batch.clear();
      for (size_t i = begin; i < end; ++i) batch.push_back(triples[order[i]]);
      const LossReport report = joint_step(result.model, batch, config, sigma,
                                           optimizer, rng, epoch, num_batches);
      log.loss_original += report.original;
      log.loss_denoising += report.denoising;
      log.loss_joint += report.joint;
      ++num_batches;
    }
    log.loss_original /= num_batches;
    log.loss_denoising /= num_batches;
    log.loss_joint /= num_batches;
    log.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.log.push_back(log);
    if (on_epoch) on_epoch(log);
  }
  return result;
}

}  // namespace kgcert
