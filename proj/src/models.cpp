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

#include "kgcert/models.hpp"

#include <cmath>

#include "kgcert/rng.hpp"

namespace kgcert {

namespace {

constexpr double kPi = 3.14159265358979323846;

// L2 norm of the residual h + r - t. Shared by score and gradient so the
// singular-point convention is applied consistently.
double transe_residual_norm(std::span<const double> head, std::span<const double> rel,
                            std::span<const double> tail, int32_t dim) {
  double sum = 0.0;
  for (int32_t i = 0; i < dim; ++i) {
    const double v = head[i] + rel[i] - tail[i];
    sum += v * v;
  }
  return std::sqrt(sum);
}

// RotatE residual: |h * e^{i*phase} - t| over the complex components,
// flattened L2. Equals the plain distance between h and the back-rotated tail
// conj(r) * t, which is the form the gradient code uses.
double rotate_residual_norm(std::span<const double> head, std::span<const double> phases,
                            std::span<const double> tail, int32_t dim) {
  double sum = 0.0;
  for (int32_t i = 0; i < dim; ++i) {
    const double c = std::cos(phases[i]);
    const double s = std::sin(phases[i]);
    const double re = head[i] * c - head[dim + i] * s - tail[i];
    const double im = head[i] * s + head[dim + i] * c - tail[dim + i];
    sum += re * re + im * im;
  }
  return std::sqrt(sum);
}

double score_kernel(ModelFamily family, int32_t dim, std::span<const double> head,
                    std::span<const double> rel, std::span<const double> tail) {
  switch (family) {
    case ModelFamily::kTransE:
      return -transe_residual_norm(head, rel, tail, dim);
    case ModelFamily::kDistMult: {
      double sum = 0.0;
      for (int32_t i = 0; i < dim; ++i) sum += head[i] * rel[i] * tail[i];
      return sum;
    }
    case ModelFamily::kComplEx: {
      // Re<h, r, conj(t)> with planar (re, im) storage.
      double sum = 0.0;
      for (int32_t i = 0; i < dim; ++i) {
        const double a = head[i], b = head[dim + i];
        const double c = rel[i], d = rel[dim + i];
        const double e = tail[i], f = tail[dim + i];
        sum += (a * c - b * d) * e + (a * d + b * c) * f;
      }
      return sum;
    }
    case ModelFamily::kRotatE:
      return -rotate_residual_norm(head, rel, tail, dim);
  }
  return 0.0;
}

}  // namespace

const char* family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::kTransE: return "transe";
    case ModelFamily::kDistMult: return "distmult";
    case ModelFamily::kComplEx: return "complex";
    case ModelFamily::kRotatE: return "rotate";
  }
  return "?";
}

ModelFamily family_from_string(const std::string& name) {
  for (ModelFamily family : kAllFamilies) {
    if (name == family_name(family)) return family;
  }
  throw ConfigError("unknown model family: " + name);
}

void EmbeddingModel::check_entity(int64_t i) const {
  if (i < 0 || i >= num_entities) {
    throw Error("entity index out of range: " + std::to_string(i));
  }
}

void EmbeddingModel::check_relation(int64_t i) const {
  if (i < 0 || i >= num_relations) {
    throw Error("relation index out of range: " + std::to_string(i));
  }
}

EmbeddingModel init_model(ModelFamily family, int32_t dim, int64_t num_entities,
                          int64_t num_relations, uint64_t seed, double init_scale) {
  if (dim < 1) throw ConfigError("init_model: dim must be >= 1");
  if (num_entities < 1 || num_relations < 1) {
    throw ConfigError("init_model: need at least one entity and one relation");
  }
  EmbeddingModel model;
  model.family = family;
  model.dim = dim;
  model.num_entities = num_entities;
  model.num_relations = num_relations;
  model.entity_table.resize(num_entities * model.entity_cols());
  model.relation_table.resize(num_relations * model.relation_cols());

  Rng rng = purpose_stream(seed, RngPurpose::kModelInit);
  for (double& v : model.entity_table) v = init_scale * rng.uniform(-1.0, 1.0);
  const bool phases = family == ModelFamily::kRotatE;
  for (double& v : model.relation_table) {
    const double u = rng.uniform(-1.0, 1.0);
    v = phases ? (init_scale == 0.0 ? 0.0 : kPi * u) : init_scale * u;
  }
  return model;
}

double score(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t) {
  model.check_entity(h);
  return score_head(model, model.entity(h), r, t);
}

double score_head(const EmbeddingModel& model, std::span<const double> head,
                  RelationId r, EntityId t) {
  model.check_relation(r);
  model.check_entity(t);
  return score_kernel(model.family, model.dim, head, model.relation(r), model.entity(t));
}

double energy(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t) {
  return -score(model, h, r, t);
}

void grad_energy_head(const EmbeddingModel& model, std::span<const double> head,
                      RelationId r, EntityId t, std::span<double> out) {
  model.check_relation(r);
  model.check_entity(t);
  const int32_t dim = model.dim;
  const auto rel = model.relation(r);
  const auto tail = model.entity(t);

  switch (model.family) {
    case ModelFamily::kTransE: {
      // E = |h + r - t|; grad = residual / norm, zero at the singular point.
      const double norm = transe_residual_norm(head, rel, tail, dim);
      for (int32_t i = 0; i < dim; ++i) {
        out[i] = norm == 0.0 ? 0.0 : (head[i] + rel[i] - tail[i]) / norm;
      }
      return;
    }
    case ModelFamily::kDistMult: {
      // E = -<h, r, t>; grad is -(r * t), independent of the head.
      for (int32_t i = 0; i < dim; ++i) out[i] = -rel[i] * tail[i];
      return;
    }
    case ModelFamily::kComplEx: {
      // Also head-independent: dE/d(re h) = -(ce + df), dE/d(im h) = de - cf.
      for (int32_t i = 0; i < dim; ++i) {
        const double c = rel[i], d = rel[dim + i];
        const double e = tail[i], f = tail[dim + i];
        out[i] = -(c * e + d * f);
        out[dim + i] = d * e - c * f;
      }
      return;
    }
    case ModelFamily::kRotatE: {
      // E = |h - conj(r) t|; grad = (h - conj(r) t) / norm in (re, im) parts.
      double sum = 0.0;
      for (int32_t i = 0; i < dim; ++i) {
        const double c = std::cos(rel[i]);
        const double s = std::sin(rel[i]);
        out[i] = head[i] - (c * tail[i] + s * tail[dim + i]);
        out[dim + i] = head[dim + i] - (c * tail[dim + i] - s * tail[i]);
        sum += out[i] * out[i] + out[dim + i] * out[dim + i];
      }
      const double norm = std::sqrt(sum);
      for (int32_t i = 0; i < 2 * dim; ++i) out[i] = norm == 0.0 ? 0.0 : out[i] / norm;
      return;
    }
  }
}

std::vector<double> grad_energy_head(const EmbeddingModel& model,
                                     std::span<const double> head, RelationId r,
                                     EntityId t) {
  std::vector<double> out(model.entity_cols());
  grad_energy_head(model, head, r, t, out);
  return out;
}

void score_all_tails(const EmbeddingModel& model, std::span<const double> head,
                     RelationId r, std::span<double> out) {
  model.check_relation(r);
  const auto rel = model.relation(r);
  for (int64_t t = 0; t < model.num_entities; ++t) {
    out[t] = score_kernel(model.family, model.dim, head, rel, model.entity(t));
  }
}

std::vector<double> score_all_tails(const EmbeddingModel& model,
                                    std::span<const double> head, RelationId r) {
  std::vector<double> out(model.num_entities);
  score_all_tails(model, head, r, out);
  return out;
}

void accumulate_score_grad(const EmbeddingModel& model, std::span<const double> head,
                           RelationId r, EntityId t, double weight,
                           std::span<double> d_head, std::span<double> d_relation,
                           std::span<double> d_tail) {
  const int32_t dim = model.dim;
  const auto rel = model.relation(r);
  const auto tail = model.entity(t);

  switch (model.family) {
    case ModelFamily::kTransE: {
      const double norm = transe_residual_norm(head, rel, tail, dim);
      if (norm == 0.0) return;
      for (int32_t i = 0; i < dim; ++i) {
        const double g = weight * (head[i] + rel[i] - tail[i]) / norm;
        if (!d_head.empty()) d_head[i] -= g;
        if (!d_relation.empty()) d_relation[i] -= g;
        if (!d_tail.empty()) d_tail[i] += g;
      }
      return;
    }
    case ModelFamily::kDistMult: {
      for (int32_t i = 0; i < dim; ++i) {
        if (!d_head.empty()) d_head[i] += weight * rel[i] * tail[i];
        if (!d_relation.empty()) d_relation[i] += weight * head[i] * tail[i];
        if (!d_tail.empty()) d_tail[i] += weight * head[i] * rel[i];
      }
      return;
    }
    case ModelFamily::kComplEx: {
      for (int32_t i = 0; i < dim; ++i) {
        const double a = head[i], b = head[dim + i];
        const double c = rel[i], d = rel[dim + i];
        const double e = tail[i], f = tail[dim + i];
        if (!d_head.empty()) {
          d_head[i] += weight * (c * e + d * f);
          d_head[dim + i] += weight * (c * f - d * e);
        }
        if (!d_relation.empty()) {
          d_relation[i] += weight * (a * e + b * f);
          d_relation[dim + i] += weight * (a * f - b * e);
        }
        if (!d_tail.empty()) {
          d_tail[i] += weight * (a * c - b * d);
          d_tail[dim + i] += weight * (a * d + b * c);
        }
      }
      return;
    }
    case ModelFamily::kRotatE: {
      const double norm = rotate_residual_norm(head, rel, tail, dim);
      if (norm == 0.0) return;
      const double w = weight / norm;
      for (int32_t i = 0; i < dim; ++i) {
        const double c = std::cos(rel[i]);
        const double s = std::sin(rel[i]);
        // Residual u = h * r - t per complex component.
        const double m_re = head[i] * c - head[dim + i] * s;
        const double m_im = head[i] * s + head[dim + i] * c;
        const double p = m_re - tail[i];
        const double q = m_im - tail[dim + i];
        if (!d_head.empty()) {
          d_head[i] -= w * (p * c + q * s);
          d_head[dim + i] -= w * (q * c - p * s);
        }
        if (!d_relation.empty()) d_relation[i] -= w * (q * m_re - p * m_im);
        if (!d_tail.empty()) {
          d_tail[i] += w * p;
          d_tail[dim + i] += w * q;
        }
      }
      return;
    }
  }
}

}  // namespace kgcert
