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

#ifndef KGCERT_MODELS_HPP_
#define KGCERT_MODELS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kgcert/kg.hpp"

namespace kgcert {

// Scoring families. TransE and RotatE measure a translation/rotation residual
// (geometric); DistMult and ComplEx are trilinear forms (tensor
// decomposition). Higher score = more plausible; energy = -score.
enum class ModelFamily : uint8_t {
  kTransE = 0,
  kDistMult = 1,
  kComplEx = 2,
  kRotatE = 3,
};

inline constexpr ModelFamily kAllFamilies[] = {
    ModelFamily::kTransE, ModelFamily::kDistMult, ModelFamily::kComplEx,
    ModelFamily::kRotatE};

const char* family_name(ModelFamily family);
ModelFamily family_from_string(const std::string& name);

// Embedding tables, row-major, 64-bit floats throughout.
//
// Storage layout per row:
//   TransE    entity d        relation d
//   DistMult  entity d        relation d
//   ComplEx   entity 2d       relation 2d   (real parts, then imaginary parts)
//   RotatE    entity 2d       relation d    (relation rows are phase angles;
//                                            the rotation factors e^{i*phase}
//                                            are unit-modulus by construction)
struct EmbeddingModel {
  ModelFamily family = ModelFamily::kDistMult;
  int32_t dim = 0;
  int64_t num_entities = 0;
  int64_t num_relations = 0;
  std::vector<double> entity_table;
  std::vector<double> relation_table;

  int32_t entity_cols() const {
    return (family == ModelFamily::kComplEx || family == ModelFamily::kRotatE)
               ? 2 * dim
               : dim;
  }
  int32_t relation_cols() const {
    return family == ModelFamily::kComplEx ? 2 * dim : dim;
  }

  std::span<const double> entity(int64_t i) const {
    return {entity_table.data() + i * entity_cols(),
            static_cast<size_t>(entity_cols())};
  }
  std::span<double> entity_mut(int64_t i) {
    return {entity_table.data() + i * entity_cols(),
            static_cast<size_t>(entity_cols())};
  }
  std::span<const double> relation(int64_t i) const {
    return {relation_table.data() + i * relation_cols(),
            static_cast<size_t>(relation_cols())};
  }

  void check_entity(int64_t i) const;
  void check_relation(int64_t i) const;
};

// Uniform init in [-init_scale, init_scale]; RotatE phases uniform in
// [-pi, pi]. init_scale == 0 zero-initializes everything, phases included.
// Deterministic per seed.
EmbeddingModel init_model(ModelFamily family, int32_t dim, int64_t num_entities,
                          int64_t num_relations, uint64_t seed, double init_scale);

// Score of (h, r, t); higher = more plausible.
double score(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t);

// Same, with an explicit head vector (which need not be a table row; this is
// how perturbed heads flow through scoring without touching the table).
double score_head(const EmbeddingModel& model, std::span<const double> head,
                  RelationId r, EntityId t);

double energy(const EmbeddingModel& model, EntityId h, RelationId r, EntityId t);

// Gradient of energy with respect to the head vector. At the exact-hit
// singular point of the distance families the zero vector (a valid
// subgradient) is returned.
std::vector<double> grad_energy_head(const EmbeddingModel& model,
                                     std::span<const double> head, RelationId r,
                                     EntityId t);
void grad_energy_head(const EmbeddingModel& model, std::span<const double> head,
                      RelationId r, EntityId t, std::span<double> out);

// Scores against every candidate tail. Entry i is bit-identical to
// score_head(model, head, r, i): both paths share one kernel.
std::vector<double> score_all_tails(const EmbeddingModel& model,
                                    std::span<const double> head, RelationId r);
void score_all_tails(const EmbeddingModel& model, std::span<const double> head,
                     RelationId r, std::span<double> out);

// Accumulates weight * d(score)/d{head, relation, tail} into the given
// buffers. Used by the cross-entropy backward pass; any buffer may be empty
// to skip that component.
void accumulate_score_grad(const EmbeddingModel& model, std::span<const double> head,
                           RelationId r, EntityId t, double weight,
                           std::span<double> d_head, std::span<double> d_relation,
                           std::span<double> d_tail);

}  // namespace kgcert

#endif  // KGCERT_MODELS_HPP_
