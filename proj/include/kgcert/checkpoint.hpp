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

#ifndef KGCERT_CHECKPOINT_HPP_
#define KGCERT_CHECKPOINT_HPP_

#include <filesystem>

#include "kgcert/models.hpp"

namespace kgcert {

// Binary model container, little-endian, bit-exact round trip:
//
//   offset  size  field
//   0       8     magic "kgemodel"
//   8       4     format version (uint32, currently 1)
//   12      1     family tag (uint8, ModelFamily)
//   13      3     padding (zero)
//   16      4     dim (int32)
//   20      4     entity columns (int32)
//   24      4     relation columns (int32)
//   28      4     padding (zero)
//   32      8     num_entities (int64)
//   40      8     num_relations (int64)
//   48      -     entity table, row-major float64
//   ...     -     relation table, row-major float64
void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path);

EmbeddingModel load_checkpoint(const std::filesystem::path& path);

}  // namespace kgcert

#endif  // KGCERT_CHECKPOINT_HPP_
