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

#include "kgcert/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace kgcert {

namespace {

constexpr char kMagic[8] = {'k', 'g', 'e', 'm', 'o', 'd', 'e', 'l'};
constexpr uint32_t kFormatVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  return value;
}

}  // namespace

void save_checkpoint(const EmbeddingModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open checkpoint for writing: " + path.string());

  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kFormatVersion);
  write_pod(out, static_cast<uint8_t>(model.family));
  const std::array<char, 3> pad1{};
  out.write(pad1.data(), pad1.size());
  write_pod(out, model.dim);
  write_pod(out, model.entity_cols());
  write_pod(out, model.relation_cols());
  write_pod(out, uint32_t{0});
  write_pod(out, model.num_entities);
  write_pod(out, model.num_relations);
  out.write(reinterpret_cast<const char*>(model.entity_table.data()),
            static_cast<std::streamsize>(model.entity_table.size() * sizeof(double)));
  out.write(reinterpret_cast<const char*>(model.relation_table.data()),
            static_cast<std::streamsize>(model.relation_table.size() * sizeof(double)));
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

EmbeddingModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint: " + path.string());

  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error("not a model checkpoint: " + path.string());
  }
  const auto version = read_pod<uint32_t>(in);
  if (version != kFormatVersion) {
    throw Error("unsupported checkpoint version " + std::to_string(version));
  }

  EmbeddingModel model;
  const auto family_tag = read_pod<uint8_t>(in);
  if (family_tag > static_cast<uint8_t>(ModelFamily::kRotatE)) {
    throw Error("corrupt checkpoint: bad family tag");
  }
  model.family = static_cast<ModelFamily>(family_tag);
  in.ignore(3);
  model.dim = read_pod<int32_t>(in);
  const auto entity_cols = read_pod<int32_t>(in);
  const auto relation_cols = read_pod<int32_t>(in);
  read_pod<uint32_t>(in);  // padding
  model.num_entities = read_pod<int64_t>(in);
  model.num_relations = read_pod<int64_t>(in);
  if (!in || model.dim < 1 || model.num_entities < 1 || model.num_relations < 1 ||
      entity_cols != model.entity_cols() || relation_cols != model.relation_cols()) {
    throw Error("corrupt checkpoint header: " + path.string());
  }

  model.entity_table.resize(model.num_entities * model.entity_cols());
  model.relation_table.resize(model.num_relations * model.relation_cols());
  in.read(reinterpret_cast<char*>(model.entity_table.data()),
          static_cast<std::streamsize>(model.entity_table.size() * sizeof(double)));
  in.read(reinterpret_cast<char*>(model.relation_table.data()),
          static_cast<std::streamsize>(model.relation_table.size() * sizeof(double)));
  if (!in) throw Error("truncated checkpoint: " + path.string());
  return model;
}

}  // namespace kgcert
