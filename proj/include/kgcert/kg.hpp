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

#ifndef KGCERT_KG_HPP_
#define KGCERT_KG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace kgcert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised for invalid configurations / arguments; maps to CLI exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

using EntityId = int32_t;
using RelationId = int32_t;

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;

  friend bool operator==(const Triple&, const Triple&) = default;
};

enum class Split { kTrain = 0, kValid = 1, kTest = 2 };

inline constexpr Split kAllSplits[] = {Split::kTrain, Split::kValid, Split::kTest};

const char* split_name(Split split);
Split split_from_string(const std::string& name);

// A tail-prediction query (head, relation, ?) with its gold answer. With
// reverse-relation augmentation this form also covers head prediction.
struct Query {
  EntityId head;
  RelationId relation;
  EntityId target;

  friend bool operator==(const Query&, const Query&) = default;
};

// Immutable after construction; safe for shared read access across threads.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  int64_t num_entities() const { return static_cast<int64_t>(entity_names_.size()); }
  int64_t num_relations() const { return static_cast<int64_t>(relation_names_.size()); }

  const std::vector<std::string>& entity_names() const { return entity_names_; }
  const std::vector<std::string>& relation_names() const { return relation_names_; }

  const std::vector<Triple>& triples(Split split) const {
    return splits_[static_cast<int>(split)];
  }

  bool reverse_augmented() const { return reverse_augmented_; }

  int64_t total_triples() const;

  // Index lookup by identifier; returns nullopt for unknown names.
  std::optional<EntityId> entity_id(const std::string& name) const;
  std::optional<RelationId> relation_id(const std::string& name) const;

 private:
  friend class GraphBuilder;
  friend KnowledgeGraph add_reverse_relations(const KnowledgeGraph&);

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::unordered_map<std::string, EntityId> entity_ids_;
  std::unordered_map<std::string, RelationId> relation_ids_;
  std::vector<Triple> splits_[3];
  bool reverse_augmented_ = false;
};

// Loads a single triple file into the train split. Vocabulary indices follow
// first appearance order in the file.
KnowledgeGraph load_triples(const std::filesystem::path& path, char separator = '\t');

// Loads up to three triple files. Vocabulary indices follow first appearance
// order across train, then valid, then test.
KnowledgeGraph load_dataset(const std::filesystem::path& train_path,
                            const std::optional<std::filesystem::path>& valid_path,
                            const std::optional<std::filesystem::path>& test_path,
                            char separator = '\t');

// Writes one split back out as head<sep>relation<sep>tail lines.
void write_triples(const KnowledgeGraph& kg, Split split, std::ostream& out,
                   char separator = '\t');

// Doubles the relation vocabulary: relation r gains an inverse r + |R| and
// every triple (h, r, t) gains (t, r + |R|, h) in the same split. After this
// every evaluation query is tail prediction. Errors if called twice.
KnowledgeGraph add_reverse_relations(const KnowledgeGraph& kg);

// Map from (head, relation) to the set of tails known true in any split.
class FilterIndex {
 public:
  // Sorted, deduplicated tails for (h, r); empty span if the pair is unknown.
  const std::vector<EntityId>& tails(EntityId head, RelationId relation) const;

  bool contains(EntityId head, RelationId relation, EntityId tail) const;

  size_t num_pairs() const { return index_.size(); }

 private:
  friend FilterIndex build_filter_index(const KnowledgeGraph&);

  static uint64_t key(EntityId head, RelationId relation) {
    return (static_cast<uint64_t>(static_cast<uint32_t>(head)) << 32) |
           static_cast<uint32_t>(relation);
  }

  std::unordered_map<uint64_t, std::vector<EntityId>> index_;
};

// Requires a reverse-augmented graph; covers train + valid + test.
FilterIndex build_filter_index(const KnowledgeGraph& kg);

// One tail-prediction query per triple of the split. On an augmented graph
// each original fact contributes its forward and its reverse query.
std::vector<Query> queries_from_split(const KnowledgeGraph& kg, Split split);

}  // namespace kgcert

#endif  // KGCERT_KG_HPP_
