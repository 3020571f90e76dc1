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

#include "kgcert/kg.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace kgcert {

// Friend of KnowledgeGraph; assigns dense indices in first-appearance order.
class GraphBuilder {
 public:
  EntityId entity(const std::string& name) {
    auto [it, inserted] =
        kg_.entity_ids_.try_emplace(name, static_cast<EntityId>(kg_.entity_names_.size()));
    if (inserted) kg_.entity_names_.push_back(name);
    return it->second;
  }

  RelationId relation(const std::string& name) {
    auto [it, inserted] = kg_.relation_ids_.try_emplace(
        name, static_cast<RelationId>(kg_.relation_names_.size()));
    if (inserted) kg_.relation_names_.push_back(name);
    return it->second;
  }

  void add_file(const std::filesystem::path& path, Split split, char separator) {
    std::ifstream in(path);
    if (!in) {
      throw ConfigError("cannot open triple file: " + path.string());
    }
    std::string line;
    int64_t line_number = 0;
    while (std::getline(in, line)) {
      ++line_number;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;

      const size_t first = line.find(separator);
      const size_t second = first == std::string::npos
                                ? std::string::npos
                                : line.find(separator, first + 1);
      const bool extra = second != std::string::npos &&
                         line.find(separator, second + 1) != std::string::npos;
      if (first == std::string::npos || second == std::string::npos || extra ||
          first == 0 || second == first + 1 || second + 1 == line.size()) {
        throw Error(path.string() + ":" + std::to_string(line_number) +
                    ": expected exactly three non-empty fields");
      }
      const EntityId h = entity(line.substr(0, first));
      const RelationId r = relation(line.substr(first + 1, second - first - 1));
      const EntityId t = entity(line.substr(second + 1));
      kg_.splits_[static_cast<int>(split)].push_back(Triple{h, r, t});
    }
  }

  KnowledgeGraph take() { return std::move(kg_); }

 private:
  KnowledgeGraph kg_;
};

const char* split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "valid") return Split::kValid;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split: " + name);
}

int64_t KnowledgeGraph::total_triples() const {
  int64_t n = 0;
  for (const auto& split : splits_) n += static_cast<int64_t>(split.size());
  return n;
}

std::optional<EntityId> KnowledgeGraph::entity_id(const std::string& name) const {
  auto it = entity_ids_.find(name);
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> KnowledgeGraph::relation_id(const std::string& name) const {
  auto it = relation_ids_.find(name);
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph load_triples(const std::filesystem::path& path, char separator) {
  GraphBuilder builder;
  builder.add_file(path, Split::kTrain, separator);
  return builder.take();
}

KnowledgeGraph load_dataset(const std::filesystem::path& train_path,
                            const std::optional<std::filesystem::path>& valid_path,
                            const std::optional<std::filesystem::path>& test_path,
                            char separator) {
  GraphBuilder builder;
  builder.add_file(train_path, Split::kTrain, separator);
  if (valid_path) builder.add_file(*valid_path, Split::kValid, separator);
  if (test_path) builder.add_file(*test_path, Split::kTest, separator);
  return builder.take();
}

void write_triples(const KnowledgeGraph& kg, Split split, std::ostream& out,
                   char separator) {
  for (const Triple& triple : kg.triples(split)) {
    out << kg.entity_names()[triple.head] << separator
        << kg.relation_names()[triple.relation] << separator
        << kg.entity_names()[triple.tail] << '\n';
  }
}

KnowledgeGraph add_reverse_relations(const KnowledgeGraph& kg) {
  if (kg.reverse_augmented()) {
    throw Error("graph is already reverse-augmented");
  }
  KnowledgeGraph out = kg;
  const auto num_relations = static_cast<RelationId>(kg.num_relations());
  for (RelationId r = 0; r < num_relations; ++r) {
    const std::string name = kg.relation_names()[r] + "_reverse";
    out.relation_ids_.emplace(name, static_cast<RelationId>(out.relation_names_.size()));
    out.relation_names_.push_back(name);
  }
  for (auto& split : out.splits_) {
    const size_t original = split.size();
    split.reserve(2 * original);
    for (size_t i = 0; i < original; ++i) {
      const Triple& triple = split[i];
      split.push_back(Triple{triple.tail,
                             static_cast<RelationId>(triple.relation + num_relations),
                             triple.head});
    }
  }
  out.reverse_augmented_ = true;
  return out;
}

const std::vector<EntityId>& FilterIndex::tails(EntityId head, RelationId relation) const {
  static const std::vector<EntityId> kEmpty;
  auto it = index_.find(key(head, relation));
  return it == index_.end() ? kEmpty : it->second;
}

bool FilterIndex::contains(EntityId head, RelationId relation, EntityId tail) const {
  const auto& known = tails(head, relation);
  return std::binary_search(known.begin(), known.end(), tail);
}

FilterIndex build_filter_index(const KnowledgeGraph& kg) {
  if (!kg.reverse_augmented()) {
    throw Error("filter index requires a reverse-augmented graph");
  }
  FilterIndex filter;
  for (Split split : kAllSplits) {
    for (const Triple& triple : kg.triples(split)) {
      filter.index_[FilterIndex::key(triple.head, triple.relation)].push_back(triple.tail);
    }
  }
  for (auto& [key, tails] : filter.index_) {
    std::sort(tails.begin(), tails.end());
    tails.erase(std::unique(tails.begin(), tails.end()), tails.end());
  }
  return filter;
}

std::vector<Query> queries_from_split(const KnowledgeGraph& kg, Split split) {
  if (!kg.reverse_augmented()) {
    throw Error("queries require a reverse-augmented graph");
  }
  std::vector<Query> queries;
  queries.reserve(kg.triples(split).size());
  for (const Triple& triple : kg.triples(split)) {
    queries.push_back(Query{triple.head, triple.relation, triple.tail});
  }
  return queries;
}

}  // namespace kgcert
