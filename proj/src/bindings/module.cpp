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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kgcert/certify.hpp"
#include "kgcert/checkpoint.hpp"
#include "kgcert/commands.hpp"
#include "kgcert/eval.hpp"
#include "kgcert/kg.hpp"
#include "kgcert/models.hpp"
#include "kgcert/stats.hpp"
#include "kgcert/train.hpp"

namespace py = pybind11;
using namespace kgcert;

namespace {

std::vector<double> entity_row(const EmbeddingModel& model, int64_t i) {
  model.check_entity(i);
  const auto row = model.entity(i);
  return {row.begin(), row.end()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Knowledge-graph embedding training with certified-robustness metrics";

  py::register_exception<ConfigError>(m, "ConfigurationError", PyExc_ValueError);

  py::enum_<Split>(m, "Split")
      .value("TRAIN", Split::kTrain)
      .value("VALID", Split::kValid)
      .value("TEST", Split::kTest);

  py::class_<Triple>(m, "Triple")
      .def(py::init<EntityId, RelationId, EntityId>())
      .def_readwrite("head", &Triple::head)
      .def_readwrite("relation", &Triple::relation)
      .def_readwrite("tail", &Triple::tail)
      .def("__repr__", [](const Triple& t) {
        return "Triple(" + std::to_string(t.head) + ", " + std::to_string(t.relation) +
               ", " + std::to_string(t.tail) + ")";
      });

  py::class_<Query>(m, "Query")
      .def(py::init<EntityId, RelationId, EntityId>())
      .def_readwrite("head", &Query::head)
      .def_readwrite("relation", &Query::relation)
      .def_readwrite("target", &Query::target);

  py::class_<KnowledgeGraph>(m, "KnowledgeGraph")
      .def_property_readonly("num_entities", &KnowledgeGraph::num_entities)
      .def_property_readonly("num_relations", &KnowledgeGraph::num_relations)
      .def_property_readonly("reverse_augmented", &KnowledgeGraph::reverse_augmented)
      .def("entity_names", &KnowledgeGraph::entity_names)
      .def("relation_names", &KnowledgeGraph::relation_names)
      .def("triples", &KnowledgeGraph::triples, py::arg("split"));

  py::class_<FilterIndex>(m, "FilterIndex")
      .def("tails", &FilterIndex::tails, py::arg("head"), py::arg("relation"))
      .def("contains", &FilterIndex::contains);

  m.def("load_triples", &load_triples, py::arg("path"), py::arg("separator") = '\t');
  m.def("load_dataset", &load_dataset, py::arg("train"), py::arg("valid") = py::none(),
        py::arg("test") = py::none(), py::arg("separator") = '\t');
  m.def("add_reverse_relations", &add_reverse_relations);
  m.def("build_filter_index", &build_filter_index);
  m.def("queries_from_split", &queries_from_split, py::arg("kg"), py::arg("split"));

  py::class_<EmbeddingModel>(m, "EmbeddingModel")
      .def_property_readonly("family",
                             [](const EmbeddingModel& model) {
                               return std::string(family_name(model.family));
                             })
      .def_readonly("dim", &EmbeddingModel::dim)
      .def_readonly("num_entities", &EmbeddingModel::num_entities)
      .def_readonly("num_relations", &EmbeddingModel::num_relations)
      .def_readonly("entity_table", &EmbeddingModel::entity_table)
      .def_readonly("relation_table", &EmbeddingModel::relation_table)
      .def_property_readonly("entity_cols", &EmbeddingModel::entity_cols)
      .def("entity", &entity_row, py::arg("index"));

  m.def(
      "init_model",
      [](const std::string& family, int32_t dim, int64_t num_entities,
         int64_t num_relations, uint64_t seed, double init_scale) {
        return init_model(family_from_string(family), dim, num_entities, num_relations,
                          seed, init_scale);
      },
      py::arg("family"), py::arg("dim"), py::arg("num_entities"),
      py::arg("num_relations"), py::arg("seed") = 0, py::arg("init_scale") = 0.1);

  m.def("score", &score);
  m.def("energy", &energy);
  m.def("score_head",
        [](const EmbeddingModel& model, const std::vector<double>& head, RelationId r,
           EntityId t) { return score_head(model, head, r, t); });
  m.def("score_all_tails",
        [](const EmbeddingModel& model, const std::vector<double>& head, RelationId r) {
          return score_all_tails(model, head, r);
        });
  m.def("grad_energy_head",
        [](const EmbeddingModel& model, const std::vector<double>& head, RelationId r,
           EntityId t) { return grad_energy_head(model, head, r, t); });

  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_property(
          "family",
          [](const TrainConfig& c) { return std::string(family_name(c.family)); },
          [](TrainConfig& c, const std::string& name) {
            c.family = family_from_string(name);
          })
      .def_readwrite("dim", &TrainConfig::dim)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("alpha", &TrainConfig::alpha)
      .def_readwrite("lambda_", &TrainConfig::lambda)
      .def_readwrite("perturb_prob", &TrainConfig::perturb_prob)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("init_scale", &TrainConfig::init_scale)
      .def_readwrite("label_smoothing", &TrainConfig::label_smoothing);

  py::class_<EpochLog>(m, "EpochLog")
      .def_readonly("epoch", &EpochLog::epoch)
      .def_readonly("loss_original", &EpochLog::loss_original)
      .def_readonly("loss_denoising", &EpochLog::loss_denoising)
      .def_readonly("loss_joint", &EpochLog::loss_joint)
      .def_readonly("sigma", &EpochLog::sigma);

  m.def("sigma_quantile", [](const std::vector<double>& table) {
    return sigma_quantile(table);
  });
  m.def(
      "train",
      [](const KnowledgeGraph& kg, const TrainConfig& config) {
        TrainResult result = train(kg, config);
        return py::make_tuple(std::move(result.model), std::move(result.log));
      },
      py::arg("kg"), py::arg("config"),
      "Trains a model on the train split; returns (model, epoch_log).");

  m.def("phi_inverse", &phi_inverse);
  m.def("normal_cdf", &normal_cdf);
  m.def("clopper_pearson_lcb", &clopper_pearson_lcb, py::arg("trials"),
        py::arg("successes"), py::arg("confidence"));

  py::class_<CertConfig>(m, "CertConfig")
      .def(py::init<>())
      .def_readwrite("n0", &CertConfig::n0)
      .def_readwrite("confidence", &CertConfig::confidence)
      .def_readwrite("sigma", &CertConfig::sigma)
      .def_readwrite("seed", &CertConfig::seed)
      .def_readwrite("threads", &CertConfig::threads);

  py::class_<CertificationRecord>(m, "CertificationRecord")
      .def_readonly("query_id", &CertificationRecord::query_id)
      .def_readonly("count", &CertificationRecord::count)
      .def_readonly("p_lower", &CertificationRecord::p_lower)
      .def_readonly("cr", &CertificationRecord::cr)
      .def_readonly("certified", &CertificationRecord::certified);

  py::class_<RobustnessReport>(m, "RobustnessReport")
      .def_readonly("acr", &RobustnessReport::acr)
      .def_readonly("acr_over_sigma", &RobustnessReport::acr_over_sigma)
      .def_readonly("ca_curve", &RobustnessReport::ca_curve)
      .def_readonly("ca0", &RobustnessReport::ca0)
      .def_readonly("num_queries", &RobustnessReport::num_queries)
      .def_readonly("sigma", &RobustnessReport::sigma);

  m.def(
      "certify_queries",
      [](const EmbeddingModel& model, const std::vector<Query>& queries,
         const FilterIndex& filter, const CertConfig& config) {
        return certify_queries(model, queries, filter, config);
      },
      py::arg("model"), py::arg("queries"), py::arg("filter"), py::arg("config"));
  m.def(
      "robustness_report",
      [](const EmbeddingModel& model, const std::vector<Query>& queries,
         const FilterIndex& filter, const CertConfig& config,
         const std::vector<double>& radii) {
        return robustness_report(model, queries, filter, config, radii);
      },
      py::arg("model"), py::arg("queries"), py::arg("filter"), py::arg("config"),
      py::arg("radii") = std::vector<double>{0.0});

  py::class_<EvalCondition>(m, "EvalCondition")
      .def(py::init<>())
      .def(py::init([](double alpha, uint64_t seed) {
             return EvalCondition{alpha, seed};
           }),
           py::arg("alpha") = 0.0, py::arg("seed") = 0)
      .def_readwrite("alpha", &EvalCondition::alpha)
      .def_readwrite("seed", &EvalCondition::seed);

  py::class_<RankingMetrics>(m, "RankingMetrics")
      .def_readonly("mrr", &RankingMetrics::mrr)
      .def_readonly("mr", &RankingMetrics::mr)
      .def_readonly("hits1", &RankingMetrics::hits1)
      .def_readonly("hits3", &RankingMetrics::hits3)
      .def_readonly("hits10", &RankingMetrics::hits10)
      .def_readonly("num_queries", &RankingMetrics::num_queries)
      .def_readonly("condition", &RankingMetrics::condition);

  m.def(
      "filtered_rank",
      [](const EmbeddingModel& model, const Query& query, const FilterIndex& filter) {
        return filtered_rank(model, query, filter);
      },
      py::arg("model"), py::arg("query"), py::arg("filter"));
  m.def(
      "link_prediction",
      [](const EmbeddingModel& model, const std::vector<Query>& queries,
         const FilterIndex& filter, const EvalCondition& condition) {
        return link_prediction(model, queries, filter, condition);
      },
      py::arg("model"), py::arg("queries"), py::arg("filter"),
      py::arg("condition") = EvalCondition{});

  py::class_<PathQuery>(m, "PathQuery")
      .def_readonly("anchor", &PathQuery::anchor)
      .def_readonly("relations", &PathQuery::relations)
      .def_readonly("answers", &PathQuery::answers)
      .def_property_readonly("hops", &PathQuery::hops);

  m.def("enumerate_path_queries", &enumerate_path_queries, py::arg("kg"),
        py::arg("split"), py::arg("hops"), py::arg("cap"), py::arg("seed") = 0);
  m.def(
      "answer_path_query",
      [](const EmbeddingModel& model, const PathQuery& query, int32_t beam) {
        PathScores scores = answer_path_query(model, query, beam);
        return py::make_tuple(scores.ranking, scores.final_scores);
      },
      py::arg("model"), py::arg("query"), py::arg("beam") = 32,
      "Returns (ranking, per-entity scores).");
  m.def(
      "multihop_metrics",
      [](const EmbeddingModel& model, const std::vector<PathQuery>& queries,
         int32_t beam) { return multihop_metrics(model, queries, beam); },
      py::arg("model"), py::arg("queries"), py::arg("beam") = 32);

  m.def("run_cli", &run_cli, py::arg("args"),
        "Runs a CLI command in-process; returns the exit code.");

#ifdef KGCERT_VERSION
  m.attr("__version__") = KGCERT_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
