// Python bindings for the core pipeline: knowledge graph loading, grounding,
// schema graph extraction/expansion, statement encoding, training and
// evaluation.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schemaqa/cli/stages.hpp"
#include "schemaqa/grounding/grounding.hpp"
#include "schemaqa/model/checkpoint.hpp"
#include "schemaqa/model/train.hpp"
#include "schemaqa/numerics/nn.hpp"
#include "schemaqa/text/encoders.hpp"
#include "schemaqa/text/statement.hpp"

namespace py = pybind11;
using namespace schemaqa;

namespace {

kg::Direction direction_from(const std::string& name) {
    if (name == "out") return kg::Direction::out;
    if (name == "in") return kg::Direction::in;
    if (name == "both") return kg::Direction::both;
    throw Error("direction must be 'out', 'in' or 'both'");
}

sgraph::EnumerateOptions options_for(std::size_t k, std::size_t cap) {
    sgraph::EnumerateOptions opts;
    opts.max_length = k;
    opts.per_pair_cap = cap;
    return opts;
}

model::TrainConfig config_from_dict(const py::dict& d) {
    py::object dumps = py::module_::import("json").attr("dumps");
    return model::TrainConfig::from_json(dumps(d).cast<std::string>());
}

struct TrainedModel {
    model::ModelParams params;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Knowledge-graph grounded commonsense QA pipeline";

    py::register_exception<Error>(m, "SchemaQaError");

    py::class_<kg::LoadOptions>(m, "LoadOptions")
        .def(py::init<>())
        .def_readwrite("language_prefix", &kg::LoadOptions::language_prefix)
        .def_readwrite("relation_allowlist", &kg::LoadOptions::relation_allowlist)
        .def_readwrite("min_weight", &kg::LoadOptions::min_weight);

    py::class_<kg::KnowledgeGraph>(m, "KnowledgeGraph")
        .def_property_readonly("num_concepts", &kg::KnowledgeGraph::num_concepts)
        .def_property_readonly("num_relations", &kg::KnowledgeGraph::num_relations)
        .def_property_readonly("num_triples", &kg::KnowledgeGraph::num_triples)
        .def("concept_name",
             [](const kg::KnowledgeGraph& g, std::uint32_t id) { return g.concept_name(id); })
        .def("find_concept",
             [](const kg::KnowledgeGraph& g, const std::string& name) {
                 return g.find_concept(name);
             })
        .def("has_isa", [](const kg::KnowledgeGraph& g) { return g.isa_relation().has_value(); })
        .def("neighbors",
             [](const kg::KnowledgeGraph& g, const std::string& concept_name,
                const std::string& direction) {
                 auto id = g.find_concept(concept_name);
                 if (!id.has_value()) throw Error("unknown concept: " + concept_name);
                 std::vector<py::tuple> out;
                 for (const auto& nb : g.neighbors(*id, direction_from(direction))) {
                     out.push_back(py::make_tuple(g.relation_name(nb.relation),
                                                  g.concept_name(nb.other), nb.weight,
                                                  nb.dir == kg::EdgeDir::forward ? "out" : "in"));
                 }
                 return out;
             },
             py::arg("concept"), py::arg("direction") = "both")
        .def("save_snapshot", &kg::KnowledgeGraph::save_snapshot);

    m.def("load_kg", &kg::load_kg_any, py::arg("path"), py::arg("options") = kg::LoadOptions{},
          "Load a knowledge graph from a TSV triple file or a binary snapshot");
    m.def("build_kg",
          [](const std::vector<std::array<std::string, 3>>& rows) { return kg::build_kg(rows); },
          py::arg("rows"), "Build a knowledge graph from (relation, head, tail) rows");

    m.def("lemmatize", &grounding::lemmatize);
    m.def("normalize", [](const std::string& text) {
        auto seq = grounding::normalize(text);
        return py::make_tuple(seq.tokens, seq.lemmas);
    });
    m.def("ground",
          [](const kg::KnowledgeGraph& g, const std::string& text, std::size_t max_ngram) {
              py::dict out;
              auto grounded = grounding::ground(g, text, max_ngram);
              for (auto id : grounded.concepts) {
                  auto span = grounded.spans.at(id);
                  out[py::str(g.concept_name(id))] = py::make_tuple(span.start, span.end);
              }
              return out;
          },
          py::arg("kg"), py::arg("text"), py::arg("max_ngram") = 4,
          "Ground text to concepts; returns {concept: (start, end)} token spans");
    m.def("ground_statement",
          [](const kg::KnowledgeGraph& g, const std::string& question, const std::string& choice,
             std::size_t max_ngram) {
              auto grounded = grounding::ground_statement(g, question, choice, max_ngram);
              return py::make_tuple(grounded.question_concepts, grounded.answer_concepts);
          },
          py::arg("kg"), py::arg("question"), py::arg("choice"), py::arg("max_ngram") = 4);

    py::class_<sgraph::SchemaGraph>(m, "SchemaGraph")
        .def_property_readonly("statement_ref",
                               [](const sgraph::SchemaGraph& sg) { return sg.statement_ref; })
        .def_property_readonly("truncated",
                               [](const sgraph::SchemaGraph& sg) { return sg.truncated; })
        .def_property_readonly("nodes",
                               [](const sgraph::SchemaGraph& sg) {
                                   std::vector<py::tuple> out;
                                   for (const auto& n : sg.nodes) {
                                       out.push_back(py::make_tuple(
                                           n.term, sgraph::origin_name(n.origin)));
                                   }
                                   return out;
                               })
        .def_property_readonly("edges",
                               [](const sgraph::SchemaGraph& sg) {
                                   std::vector<py::tuple> out;
                                   for (const auto& e : sg.edges) {
                                       out.push_back(py::make_tuple(
                                           e.head, e.relation, e.tail,
                                           e.dir == kg::EdgeDir::forward ? 0 : 1));
                                   }
                                   return out;
                               })
        .def_property_readonly("paths",
                               [](const sgraph::SchemaGraph& sg) {
                                   std::vector<std::vector<std::uint32_t>> out;
                                   for (const auto& p : sg.paths) out.push_back(p.nodes);
                                   return out;
                               })
        .def("to_json", [](const sgraph::SchemaGraph& sg, const std::string& id,
                           const std::string& label) {
            return sgraph::schema_graph_to_json(sg, id, label);
        });

    m.def("enumerate_paths",
          [](const kg::KnowledgeGraph& g, const std::vector<std::string>& sources,
             const std::vector<std::string>& targets, std::size_t k, std::size_t cap) {
              std::vector<kg::ConceptId> src;
              std::vector<kg::ConceptId> tgt;
              for (const auto& s : sources) {
                  if (auto id = g.find_concept(s)) src.push_back(*id);
              }
              for (const auto& t : targets) {
                  if (auto id = g.find_concept(t)) tgt.push_back(*id);
              }
              auto result = sgraph::enumerate_paths(g, src, tgt, options_for(k, cap));
              std::vector<py::dict> out;
              for (const auto& p : result.paths) {
                  py::dict d;
                  std::vector<std::string> names;
                  for (auto id : p.nodes) names.push_back(g.concept_name(id));
                  std::vector<py::tuple> edges;
                  for (const auto& e : p.edges) {
                      edges.push_back(py::make_tuple(
                          g.relation_name(e.relation),
                          e.dir == kg::EdgeDir::forward ? "out" : "in"));
                  }
                  d["nodes"] = names;
                  d["edges"] = edges;
                  out.push_back(std::move(d));
              }
              return out;
          },
          py::arg("kg"), py::arg("sources"), py::arg("targets"), py::arg("k") = 2,
          py::arg("per_pair_cap") = 100);

    m.def("extract_schema_graph",
          [](const kg::KnowledgeGraph& g, const std::vector<std::string>& question_concepts,
             const std::vector<std::string>& answer_concepts, const std::string& statement_ref,
             std::size_t k, std::size_t cap) {
              return sgraph::extract_schema_graph(g, question_concepts, answer_concepts,
                                                  statement_ref, options_for(k, cap));
          },
          py::arg("kg"), py::arg("question_concepts"), py::arg("answer_concepts"),
          py::arg("statement_ref") = "py#A", py::arg("k") = 2, py::arg("per_pair_cap") = 100);
    m.def("expand_schema_graph", &sgraph::expand_schema_graph, py::arg("kg"), py::arg("graph"),
          py::arg("seed"));

    m.def("make_statement", &text::make_statement, py::arg("question_text"),
          py::arg("choice_text"));

    py::class_<text::TextEncoder>(m, "TextEncoder")
        .def_property_readonly("dimension", &text::TextEncoder::dimension)
        .def("encode", [](const text::TextEncoder& enc, const std::string& s) {
            return enc.encode(s).data;
        });
    py::class_<text::HashedBagOfWords, text::TextEncoder>(m, "HashedBagOfWords")
        .def(py::init<std::size_t>(), py::arg("dimension"));
    py::class_<text::FileEmbeddings, text::TextEncoder>(m, "FileEmbeddings")
        .def(py::init<const std::string&>(), py::arg("path"))
        .def_property_readonly("vocabulary_size", &text::FileEmbeddings::vocabulary_size);

    m.def("sigmoid", &numerics::sigmoid);
    m.def("softmax", [](const std::vector<double>& v) {
        return numerics::softmax(numerics::Tensor::vector(v)).data;
    });

    py::class_<model::DatasetSplit>(m, "DatasetSplit")
        .def("__len__", &model::DatasetSplit::size)
        .def_property_readonly("has_answer_keys", &model::DatasetSplit::has_answer_keys);
    m.def("load_dataset", &model::load_dataset, py::arg("path"));
    m.def("parse_dataset", &model::parse_dataset, py::arg("jsonl"),
          py::arg("origin") = "inline");

    py::class_<TrainedModel>(m, "TrainedModel")
        .def("save", [](TrainedModel& tm, const std::string& path) {
            model::save_checkpoint(path, tm.params);
        })
        .def("evaluate",
             [](const TrainedModel& tm, const model::DatasetSplit& split,
                const kg::KnowledgeGraph& g) {
                 auto result = model::evaluate(tm.params, split, g, tm.params.config);
                 std::vector<py::tuple> preds;
                 for (const auto& p : result.predictions) {
                     preds.push_back(py::make_tuple(p.question_id, p.predicted_label, p.correct));
                 }
                 return py::make_tuple(result.accuracy, preds);
             })
        .def_property_readonly("config_json", [](const TrainedModel& tm) {
            return tm.params.config.to_json();
        });

    m.def("train",
          [](const model::DatasetSplit& train_split, const model::DatasetSplit& dev_split,
             const kg::KnowledgeGraph& g, const py::dict& config) {
              auto cfg = config_from_dict(config);
              auto result = model::train(train_split, dev_split, g, cfg);
              TrainedModel tm{std::move(result.params)};
              std::vector<py::dict> log;
              for (const auto& e : result.log) {
                  py::dict d;
                  d["epoch"] = e.epoch;
                  d["train_loss"] = e.train_loss;
                  d["dev_accuracy"] = e.dev_accuracy;
                  d["best_so_far"] = e.best_so_far;
                  log.push_back(std::move(d));
              }
              return py::make_tuple(tm, log, result.best_epoch);
          },
          py::arg("train_split"), py::arg("dev_split"), py::arg("kg"), py::arg("config"));
    m.def("load_checkpoint", [](const std::string& path) {
        return TrainedModel{model::load_checkpoint(path)};
    });

    m.def("run_selftest", &cli::run_selftest, py::arg("seed") = 42,
          "Run the built-in oracle and gradient checks; returns the failure count");

    m.attr("__version__") = "0.1.0";
}
