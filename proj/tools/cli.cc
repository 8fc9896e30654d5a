// Copyright 2026 The kgre Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "kgre/checkpoint.h"
#include "kgre/config.h"
#include "kgre/document.h"
#include "kgre/error.h"
#include "kgre/eval.h"
#include "kgre/experiment.h"
#include "kgre/gradcheck_suite.h"
#include "kgre/kg_store.h"
#include "kgre/sampler.h"
#include "kgre/synth.h"
#include "kgre/ultra.h"

namespace kgre::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOptions {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<size_t> threads;
  std::vector<std::string> assignments;
  std::string split = "test";
  std::string out;
};

void AddRunOptions(CLI::App* cmd, RunOptions& o, bool with_split) {
  cmd->add_option("--config,-c", o.config, "experiment config file")->required();
  cmd->add_option("--seed", o.seed, "overrides train.seed");
  cmd->add_option("--threads", o.threads, "worker threads (fallback: KGRE_THREADS, then 1)");
  cmd->add_option("--set", o.assignments, "config override key=value (repeatable)");
  if (with_split) {
    cmd->add_option("--split", o.split, "train, dev or test")->capture_default_str();
    cmd->add_option("--out,-o", o.out, "predictions file (default: output.predictions)");
  }
}

size_t ResolveThreads(const std::optional<size_t>& flag) {
  if (flag) {
    if (*flag == 0) throw UsageError("--threads must be positive");
    return *flag;
  }
  if (const char* env = std::getenv("KGRE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0) {
      throw UsageError(std::string("KGRE_THREADS must be a positive integer, got '") + env + "'");
    }
    return static_cast<size_t>(v);
  }
  return 1;
}

ExperimentConfig LoadRunConfig(const RunOptions& o) {
  Config config = Config::LoadFile(o.config);
  for (const std::string& a : o.assignments) config.SetAssignment(a);
  if (o.seed) config.Set("train.seed", std::to_string(*o.seed));
  ExperimentConfig e = ParseExperimentConfig(config);
  if (o.threads || !config.Has("train.threads")) e.training.threads = ResolveThreads(o.threads);
  return e;
}

std::vector<std::string> SplitList(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void WritePredictionsFile(const std::filesystem::path& path,
                          const std::vector<ScoredTriple>& preds) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write predictions: " + path.string());
  WritePredictions(out, preds);
}

LabeledTripleSet ReadTripleFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return ToTripleSet(ReadPredictions(in));
}

LabeledTripleSet GoldTriples(const Split& split, const std::vector<std::string>& ids) {
  LabeledTripleSet out;
  for (const PreparedDocument& doc : split.docs) {
    for (const PreparedPair& p : doc.pairs) {
      for (uint32_t r : p.gold) {
        out.insert({doc.doc->id, doc.doc->entities[p.subject], doc.doc->entities[p.object],
                    ids.at(r)});
      }
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> Metrics(const LabeledTripleSet& preds,
                                                    const LabeledTripleSet& gold,
                                                    const LabeledTripleSet& ignore,
                                                    const std::vector<std::string>& classes) {
  const Prf micro = MicroPrf(preds, gold);
  const Prf ign = MicroPrf(preds, gold, ignore);
  std::vector<std::pair<std::string, double>> m = {
      {"precision", micro.precision}, {"recall", micro.recall}, {"f1", micro.f1},
      {"ign_f1", ign.f1}};
  if (!classes.empty()) m.emplace_back("macro_f1", MacroF1(preds, gold, classes));
  return m;
}

int Ingest(const std::string& kg_path, const std::string& relations_path,
           const std::vector<std::string>& docs, const std::string& out_path, std::ostream& out) {
  KnowledgeGraph graph = KnowledgeGraph::LoadFile(kg_path);
  out << "entities=" << graph.entity_count() << "\n";
  out << "relations=" << graph.relation_count() << "\n";
  out << "triples=" << graph.triples().size() << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write " + out_path);
    WriteTriples(f, graph);
  }
  if (!relations_path.empty()) {
    auto relations = LoadRelationMetaFile(relations_path);
    out << "extraction_relations=" << relations.size() << "\n";
    const KnowledgeGraph augmented = graph.WithInverseRelations();
    for (const std::string& file : docs) {
      auto loaded = LoadDocuments(file, augmented, relations);
      size_t pairs = 0, linked = 0, entities = 0;
      for (const DocumentInstance& d : loaded) {
        pairs += d.pairs.size();
        entities += d.entities.size();
        for (const auto& link : d.links) linked += link.has_value();
      }
      out << file << ": documents=" << loaded.size() << " pairs=" << pairs
          << " entities=" << entities << " linked=" << linked << "\n";
    }
  } else if (!docs.empty()) {
    throw UsageError("--docs needs --relations");
  }
  return kExitOk;
}

int Sample(const std::string& kg_path, const std::string& anchors, uint64_t seed,
           uint32_t hop_cap, uint32_t hops, bool relation_graph, const std::string& relations,
           uint32_t support_samples, double support_threshold, const std::string& out_path,
           std::ostream& out) {
  KnowledgeGraph graph = KnowledgeGraph::LoadFile(kg_path).WithInverseRelations();
  NeighborhoodOptions options{hop_cap, hops};
  std::string text;
  if (relation_graph) {
    std::vector<RelationId> ids;
    for (const std::string& name : SplitList(relations)) {
      auto id = graph.relations().Find(name);
      if (!id) throw Error("unknown relation " + name);
      ids.push_back(*id);
    }
    RelationGraph rg;
    if (ids.empty()) {
      rg = BuildRelationGraph(graph);
    } else {
      SupportOptions support;
      support.samples_per_relation = support_samples;
      support.keep_threshold = support_threshold;
      support.neighborhood = options;
      rg = FilterSupportGraph(graph, ids, seed, support);
    }
    text = SerializeRelationGraph(rg, &graph);
  } else {
    std::vector<std::optional<EntityId>> ids;
    for (const std::string& name : SplitList(anchors)) {
      auto id = graph.entities().Find(name);
      ids.push_back(id);
    }
    if (ids.empty()) throw UsageError("--anchors needs at least one entity");
    text = SerializeSubgraph(BuildDocumentSubgraph(graph, ids, seed, options), graph);
  }
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path);
    if (!f) throw Error("cannot write " + out_path);
    f << text;
  }
  return kExitOk;
}

int Train(const RunOptions& o, std::ostream& out) {
  Experiment experiment(LoadRunConfig(o));
  auto model = experiment.BuildModel();
  TrainResult result = experiment.Train(*model, &out);
  out << "best_epoch=" << result.best_epoch << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", result.best_score);
  out << "best_score=" << buf << "\n";
  return kExitOk;
}

int Predict(const RunOptions& o, bool post_prediction, bool report, std::ostream& out) {
  ExperimentConfig config = LoadRunConfig(o);
  if (post_prediction) config.model.post_prediction = true;
  Experiment experiment(config);
  auto model = experiment.BuildModel();
  experiment.LoadCheckpoint(*model);
  Split split = experiment.MakeSplit(*model, o.split);
  Evaluation eval = Evaluate(*model, split, experiment.relation_ids(), config.training.threads);

  if (post_prediction) {
    size_t added = 0, skipped = 0;
    for (const PreparedDocument& doc : split.docs) {
      Tape tape;
      DocumentLogits logits = model->Forward(tape, doc, split.candidates);
      added += logits.added_edges;
      skipped += logits.skipped_predictions;
    }
    out << "added_edges=" << added << "\n";
    out << "skipped_predictions=" << skipped << "\n";
  }
  std::filesystem::path path = o.out.empty() ? config.predictions : std::filesystem::path(o.out);
  if (!path.empty()) WritePredictionsFile(path, eval.predictions);
  out << "predictions=" << eval.predictions.size() << "\n";
  if (report) {
    LabeledTripleSet ignore;
    if (config.model.task == Task::kSupervised && o.split != "train" && !config.train.empty()) {
      ignore = GoldTriples(experiment.MakeSplit(*model, "train"), experiment.relation_ids());
    }
    std::vector<std::string> classes;
    for (uint32_t c : split.candidates) classes.push_back(experiment.relation_ids()[c]);
    if (classes.empty()) classes = experiment.relation_ids();
    out << FormatResults(Metrics(ToTripleSet(eval.predictions), eval.gold, ignore, classes));
  }
  return kExitOk;
}

int EvalFiles(const std::string& pred, const std::string& gold, const std::string& ignore,
              const std::string& classes, std::ostream& out) {
  const LabeledTripleSet preds = ReadTripleFile(pred);
  const LabeledTripleSet golds = ReadTripleFile(gold);
  const LabeledTripleSet ignored = ignore.empty() ? LabeledTripleSet{} : ReadTripleFile(ignore);
  std::vector<std::string> cls = SplitList(classes);
  if (cls.empty()) {
    std::set<std::string> seen;
    for (const auto& t : golds) seen.insert(t.relation);
    for (const auto& t : preds) seen.insert(t.relation);
    cls.assign(seen.begin(), seen.end());
  }
  out << FormatResults(Metrics(preds, golds, ignored, cls));
  return kExitOk;
}

int GradCheck(size_t seeds, uint64_t base_seed, double tolerance, const std::string& only,
              std::ostream& out) {
  std::vector<std::string> names =
      only.empty() ? GradientCheckNames() : std::vector<std::string>{only};
  size_t failures = 0;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-26s %10s %14s  %s\n", "check", "seeds", "max_rel_error",
                "status");
  out << buf;
  for (const std::string& name : names) {
    double worst = 0.0;
    for (uint64_t s = base_seed; s < base_seed + seeds; ++s) {
      worst = std::max(worst, RunGradientCheck(name, s));
    }
    const bool ok = worst < tolerance;
    failures += !ok;
    std::snprintf(buf, sizeof(buf), "%-26s %10zu %14.3e  %s\n", name.c_str(), seeds, worst,
                  ok ? "ok" : "FAIL");
    out << buf;
  }
  out << "failures=" << failures << "\n";
  return failures == 0 ? kExitOk : kExitFailure;
}

}  // namespace

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"kgre: knowledge-graph enhanced relation extraction"};
  app.name("kgre");
  app.require_subcommand(1);

  std::string kg, relations, out_path, anchors, pred, gold, ignore, classes, only, kind;
  std::vector<std::string> docs;
  uint64_t seed = 0;
  uint32_t hop_cap = 100, hops = 2, support_samples = 1000;
  double support_threshold = 0.10, tolerance = 1e-4;
  bool relation_graph = false;
  size_t seeds = 5;
  SynthOptions synth;
  RunOptions run;

  auto* ingest = app.add_subcommand("ingest", "load and validate a knowledge graph and documents");
  ingest->add_option("--kg", kg, "triple file")->required();
  ingest->add_option("--relations", relations, "relation metadata file");
  ingest->add_option("--docs", docs, "document files");
  ingest->add_option("--out,-o", out_path, "write the deduplicated triples here");

  auto* sample = app.add_subcommand("sample", "print a document subgraph or a relation graph");
  sample->add_option("--kg", kg, "triple file")->required();
  sample->add_option("--anchors", anchors, "comma-separated entity names");
  sample->add_option("--seed", seed, "sampling seed");
  sample->add_option("--hop-cap", hop_cap, "edges per node, direction and hop")->capture_default_str();
  sample->add_option("--hops", hops, "expansion depth")->capture_default_str();
  sample->add_flag("--relation-graph", relation_graph, "print the relation graph instead");
  sample->add_option("--relations", relations, "relations whose triples seed the support filter");
  sample->add_option("--support-samples", support_samples)->capture_default_str();
  sample->add_option("--support-threshold", support_threshold)->capture_default_str();
  sample->add_option("--out,-o", out_path, "output file (default: stdout)");

  auto* train = app.add_subcommand("train", "train a model from a config file");
  AddRunOptions(train, run, false);
  auto* predict = app.add_subcommand("predict", "write predictions for a split");
  AddRunOptions(predict, run, true);
  auto* eval = app.add_subcommand("eval", "score predictions (files or a trained model)");
  eval->add_option("--config,-c", run.config, "experiment config file");
  eval->add_option("--seed", run.seed, "overrides train.seed");
  eval->add_option("--threads", run.threads, "worker threads");
  eval->add_option("--set", run.assignments, "config override key=value");
  eval->add_option("--split", run.split, "train, dev or test")->capture_default_str();
  eval->add_option("--pred", pred, "predictions TSV");
  eval->add_option("--gold", gold, "gold TSV (doc, subject, object, relation)");
  eval->add_option("--ignore", ignore, "triples excluded for Ign-F1");
  eval->add_option("--classes", classes, "comma-separated classes for macro F1");
  auto* postpredict =
      app.add_subcommand("postpredict", "predict with text predictions added to the graph");
  AddRunOptions(postpredict, run, true);

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  gradcheck->add_option("--seeds", seeds, "random seeds per check")->capture_default_str();
  gradcheck->add_option("--seed", seed, "first seed");
  gradcheck->add_option("--tolerance", tolerance, "max relative error")->capture_default_str();
  gradcheck->add_option("--only", only, "run a single check");

  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic fixture");
  synth_cmd->add_option("--kind", synth.kind, "linkpred, doclevel or zeroshot")->required();
  synth_cmd->add_option("--out,-o", out_path, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "generator seed")->capture_default_str();
  synth_cmd->add_option("--entities", synth.entities, "linkpred entities")->capture_default_str();
  synth_cmd->add_option("--documents", synth.documents, "doclevel documents")->capture_default_str();
  synth_cmd->add_option("--examples", synth.examples_per_relation,
                        "zeroshot examples per relation")->capture_default_str();
  synth_cmd->add_option("--width", synth.width, "encoder width")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) return Ingest(kg, relations, docs, out_path, out);
    if (sample->parsed()) {
      if (!relation_graph && anchors.empty()) throw UsageError("sample needs --anchors");
      return Sample(kg, anchors, seed, hop_cap, hops, relation_graph, relations,
                    support_samples, support_threshold, out_path, out);
    }
    if (train->parsed()) return Train(run, out);
    if (predict->parsed()) return Predict(run, false, false, out);
    if (postpredict->parsed()) return Predict(run, true, true, out);
    if (eval->parsed()) {
      if (!run.config.empty()) {
        if (!pred.empty() || !gold.empty()) throw UsageError("use either --config or --pred/--gold");
        return Predict(run, false, true, out);
      }
      if (pred.empty() || gold.empty()) throw UsageError("eval needs --config or --pred and --gold");
      return EvalFiles(pred, gold, ignore, classes, out);
    }
    if (gradcheck->parsed()) {
      if (seeds == 0) throw UsageError("--seeds must be positive");
      return GradCheck(seeds, gradcheck->count("--seed") ? seed : 1, tolerance, only, out);
    }
    if (synth_cmd->parsed()) {
      SynthSummary s = GenerateFixture(synth, out_path);
      out << "files=" << s.files.size() << "\n";
      out << "triples=" << s.triples << "\n";
      out << "documents=" << s.documents << "\n";
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace kgre::cli
