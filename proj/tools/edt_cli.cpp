// edt: train, decode, score and run experiments for the joint entity
// detection and tracking model.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "laso/edt/config.hpp"
#include "laso/edt/corpus.hpp"
#include "laso/edt/experiments.hpp"
#include "laso/edt/mining.hpp"
#include "laso/edt/model_io.hpp"
#include "laso/edt/scorer.hpp"
#include "laso/edt/synthetic.hpp"
#include "laso/edt/training.hpp"

namespace fs = std::filesystem;
using namespace laso;
using namespace laso::edt;

namespace {

// Flag overrides layered over the config file.
struct overrides {
  std::string config;
  std::optional<std::size_t> beam, passes, max_length;
  std::optional<std::uint32_t> cutoff;
  std::optional<double> c;
  std::optional<std::uint64_t> seed;
  std::string mode, linkage, comp;
  std::vector<std::string> classes;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config, "run config (JSON)");
    app->add_option("--beam", beam, "beam size, 0 for unbounded");
    app->add_option("--passes", passes, "training passes");
    app->add_option("--max-length", max_length, "longest mention in tokens");
    app->add_option("--cutoff", cutoff, "feature count cutoff");
    app->add_option("--C", c, "update step constant");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--mode", mode, "joint | pipeline-detect | pipeline-coref | coref-gold-mentions");
    app->add_option("--linkage", linkage, "all-pairs | average | max | min | first | last | intelligent");
    app->add_option("--compensation", comp, "gated | head-start | none");
    app->add_option("--classes", classes, "enabled feature classes");
  }

  run_config resolve() const {
    run_config cfg = config.empty() ? run_config{} : load_config(config);
    nlohmann::json j = nlohmann::json::object();
    if (beam) j["beam"] = *beam;
    if (passes) j["passes"] = *passes;
    if (max_length) j["max_length"] = *max_length;
    if (cutoff) j["cutoff"] = *cutoff;
    if (c) j["C"] = *c;
    if (seed) j["seed"] = *seed;
    if (!mode.empty()) j["mode"] = mode;
    if (!linkage.empty()) j["linkage"] = linkage;
    if (!comp.empty()) j["compensation"] = comp;
    if (!classes.empty()) j["classes"] = classes;
    merge_json(cfg, j);
    return cfg;
  }
};

std::vector<document> read_docs(const std::string& path, const inventory* inv = nullptr) {
  if (path.empty()) throw corpus_error("no corpus given");
  return read_corpus(fs::path(resolve_resource(path)), inv);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run_train(const overrides& o, const std::string& corpus, const std::string& model_path,
              const std::string& dump_path, bool quiet) {
  run_config cfg = o.resolve();
  if (!corpus.empty()) cfg.train = corpus;
  const auto inv = inventory(cfg.types, cfg.mention_types);
  const auto docs = read_docs(cfg.train, &inv);
  validate_gold_paths(docs, inv, cfg.max_length);
  auto res = std::make_shared<const resource_bundle>(load_resources(cfg.resources));
  train_options opts;
  if (!quiet)
    opts.on_pass = [](const pass_stats& s) {
      std::cerr << "pass " << s.pass << ": " << s.updates << " updates in " << s.documents_with_updates
                << " documents, " << s.seconds << "s\n";
    };
  train_report report;
  const auto m = train_model(cfg, res, docs, opts, &report);
  if (!quiet)
    std::cerr << "features: " << report.counted_features << " counted, " << report.active_features
              << " kept by the cutoff\n";
  save_model(fs::path(model_path), m);
  if (!dump_path.empty()) {
    std::ofstream out(dump_path);
    dump_weights(out, m);
  }
  return 0;
}

int run_decode(const std::string& model_path, const std::string& input, const std::string& output,
               std::optional<std::size_t> beam) {
  const auto m = load_model(fs::path(model_path));
  const auto docs = read_docs(input);
  const auto preds = predict_corpus(m, docs, beam);
  if (output.empty() || output == "-") write_corpus(std::cout, preds);
  else write_corpus(fs::path(output), preds);
  return 0;
}

int run_score(const std::string& pred, const std::string& ref, const std::string& costs_path, bool detection_only,
              const std::string& json_out, const std::string& csv_out) {
  cost_model costs;
  if (!costs_path.empty()) {
    run_config cfg;
    std::ifstream in(costs_path);
    if (!in) throw config_error("cannot read " + costs_path);
    merge_json(cfg, nlohmann::json{{"costs", nlohmann::json::parse(in)}});
    costs = cfg.costs;
  }
  const auto report = score_corpus(read_docs(pred), read_docs(ref), costs, detection_only);
  std::cout << report.table();
  if (!json_out.empty()) write_text(json_out, report.to_json().dump(2) + "\n");
  if (!csv_out.empty()) {
    std::ostringstream csv;
    csv << "type,system,reference,correct,precision,recall,f1\n";
    auto row = [&](const std::string& t, const prf& p) {
      csv << t << "," << p.system << "," << p.reference << "," << p.correct << "," << p.precision() << ","
          << p.recall() << "," << p.f1() << "\n";
    };
    for (const auto& [t, p] : report.by_type) row(t, p);
    row("all", report.mentions);
    csv << "ace_like,,,,,," << report.score() << "\n";
    write_text(csv_out, csv.str());
  }
  return 0;
}

split load_split(const run_config& cfg, const std::string& corpus) {
  const auto inv = inventory(cfg.types, cfg.mention_types);
  auto docs = read_docs(corpus.empty() ? cfg.train : corpus, &inv);
  validate_gold_paths(docs, inv, cfg.max_length);
  if (!cfg.test.empty()) return {std::move(docs), read_docs(cfg.test, &inv)};
  return split_corpus(docs, cfg.seed);
}

int run_ablate(const overrides& o, const std::string& corpus, const std::string& csv_out) {
  run_config cfg = o.resolve();
  if (o.mode.empty() && cfg.mode == run_mode::joint) cfg.mode = run_mode::coref_gold_mentions;
  auto res = std::make_shared<const resource_bundle>(load_resources(cfg.resources));
  const auto result = ablate(cfg, load_split(cfg, corpus), default_evaluator(res));
  std::cout << result.table();
  if (!csv_out.empty()) write_text(csv_out, result.csv());
  return 0;
}

int run_linkage(const overrides& o, const std::string& corpus, const std::string& csv_out) {
  run_config cfg = o.resolve();
  if (o.mode.empty() && cfg.mode == run_mode::joint) cfg.mode = run_mode::coref_gold_mentions;
  auto res = std::make_shared<const resource_bundle>(load_resources(cfg.resources));
  const auto result = compare_linkages(cfg, load_split(cfg, corpus), default_evaluator(res));
  std::cout << result.table();
  if (!csv_out.empty()) write_text(csv_out, result.csv());
  return 0;
}

int run_mine(const std::string& corpus, const std::string& which, const std::string& output, std::size_t top) {
  const auto docs = read_docs(corpus);
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output.empty() && output != "-") {
    file.open(output);
    if (!file) throw std::runtime_error("cannot write " + output);
    out = &file;
  }
  if (which == "patterns") {
    write_patterns(*out, mine_patterns(docs, top ? top : 20));
  } else if (which == "collocations") {
    write_collocations(*out, mine_collocations(docs, top ? top : 100));
  } else if (which == "gender-number") {
    const auto mined = mine_gender_number(docs);
    write_gender_number(*out, mined);
    std::cerr << mined.entries.size() << " words kept, " << mined.dropped.size() << " dropped as ambiguous\n";
  } else {
    throw std::invalid_argument("unknown resource '" + which + "'");
  }
  return 0;
}

int run_generate(const synthetic_params& p, const std::string& output, const std::string& resources_dir,
                 const std::string& config_out) {
  const synthetic_world world(p.types, p.world_seed);
  const auto docs = generate_synthetic(world, p);
  write_corpus(fs::path(output), docs);
  if (resources_dir.empty()) return 0;
  const auto files = world.write_resources(resources_dir);
  if (config_out.empty()) return 0;
  run_config cfg;
  cfg.train = output;
  cfg.types.clear();
  for (const auto& t : p.types) cfg.types.push_back({t, {}});
  cfg.max_length = 4;
  for (const auto& [kind, path] : files) {
    if (kind.rfind("gazetteer:", 0) == 0) cfg.resources.gazetteers[kind.substr(10)] = path.string();
    else if (kind == "knowledge") cfg.resources.knowledge = path.string();
    else if (kind == "gender_number") cfg.resources.gender_number = path.string();
    else if (kind == "clusters") cfg.resources.clusters = path.string();
  }
  write_text(config_out, to_json(cfg).dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint entity detection and tracking with learning as search optimization"};
  app.require_subcommand(1);

  overrides train_o;
  std::string train_corpus, model_path = "model.bin", dump_path;
  bool quiet = false;
  auto* train = app.add_subcommand("train", "train a model");
  train_o.attach(train);
  train->add_option("--train", train_corpus, "training corpus (overrides the config)");
  train->add_option("-m,--model", model_path, "output model file");
  train->add_option("--dump", dump_path, "also write 'feature TAB weight' lines here");
  train->add_flag("-q,--quiet", quiet, "no progress output");

  std::string decode_model, decode_in, decode_out;
  std::optional<std::size_t> decode_beam;
  auto* decode_cmd = app.add_subcommand("decode", "label a corpus with a trained model");
  decode_cmd->add_option("-m,--model", decode_model, "model file")->required();
  decode_cmd->add_option("-i,--input", decode_in, "input corpus")->required();
  decode_cmd->add_option("-o,--output", decode_out, "predictions (default stdout)");
  decode_cmd->add_option("--beam", decode_beam, "beam size, 0 for unbounded");

  std::string score_pred, score_ref, score_costs, score_json, score_csv;
  bool detection_only = false;
  auto* score = app.add_subcommand("score", "score predictions against a reference corpus");
  score->add_option("-p,--predictions", score_pred, "system corpus")->required();
  score->add_option("-r,--reference", score_ref, "reference corpus")->required();
  score->add_option("--costs", score_costs, "JSON cost overrides");
  score->add_flag("--detection-only", detection_only, "treat every mention as its own entity");
  score->add_option("--json", score_json, "write the report as JSON");
  score->add_option("--csv", score_csv, "write the per-type table as CSV");

  overrides ablate_o;
  std::string ablate_corpus, ablate_csv;
  auto* ablate_cmd = app.add_subcommand("ablate", "greedy backward feature-class elimination");
  ablate_o.attach(ablate_cmd);
  ablate_cmd->add_option("--corpus", ablate_corpus, "annotated corpus (default: config train)");
  ablate_cmd->add_option("--csv", ablate_csv, "write the table as CSV");

  overrides link_o;
  std::string link_corpus, link_csv;
  auto* link = app.add_subcommand("linkage-compare", "train and score once per linkage type");
  link_o.attach(link);
  link->add_option("--corpus", link_corpus, "annotated corpus (default: config train)");
  link->add_option("--csv", link_csv, "write the table as CSV");

  std::string mine_corpus, mine_which, mine_out;
  std::size_t mine_top = 0;
  auto* mine = app.add_subcommand("mine-resources", "mine resource files from an annotated corpus");
  mine->add_option("--corpus", mine_corpus, "annotated corpus")->required();
  mine->add_option("--which", mine_which, "patterns | collocations | gender-number")
      ->required()
      ->check(CLI::IsMember({"patterns", "collocations", "gender-number"}));
  mine->add_option("-o,--output", mine_out, "output file (default stdout)");
  mine->add_option("--top", mine_top, "entries to keep");

  synthetic_params gp;
  std::string gen_out, gen_res, gen_cfg;
  auto* gen = app.add_subcommand("generate", "write a synthetic annotated corpus");
  gen->add_option("-o,--output", gen_out, "corpus file")->required();
  gen->add_option("--docs", gp.docs, "documents");
  gen->add_option("--seed", gp.seed, "corpus seed");
  gen->add_option("--world-seed", gp.world_seed, "lexicon seed");
  gen->add_option("--entity-rate", gp.entity_rate, "P(mention) at an open slot");
  gen->add_option("--reuse-rate", gp.reuse_rate, "P(existing entity | some entity exists)");
  gen->add_option("--pronoun-rate", gp.pronoun_rate, "share of reuses that are pronouns");
  gen->add_option("--nominal-rate", gp.nominal_rate, "share of other reuses that are nominals");
  gen->add_option("--ambiguous-rate", gp.ambiguous_rate, "P(ambiguous person/organization name)");
  gen->add_flag("--noise-pos", gp.noise_pos, "random part-of-speech tags");
  gen->add_option("--types", gp.types, "entity types");
  gen->add_option("--resources", gen_res, "also write the lexicon resources to this directory");
  gen->add_option("--config-out", gen_cfg, "also write a run config using those resources");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return run_train(train_o, train_corpus, model_path, dump_path, quiet);
    if (*decode_cmd) return run_decode(decode_model, decode_in, decode_out, decode_beam);
    if (*score) return run_score(score_pred, score_ref, score_costs, detection_only, score_json, score_csv);
    if (*ablate_cmd) return run_ablate(ablate_o, ablate_corpus, ablate_csv);
    if (*link) return run_linkage(link_o, link_corpus, link_csv);
    if (*mine) return run_mine(mine_corpus, mine_which, mine_out, mine_top);
    if (*gen) return run_generate(gp, gen_out, gen_res, gen_cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
