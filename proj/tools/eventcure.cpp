// eventcure: generate synthetic albums, train the three predictors, run the
// fusion loop and emit evaluation reports.
//
// Exit codes: 0 success, 1 usage error, 2 data or model error, 3 internal
// invariant violation.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eventcure/error.hpp"
#include "eventcure/model_io.hpp"
#include "eventcure/pipeline.hpp"

namespace fs = std::filesystem;
using eventcure::Error;
using eventcure::ErrorKind;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::string kImageModelFile = "image-event.json";
const std::string kSequenceModelFile = "sequence-event.json";
const std::string kImportanceModelFile = "importance.json";

struct Options {
  std::string manifest;
  std::string out;
  std::string models;
  std::string synth_config;
  std::string which;
  std::string method;
  std::string split = "test";
  std::string confusion;
  std::string mapping;
  std::string policy = "assume-correct";
  std::uint64_t seed = 1;
  double alpha = 1.0;
  double mask_fraction = 0.5;
  std::size_t max_iters = 10;
  double tol = 1e-4;
  std::vector<double> t_list = eventcure::kDefaultTList;
  std::optional<double> learning_rate;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<long> hidden;
  bool force = false;
};

// Outputs are gathered first and written together at the end of a command.
class OutputSet {
 public:
  OutputSet(fs::path dir, bool force) : dir_(std::move(dir)), force_(force) {}

  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void check_writable(const std::string& name) const {
    if (!force_ && fs::exists(dir_ / name)) {
      throw UsageError((dir_ / name).string() + " already exists; pass --force to overwrite");
    }
  }

  void commit() const {
    for (const auto& [name, content] : files_) check_writable(name);
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& [name, content] : files_) {
      std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw Error(ErrorKind::IoError, "cannot write " + (dir_ / name).string());
    }
  }

  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  bool force_;
  std::vector<std::pair<std::string, std::string>> files_;
};

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

eventcure::DatasetManifest read_manifest(const Options& opt) {
  require(opt.manifest, "--manifest");
  return eventcure::load_manifest(opt.manifest);
}

eventcure::FusionConfig fusion_config(const Options& opt) {
  eventcure::FusionConfig cfg;
  cfg.alpha = opt.alpha;
  cfg.mask_fraction = opt.mask_fraction;
  cfg.max_iters = opt.max_iters;
  cfg.tol = opt.tol;
  cfg.validate();
  return cfg;
}

eventcure::PredictorConfigs predictor_configs(const Options& opt) {
  eventcure::PredictorConfigs cfg;
  for (auto* train : {&cfg.image, &cfg.sequence, &cfg.importance}) {
    if (opt.learning_rate) train->learning_rate = *opt.learning_rate;
    if (opt.epochs) train->epochs = *opt.epochs;
    if (opt.batch_size) train->batch_size = *opt.batch_size;
    if (opt.hidden) train->hidden = *opt.hidden;
  }
  cfg.set_seed(eventcure::derive_seed(opt.seed, "train"));
  return cfg;
}

eventcure::TrainedPredictors load_predictors(const Options& opt) {
  require(opt.models, "--models");
  const fs::path dir = opt.models;
  return {eventcure::load_image_event_model(dir / kImageModelFile),
          eventcure::load_sequence_event_model(dir / kSequenceModelFile),
          eventcure::load_importance_model(dir / kImportanceModelFile)};
}

std::vector<const eventcure::AlbumRecord*> albums_of(const eventcure::DatasetManifest& manifest,
                                                     const std::string& split) {
  auto albums = manifest.split(eventcure::parse_split(split));
  if (albums.empty()) throw Error(ErrorKind::EmptySplit, "split '" + split + "' has no albums");
  return albums;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

int cmd_synth(const Options& opt) {
  require(opt.out, "--out");
  eventcure::SynthConfig cfg;
  if (!opt.synth_config.empty()) cfg = eventcure::synth_config_from_json(eventcure::load_json(opt.synth_config));
  cfg.seed = eventcure::derive_seed(opt.seed, "synth");
  const auto manifest = eventcure::generate(cfg);

  OutputSet outputs(opt.out, opt.force);
  outputs.check_writable("manifest.json");
  outputs.check_writable("synth_config.json");
  outputs.add("synth_config.json", eventcure::to_json(cfg).dump(2) + "\n");
  outputs.commit();
  eventcure::save_manifest(manifest, outputs.dir() / "manifest.json");
  std::cout << "wrote " << manifest.albums.size() << " albums to " << (outputs.dir() / "manifest.json").string()
            << "\n";
  return 0;
}

int cmd_train(const Options& opt) {
  require(opt.out, "--out");
  require(opt.which, "--which");
  const auto manifest = read_manifest(opt);
  const auto cfg = predictor_configs(opt);
  OutputSet outputs(opt.out, opt.force);
  json doc;
  std::string name;
  if (opt.which == "image-event") {
    doc = eventcure::to_json(eventcure::train_image_event(manifest, cfg.image));
    name = kImageModelFile;
  } else if (opt.which == "sequence-event") {
    doc = eventcure::to_json(eventcure::train_sequence_event(manifest, cfg.sequence));
    name = kSequenceModelFile;
  } else if (opt.which == "importance") {
    doc = eventcure::to_json(eventcure::train_importance(manifest, cfg.importance));
    name = kImportanceModelFile;
  } else {
    throw UsageError("--which must be image-event, sequence-event or importance");
  }
  outputs.check_writable(name);
  outputs.add(name, doc.dump() + "\n");
  outputs.commit();
  std::cout << "wrote " << (outputs.dir() / name).string() << "\n";
  return 0;
}

int cmd_fuse(const Options& opt) {
  require(opt.out, "--out");
  const auto manifest = read_manifest(opt);
  const auto predictors = load_predictors(opt);
  const auto cfg = fusion_config(opt);
  const auto albums = albums_of(manifest, opt.split);
  const auto inputs = eventcure::compute_fusion_inputs(predictors, albums);

  json results = json::array();
  json dumped = json::array();
  for (std::size_t a = 0; a < albums.size(); ++a) {
    results.push_back(eventcure::to_json(albums[a]->album_id, eventcure::iterate(inputs[a], cfg)));
    const auto& in = inputs[a];
    dumped.push_back({{"album_id", albums[a]->album_id},
                      {"q", matrix_json(in.q)},
                      {"w", matrix_json(in.w)},
                      {"p_hat", std::vector<double>(in.p_hat.data(), in.p_hat.data() + in.p_hat.size())}});
  }
  OutputSet outputs(opt.out, opt.force);
  outputs.add("fusion.json", results.dump(2) + "\n");
  outputs.add("fusion_inputs.json", dumped.dump() + "\n");
  outputs.commit();
  std::cout << "fused " << albums.size() << " albums into " << (outputs.dir() / "fusion.json").string() << "\n";
  return 0;
}

int cmd_evaluate(const Options& opt) {
  require(opt.out, "--out");
  require(opt.method, "--method");
  const auto method = eventcure::parse_method(opt.method);
  const auto manifest = read_manifest(opt);
  const auto predictors = load_predictors(opt);
  const auto cfg = fusion_config(opt);
  const auto albums = albums_of(manifest, opt.split);
  const auto inputs = eventcure::compute_fusion_inputs(predictors, albums);
  const auto report =
      eventcure::evaluate_method(method, albums, inputs, cfg, opt.t_list, eventcure::derive_seed(opt.seed, "eval"));

  OutputSet outputs(opt.out, opt.force);
  const std::string name = opt.method + ".csv";
  outputs.add(name, report.to_csv());
  outputs.commit();
  std::cout << report.to_csv();
  return 0;
}

int cmd_gridsearch(const Options& opt) {
  require(opt.out, "--out");
  const auto manifest = read_manifest(opt);
  const auto predictors = load_predictors(opt);
  const auto base = fusion_config(opt);
  const auto albums = albums_of(manifest, "validation");
  const auto labeled = eventcure::label_inputs(albums, eventcure::compute_fusion_inputs(predictors, albums));
  const auto result = eventcure::grid_search(labeled, eventcure::kDefaultAlphaGrid, eventcure::kDefaultMaskGrid, base);

  OutputSet outputs(opt.out, opt.force);
  outputs.add("gridsearch.csv", eventcure::grid_csv(result.table));
  outputs.add("gridsearch_best.json",
              json{{"alpha", result.alpha}, {"mask_fraction", result.mask_fraction}}.dump(2) + "\n");
  outputs.commit();
  std::cout << "best alpha " << result.alpha << ", m " << result.mask_fraction << "\n";
  return 0;
}

int cmd_remap(const Options& opt) {
  require(opt.out, "--out");
  require(opt.confusion, "--confusion");
  require(opt.mapping, "--mapping");
  eventcure::DroppedLabelPolicy policy;
  if (opt.policy == "assume-correct") {
    policy = eventcure::DroppedLabelPolicy::AssumeCorrect;
  } else if (opt.policy == "count-as-error") {
    policy = eventcure::DroppedLabelPolicy::CountAsError;
  } else {
    throw UsageError("--policy must be assume-correct or count-as-error");
  }
  const auto cm = eventcure::confusion_from_json(eventcure::load_json(opt.confusion));
  const auto mapping = eventcure::label_mapping_from_json(eventcure::load_json(opt.mapping), cm.classes);
  const auto result = eventcure::remap_confusion(cm, mapping, policy);

  OutputSet outputs(opt.out, opt.force);
  auto doc = eventcure::to_json(result.matrix);
  doc["accuracy"] = result.accuracy;
  outputs.add("remap.json", doc.dump(2) + "\n");
  outputs.commit();
  std::printf("accuracy %.6f\n", result.accuracy);
  return 0;
}

int cmd_run(const Options& opt) {
  require(opt.out, "--out");
  const auto manifest = read_manifest(opt);
  eventcure::ExperimentConfig cfg;
  cfg.predictors = predictor_configs(opt);
  cfg.fusion = fusion_config(opt);
  cfg.t_list = opt.t_list;
  cfg.seed = opt.seed;
  const auto result = eventcure::run_experiment(manifest, cfg);

  OutputSet outputs(opt.out, opt.force);
  outputs.add("report.csv", eventcure::experiment_csv(result));
  outputs.add("grid_cnn-lstm-iterative.csv", eventcure::grid_csv(result.full_grid));
  outputs.add("grid_cnn-iterative.csv", eventcure::grid_csv(result.no_anchor_grid));
  outputs.commit();
  std::cout << eventcure::experiment_csv(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-specific album curation and recognition"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);
  Options opt;

  const auto common = [&](CLI::App* sub, bool manifest) {
    if (manifest) sub->add_option("--manifest", opt.manifest, "Dataset manifest JSON");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--seed", opt.seed, "Root seed")->capture_default_str();
    sub->add_flag("--force", opt.force, "Overwrite existing outputs");
  };
  const auto fusion = [&](CLI::App* sub) {
    sub->add_option("--alpha", opt.alpha, "Importance exponent")->capture_default_str();
    sub->add_option("--mask-fraction", opt.mask_fraction, "Event mask fraction m")->capture_default_str();
    sub->add_option("--max-iters", opt.max_iters, "Iteration cap")->capture_default_str();
    sub->add_option("--tol", opt.tol, "Convergence tolerance")->capture_default_str();
  };
  const auto training = [&](CLI::App* sub) {
    sub->add_option("--learning-rate", opt.learning_rate, "Override the learning rate");
    sub->add_option("--epochs", opt.epochs, "Override the epoch count");
    sub->add_option("--batch-size", opt.batch_size, "Override the minibatch size");
    sub->add_option("--hidden", opt.hidden, "Override the hidden width");
  };
  const auto models = [&](CLI::App* sub) {
    sub->add_option("--models", opt.models, "Directory holding the three model files");
  };
  const auto t_list = [&](CLI::App* sub) {
    sub->add_option("--t-list", opt.t_list, "Comma-separated curation percentages")->delimiter(',');
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  common(synth, false);
  synth->add_option("--config", opt.synth_config, "Synthetic config JSON");

  auto* train = app.add_subcommand("train", "Train one predictor");
  common(train, true);
  training(train);
  train->add_option("--which", opt.which, "image-event, sequence-event or importance");

  auto* fuse = app.add_subcommand("fuse", "Run the fusion loop on every album of a split");
  common(fuse, true);
  models(fuse);
  fusion(fuse);
  fuse->add_option("--split", opt.split, "train, validation or test")->capture_default_str();

  auto* evaluate = app.add_subcommand("evaluate", "Score one recognition or curation method");
  common(evaluate, true);
  models(evaluate);
  fusion(evaluate);
  t_list(evaluate);
  evaluate->add_option("--method", opt.method, "Method name");
  evaluate->add_option("--split", opt.split, "train, validation or test")->capture_default_str();

  auto* gridsearch = app.add_subcommand("gridsearch", "Select alpha and m on the validation split");
  common(gridsearch, true);
  models(gridsearch);
  fusion(gridsearch);

  auto* remap = app.add_subcommand("remap", "Collapse a confusion matrix onto another label set");
  common(remap, false);
  remap->add_option("--confusion", opt.confusion, "Confusion matrix JSON");
  remap->add_option("--mapping", opt.mapping, "Label mapping JSON");
  remap->add_option("--policy", opt.policy, "assume-correct or count-as-error")->capture_default_str();

  auto* run = app.add_subcommand("run", "Train, tune and evaluate every method");
  common(run, true);
  training(run);
  fusion(run);
  t_list(run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) return cmd_synth(opt);
    if (*train) return cmd_train(opt);
    if (*fuse) return cmd_fuse(opt);
    if (*evaluate) return cmd_evaluate(opt);
    if (*gridsearch) return cmd_gridsearch(opt);
    if (*remap) return cmd_remap(opt);
    if (*run) return cmd_run(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ConfigError ? kExitUsage : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  std::cerr << "internal error: no subcommand dispatched\n";
  return kExitInternal;
}
