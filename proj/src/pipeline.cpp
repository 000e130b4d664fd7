#include "eventcure/pipeline.hpp"

#include <cstdio>

#include "eventcure/error.hpp"
#include "eventcure/parallel.hpp"

namespace eventcure {

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {Method::CnnRecognition, Method::CnnLstm,     Method::CnnIterative,
                                              Method::CnnLstmIterative, Method::NoeventTest, Method::GtEvent,
                                              Method::Random};
  return methods;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::CnnRecognition: return "cnn-recognition";
    case Method::CnnLstm: return "cnn-lstm";
    case Method::CnnIterative: return "cnn-iterative";
    case Method::CnnLstmIterative: return "cnn-lstm-iterative";
    case Method::NoeventTest: return "noevent-test";
    case Method::GtEvent: return "gt-event";
    case Method::Random: return "random";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::ConfigError, "unknown method '" + name + "'");
}

bool produces_recognition(Method method) {
  return method == Method::CnnRecognition || method == Method::CnnLstm || method == Method::CnnIterative ||
         method == Method::CnnLstmIterative;
}

bool produces_curation(Method method) {
  return method == Method::CnnIterative || method == Method::CnnLstmIterative || method == Method::NoeventTest ||
         method == Method::GtEvent || method == Method::Random;
}

TrainConfig default_image_event_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.hidden = 32;
  return cfg;
}

TrainConfig default_sequence_event_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 30;
  cfg.batch_size = 8;
  cfg.hidden = 32;
  return cfg;
}

TrainConfig default_importance_config() {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.epochs = 20;
  cfg.batch_size = 16;
  cfg.hidden = 32;
  cfg.pairs_per_album = 20;
  return cfg;
}

void PredictorConfigs::set_seed(std::uint64_t seed) {
  image.seed = seed;
  sequence.seed = seed;
  importance.seed = seed;
}

TrainedPredictors train_predictors(const DatasetManifest& manifest, const PredictorConfigs& cfg) {
  TrainedPredictors out;
  out.image = train_image_event(manifest, cfg.image);
  out.sequence = train_sequence_event(manifest, cfg.sequence);
  out.importance = train_importance(manifest, cfg.importance);
  return out;
}

FusionInputs compute_fusion_inputs(const TrainedPredictors& predictors, const AlbumRecord& album) {
  FusionInputs inputs;
  inputs.q = predict_image_events(predictors.image, album);
  inputs.w = predict_importance(predictors.importance, album);
  inputs.p_hat = predict_sequence_event(predictors.sequence, album);
  return inputs;
}

std::vector<FusionInputs> compute_fusion_inputs(const TrainedPredictors& predictors,
                                                const std::vector<const AlbumRecord*>& albums) {
  std::vector<FusionInputs> out(albums.size());
  parallel_for(albums.size(), [&](std::size_t a) { out[a] = compute_fusion_inputs(predictors, *albums[a]); });
  return out;
}

MethodOutput run_method(Method method, const std::vector<const AlbumRecord*>& albums,
                        const std::vector<FusionInputs>& inputs, const FusionConfig& fusion, std::uint64_t seed) {
  if (albums.size() != inputs.size()) throw Error(ErrorKind::LengthMismatch, "album and input counts differ");
  MethodOutput out;
  const std::size_t count = albums.size();
  if (produces_recognition(method)) out.event_predictions.resize(count);
  if (produces_curation(method)) out.scores.resize(count);

  FusionConfig cfg = fusion;
  cfg.use_anchor = method == Method::CnnLstmIterative;
  const auto random_root = derive_seed(seed, "random-scores");

  parallel_for(count, [&](std::size_t a) {
    const auto& in = inputs[a];
    switch (method) {
      case Method::CnnRecognition:
        out.event_predictions[a] = in.q.colwise().mean().transpose();
        break;
      case Method::CnnLstm:
        out.event_predictions[a] = in.p_hat;
        break;
      case Method::CnnIterative:
      case Method::CnnLstmIterative: {
        const auto result = iterate(in, cfg);
        out.event_predictions[a] = result.p;
        out.scores[a].assign(result.v.data(), result.v.data() + result.v.size());
        break;
      }
      case Method::NoeventTest: {
        const Eigen::VectorXd mean = in.w.rowwise().mean();
        out.scores[a].assign(mean.data(), mean.data() + mean.size());
        break;
      }
      case Method::GtEvent: {
        const auto c = static_cast<Eigen::Index>(albums[a]->label_dist.argmax());
        const Eigen::VectorXd column = in.w.col(c);
        out.scores[a].assign(column.data(), column.data() + column.size());
        break;
      }
      case Method::Random: {
        Rng rng(derive_seed(random_root, static_cast<std::uint64_t>(a)));
        out.scores[a].resize(static_cast<std::size_t>(in.q.rows()));
        for (auto& s : out.scores[a]) s = uniform01(rng);
        break;
      }
    }
  });
  return out;
}

EvaluationReport evaluate_method(Method method, const std::vector<const AlbumRecord*>& albums,
                                 const std::vector<FusionInputs>& inputs, const FusionConfig& fusion,
                                 const std::vector<double>& t_list, std::uint64_t seed) {
  const auto output = run_method(method, albums, inputs, fusion, seed);
  EvaluationReport report;
  if (!output.event_predictions.empty()) {
    std::vector<EventLabelDistribution> labels;
    for (const auto* album : albums) labels.push_back(album->label_dist);
    report.cells.push_back({"accuracy", std::nullopt, top1_accuracy(output.event_predictions, labels)});
    report.cells.push_back({"f1", std::nullopt, f1_score(output.event_predictions, labels)});
  }
  if (!output.scores.empty()) {
    std::vector<CuratedAlbum> curated;
    for (std::size_t a = 0; a < albums.size(); ++a) curated.push_back({albums[a], output.scores[a]});
    const auto curation = evaluate_curation(curated, t_list);
    report.cells.insert(report.cells.end(), curation.cells.begin(), curation.cells.end());
  }
  return report;
}

std::vector<LabeledFusionInputs> label_inputs(const std::vector<const AlbumRecord*>& albums,
                                              const std::vector<FusionInputs>& inputs) {
  std::vector<LabeledFusionInputs> out;
  for (std::size_t a = 0; a < albums.size(); ++a) out.push_back({inputs[a], albums[a]->label_dist});
  return out;
}

ExperimentResult run_experiment(const DatasetManifest& manifest, const ExperimentConfig& cfg) {
  PredictorConfigs predictor_cfg = cfg.predictors;
  predictor_cfg.set_seed(derive_seed(cfg.seed, "train"));
  const auto predictors = train_predictors(manifest, predictor_cfg);

  ExperimentResult result;
  result.full_fusion = cfg.fusion;
  result.full_fusion.use_anchor = true;
  result.no_anchor_fusion = cfg.fusion;
  result.no_anchor_fusion.use_anchor = false;

  if (cfg.tune_on_validation) {
    const auto validation = manifest.split(Split::Validation);
    const auto labeled = label_inputs(validation, compute_fusion_inputs(predictors, validation));
    const auto full = grid_search(labeled, cfg.alpha_grid, cfg.mask_grid, result.full_fusion);
    result.full_fusion.alpha = full.alpha;
    result.full_fusion.mask_fraction = full.mask_fraction;
    result.full_grid = full.table;
    const auto no_anchor = grid_search(labeled, cfg.alpha_grid, cfg.mask_grid, result.no_anchor_fusion);
    result.no_anchor_fusion.alpha = no_anchor.alpha;
    result.no_anchor_fusion.mask_fraction = no_anchor.mask_fraction;
    result.no_anchor_grid = no_anchor.table;
  }

  const auto test = manifest.split(Split::Test);
  if (test.empty()) throw Error(ErrorKind::EmptySplit, "test split is empty");
  const auto inputs = compute_fusion_inputs(predictors, test);
  const auto eval_seed = derive_seed(cfg.seed, "eval");
  for (Method method : all_methods()) {
    const auto& fusion = method == Method::CnnIterative ? result.no_anchor_fusion : result.full_fusion;
    result.reports[method] = evaluate_method(method, test, inputs, fusion, cfg.t_list, eval_seed);
  }
  return result;
}

std::string experiment_csv(const ExperimentResult& result) {
  std::string out = "method,metric,t,value\n";
  for (Method method : all_methods()) {
    const auto it = result.reports.find(method);
    if (it == result.reports.end()) continue;
    const auto body = it->second.to_csv();
    std::size_t pos = body.find('\n') + 1;  // skip header
    while (pos < body.size()) {
      const auto end = body.find('\n', pos);
      out += to_string(method);
      out += ',';
      out += body.substr(pos, end - pos + 1);
      pos = end + 1;
    }
  }
  return out;
}

std::string grid_csv(const std::vector<GridPoint>& table) {
  std::string out = "alpha,m,accuracy\n";
  char buffer[96];
  for (const auto& point : table) {
    std::snprintf(buffer, sizeof(buffer), "%g,%g,%.6f\n", point.alpha, point.mask_fraction, point.accuracy);
    out += buffer;
  }
  return out;
}

}  // namespace eventcure
