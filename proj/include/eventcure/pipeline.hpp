#pragma once

// End-to-end experiment plumbing shared by the command-line tool and the
// acceptance suite: train the three predictors, build fusion inputs per
// album, and score each recognition/curation method.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eventcure/dataset.hpp"
#include "eventcure/fusion.hpp"
#include "eventcure/image_event.hpp"
#include "eventcure/importance.hpp"
#include "eventcure/metrics.hpp"
#include "eventcure/sequence_event.hpp"
#include "eventcure/synth.hpp"
#include "eventcure/train_config.hpp"

namespace eventcure {

enum class Method {
  CnnRecognition,    // mean of Q rows
  CnnLstm,           // p_hat alone
  CnnIterative,      // fusion loop without the anchor step
  CnnLstmIterative,  // full fusion loop
  NoeventTest,       // curation by the mean of W over events
  GtEvent,           // curation by the W column of the true (argmax) event
  Random,            // seeded uniform scores
};

const std::vector<Method>& all_methods();
const char* to_string(Method method);
/// Throws ConfigError for unknown names.
Method parse_method(const std::string& name);
bool produces_recognition(Method method);
bool produces_curation(Method method);

struct TrainedPredictors {
  ImageEventModel image;
  SequenceEventModel sequence;
  ImportanceModel importance;
};

/// Per-model defaults tuned for the desk-scale synthetic albums.
TrainConfig default_image_event_config();
TrainConfig default_sequence_event_config();
TrainConfig default_importance_config();

struct PredictorConfigs {
  TrainConfig image = default_image_event_config();
  TrainConfig sequence = default_sequence_event_config();
  TrainConfig importance = default_importance_config();

  /// Same seed for all three (each model derives its own sub-stream).
  void set_seed(std::uint64_t seed);
};

TrainedPredictors train_predictors(const DatasetManifest& manifest, const PredictorConfigs& cfg);

FusionInputs compute_fusion_inputs(const TrainedPredictors& predictors, const AlbumRecord& album);
std::vector<FusionInputs> compute_fusion_inputs(const TrainedPredictors& predictors,
                                                const std::vector<const AlbumRecord*>& albums);

struct MethodOutput {
  std::vector<Eigen::VectorXd> event_predictions;  // empty for curation-only methods
  std::vector<std::vector<double>> scores;         // empty for recognition-only methods
};

/// `fusion.use_anchor` is overridden by the method.
MethodOutput run_method(Method method, const std::vector<const AlbumRecord*>& albums,
                        const std::vector<FusionInputs>& inputs, const FusionConfig& fusion, std::uint64_t seed);

/// Recognition methods add `accuracy` and `f1` cells; curation methods add
/// MAP/P cells for every t.
EvaluationReport evaluate_method(Method method, const std::vector<const AlbumRecord*>& albums,
                                 const std::vector<FusionInputs>& inputs, const FusionConfig& fusion,
                                 const std::vector<double>& t_list, std::uint64_t seed);

std::vector<LabeledFusionInputs> label_inputs(const std::vector<const AlbumRecord*>& albums,
                                              const std::vector<FusionInputs>& inputs);

struct ExperimentConfig {
  PredictorConfigs predictors;
  FusionConfig fusion;
  std::vector<double> alpha_grid = kDefaultAlphaGrid;
  std::vector<double> mask_grid = kDefaultMaskGrid;
  std::vector<double> t_list = kDefaultTList;
  /// Select (alpha, m) on the validation split; otherwise use `fusion` as is.
  bool tune_on_validation = true;
  std::uint64_t seed = 1;
};

struct ExperimentResult {
  FusionConfig full_fusion;     // cnn-lstm-iterative settings
  FusionConfig no_anchor_fusion;  // cnn-iterative settings
  std::vector<GridPoint> full_grid;
  std::vector<GridPoint> no_anchor_grid;
  std::map<Method, EvaluationReport> reports;
};

/// Trains on the train split, tunes on validation, evaluates every method on test.
ExperimentResult run_experiment(const DatasetManifest& manifest, const ExperimentConfig& cfg);

/// All method reports concatenated with a leading `method` column.
std::string experiment_csv(const ExperimentResult& result);
std::string grid_csv(const std::vector<GridPoint>& table);

}  // namespace eventcure
