#pragma once

// Per-image event recognizer: projected feature -> C logits through an
// optional tanh hidden layer. Its softmax rows form the Q matrix.

#include <vector>

#include <Eigen/Dense>

#include "eventcure/dataset.hpp"
#include "eventcure/pca.hpp"
#include "eventcure/projection.hpp"
#include "eventcure/random.hpp"
#include "eventcure/train_config.hpp"

namespace eventcure {

class ImageEventModel {
 public:
  using Map = Eigen::Map<Eigen::MatrixXd>;
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  ImageEventModel() = default;
  /// All parameters start at zero; hidden == 0 gives a linear model.
  ImageEventModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes);

  void initialize(Rng& rng);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index hidden() const { return hidden_; }
  Eigen::Index classes() const { return classes_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  // hidden > 0 only
  ConstMap hidden_weights() const;
  ConstVecMap hidden_bias() const;
  // C x hidden, or C x input_dim for a linear model
  ConstMap output_weights() const;
  ConstVecMap output_bias() const;

  Eigen::VectorXd logits(const Eigen::VectorXd& x) const;

  /// Cross-entropy of softmax(logits(x)) against `target`; adds dLoss/dparams
  /// into `grad` (same layout as parameters()).
  double accumulate_gradient(const Eigen::VectorXd& x, std::size_t target, Eigen::VectorXd& grad) const;

  /// Projection applied to raw album features before the network.
  PcaTransform pca;

 private:
  Eigen::Index output_offset() const;

  Eigen::Index input_dim_ = 0;
  Eigen::Index hidden_ = 0;
  Eigen::Index classes_ = 0;
  Eigen::VectorXd params_;
};

/// Rows are softmax distributions over events, one per image.
Eigen::MatrixXd predict_image_events(const ImageEventModel& model, const Eigen::MatrixXd& projected);
Eigen::MatrixXd predict_image_events(const ImageEventModel& model, const AlbumRecord& album);

/// One SGD pass over every image; each image gets a one-hot target freshly
/// sampled from its album's label distribution. Returns the mean loss.
double image_event_epoch(ImageEventModel& model, const std::vector<ProjectedAlbum>& albums, const TrainConfig& cfg,
                         Rng& rng);

ImageEventModel train_image_event(const DatasetManifest& manifest, const TrainConfig& cfg,
                                  std::vector<double>* epoch_loss = nullptr);

}  // namespace eventcure
