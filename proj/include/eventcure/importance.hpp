#pragma once

// Event-conditioned importance scorer trained as a siamese pair model.
//
// A shared tanh trunk embeds each image; event c scores an image with its own
// linear head. For a pair (i, j) under event c the predicted difference is
//
//   D = 1/2 [ (head_c(t_i) - head_c(t_j)) + direct_c(t_i - t_j) ]
//
// where direct_c is the direct difference pathway applied to the element-wise
// difference of the trunk outputs. Only the sampled event's head and direct
// slice (plus the trunk) receive gradient. Prediction uses the heads alone.

#include <vector>

#include <Eigen/Dense>

#include "eventcure/dataset.hpp"
#include "eventcure/pca.hpp"
#include "eventcure/projection.hpp"
#include "eventcure/random.hpp"
#include "eventcure/train_config.hpp"

namespace eventcure {

class ImportanceModel {
 public:
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  ImportanceModel() = default;
  ImportanceModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes);

  void initialize(Rng& rng);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index hidden() const { return hidden_; }
  Eigen::Index classes() const { return classes_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  ConstMap trunk_weights() const;   // h x d
  ConstVecMap trunk_bias() const;   // h
  ConstMap head_weights() const;    // C x h, row c = head of event c
  ConstVecMap head_bias() const;    // C
  ConstMap direct_weights() const;  // C x h, row c = direct pathway of event c

  Eigen::Index trunk_weights_offset() const { return 0; }
  Eigen::Index trunk_bias_offset() const { return hidden_ * input_dim_; }
  Eigen::Index head_weights_offset() const { return trunk_bias_offset() + hidden_; }
  Eigen::Index head_bias_offset() const { return head_weights_offset() + classes_ * hidden_; }
  Eigen::Index direct_weights_offset() const { return head_bias_offset() + classes_; }

  /// Indices in parameters() owned by event c alone (head row, head bias, direct row).
  std::vector<Eigen::Index> event_parameter_indices(Eigen::Index event) const;

  Eigen::VectorXd trunk(const Eigen::VectorXd& x) const;
  /// One score per event for a single image.
  Eigen::VectorXd head_scores(const Eigen::VectorXd& x) const;
  double pair_difference(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, Eigen::Index event) const;

  PcaTransform pca;

 private:
  Eigen::Index input_dim_ = 0;
  Eigen::Index hidden_ = 0;
  Eigen::Index classes_ = 0;
  Eigen::VectorXd params_;
};

/// Piecewise ranking loss of the pair under `event` with target difference
/// `target` = gt_i - gt_j; adds the gated gradient into `grad`.
double importance_pair_gradient(const ImportanceModel& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                Eigen::Index event, double target, double similar_margin, double different_margin,
                                Eigen::VectorXd& grad);

/// N x C raw head scores.
Eigen::MatrixXd importance_scores(const ImportanceModel& model, const Eigen::MatrixXd& projected);

/// Raw head scores with every column min-max normalized to [0,1]; constant
/// columns become all ones.
Eigen::MatrixXd predict_importance(const ImportanceModel& model, const Eigen::MatrixXd& projected);
Eigen::MatrixXd predict_importance(const ImportanceModel& model, const AlbumRecord& album);

/// One SGD epoch of `pairs_per_album` random pairs per album, each under an
/// event sampled from the album's label distribution. When `accumulated` is
/// given, the sum of all applied gradients is added into it.
double importance_epoch(ImportanceModel& model, const std::vector<ProjectedAlbum>& albums, const TrainConfig& cfg,
                        Rng& rng, Eigen::VectorXd* accumulated = nullptr);

/// Throws MissingGroundTruth if a train album lacks gt_importance.
ImportanceModel train_importance(const DatasetManifest& manifest, const TrainConfig& cfg,
                                 std::vector<double>* epoch_loss = nullptr);

}  // namespace eventcure
