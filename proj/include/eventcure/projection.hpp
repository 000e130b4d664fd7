#pragma once

// Shared plumbing for the trainable predictors: albums with PCA-projected
// features, and the softmax used by both recognizers.

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "eventcure/dataset.hpp"
#include "eventcure/pca.hpp"

namespace eventcure {

struct ProjectedAlbum {
  Eigen::MatrixXd features;  // N x d'
  EventLabelDistribution label_dist;
  std::optional<std::vector<double>> gt_importance;
};

Eigen::MatrixXd to_double(const FeatureMatrix& features);

/// PCA over every image of the albums in `split`. Throws EmptySplit if none.
PcaTransform fit_split_pca(const DatasetManifest& manifest, Split split, Eigen::Index reduced_dim);

std::vector<ProjectedAlbum> project_split(const DatasetManifest& manifest, Split split, const PcaTransform& pca);

Eigen::MatrixXd project_album(const AlbumRecord& album, const PcaTransform& pca);

/// Numerically stable softmax; entries sum to 1 for any finite input.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

}  // namespace eventcure
