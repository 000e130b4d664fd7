#include "eventcure/projection.hpp"

#include "eventcure/error.hpp"

namespace eventcure {

Eigen::MatrixXd to_double(const FeatureMatrix& features) { return features.cast<double>(); }

PcaTransform fit_split_pca(const DatasetManifest& manifest, Split split, Eigen::Index reduced_dim) {
  const auto albums = manifest.split(split);
  Eigen::Index rows = 0;
  for (const auto* album : albums) rows += album->features.rows();
  if (rows == 0) throw Error(ErrorKind::EmptySplit, std::string("no images in the ") + to_string(split) + " split");
  Eigen::MatrixXd stacked(rows, static_cast<Eigen::Index>(manifest.feature_dim));
  Eigen::Index offset = 0;
  for (const auto* album : albums) {
    stacked.middleRows(offset, album->features.rows()) = to_double(album->features);
    offset += album->features.rows();
  }
  return pca_fit(stacked, reduced_dim);
}

Eigen::MatrixXd project_album(const AlbumRecord& album, const PcaTransform& pca) {
  return pca_apply(pca, to_double(album.features));
}

std::vector<ProjectedAlbum> project_split(const DatasetManifest& manifest, Split split, const PcaTransform& pca) {
  std::vector<ProjectedAlbum> out;
  for (const auto* album : manifest.split(split)) {
    out.push_back({project_album(*album, pca), album->label_dist, album->gt_importance});
  }
  return out;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double top = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - top).exp();
  return e / e.sum();
}

}  // namespace eventcure
