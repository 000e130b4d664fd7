#include "eventcure/image_event.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "eventcure/error.hpp"

namespace eventcure {

namespace {

constexpr double kInitRange = 0.08;

}  // namespace

ImageEventModel::ImageEventModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes)
    : input_dim_(input_dim), hidden_(hidden), classes_(classes) {
  if (input_dim < 1 || hidden < 0 || classes < 2) {
    throw Error(ErrorKind::ConfigError, "image event model needs input_dim >= 1, hidden >= 0, classes >= 2");
  }
  const Eigen::Index width = hidden > 0 ? hidden : input_dim;
  const Eigen::Index count = (hidden > 0 ? hidden * input_dim + hidden : 0) + classes * width + classes;
  params_ = Eigen::VectorXd::Zero(count);
}

void ImageEventModel::initialize(Rng& rng) {
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_(i) = kInitRange * (2.0 * uniform01(rng) - 1.0);
}

Eigen::Index ImageEventModel::output_offset() const { return hidden_ > 0 ? hidden_ * input_dim_ + hidden_ : 0; }

ImageEventModel::ConstMap ImageEventModel::hidden_weights() const {
  return ConstMap(params_.data(), hidden_, input_dim_);
}

ImageEventModel::ConstVecMap ImageEventModel::hidden_bias() const {
  return ConstVecMap(params_.data() + hidden_ * input_dim_, hidden_);
}

ImageEventModel::ConstMap ImageEventModel::output_weights() const {
  return ConstMap(params_.data() + output_offset(), classes_, hidden_ > 0 ? hidden_ : input_dim_);
}

ImageEventModel::ConstVecMap ImageEventModel::output_bias() const {
  const Eigen::Index width = hidden_ > 0 ? hidden_ : input_dim_;
  return ConstVecMap(params_.data() + output_offset() + classes_ * width, classes_);
}

Eigen::VectorXd ImageEventModel::logits(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "image feature has " + std::to_string(x.size()) + " entries, model expects " +
                                                  std::to_string(input_dim_));
  }
  if (hidden_ == 0) return output_weights() * x + output_bias();
  const Eigen::VectorXd a = (hidden_weights() * x + hidden_bias()).array().tanh().matrix();
  return output_weights() * a + output_bias();
}

double ImageEventModel::accumulate_gradient(const Eigen::VectorXd& x, std::size_t target, Eigen::VectorXd& grad) const {
  const auto t = static_cast<Eigen::Index>(target);
  if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
  const Eigen::Index width = hidden_ > 0 ? hidden_ : input_dim_;
  Eigen::VectorXd a;
  if (hidden_ > 0) {
    a = (hidden_weights() * x + hidden_bias()).array().tanh().matrix();
  } else {
    a = x;
  }
  const Eigen::VectorXd prob = softmax(output_weights() * a + output_bias());
  const double loss = -std::log(std::max(prob(t), 1e-300));

  Eigen::VectorXd d_logits = prob;
  d_logits(t) -= 1.0;
  Map(grad.data() + output_offset(), classes_, width) += d_logits * a.transpose();
  VecMap(grad.data() + output_offset() + classes_ * width, classes_) += d_logits;
  if (hidden_ > 0) {
    const Eigen::VectorXd d_pre =
        ((output_weights().transpose() * d_logits).array() * (1.0 - a.array().square())).matrix();
    Map(grad.data(), hidden_, input_dim_) += d_pre * x.transpose();
    VecMap(grad.data() + hidden_ * input_dim_, hidden_) += d_pre;
  }
  return loss;
}

Eigen::MatrixXd predict_image_events(const ImageEventModel& model, const Eigen::MatrixXd& projected) {
  Eigen::MatrixXd q(projected.rows(), model.classes());
  for (Eigen::Index n = 0; n < projected.rows(); ++n) {
    q.row(n) = softmax(model.logits(projected.row(n).transpose())).transpose();
  }
  return q;
}

Eigen::MatrixXd predict_image_events(const ImageEventModel& model, const AlbumRecord& album) {
  return predict_image_events(model, project_album(album, model.pca));
}

double image_event_epoch(ImageEventModel& model, const std::vector<ProjectedAlbum>& albums, const TrainConfig& cfg,
                         Rng& rng) {
  std::vector<std::pair<std::size_t, Eigen::Index>> images;
  for (std::size_t a = 0; a < albums.size(); ++a) {
    for (Eigen::Index n = 0; n < albums[a].features.rows(); ++n) images.emplace_back(a, n);
  }
  if (images.empty()) throw Error(ErrorKind::EmptySplit, "no training images");
  std::shuffle(images.begin(), images.end(), rng);

  double total = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.parameters().size());
  for (std::size_t start = 0; start < images.size(); start += cfg.batch_size) {
    const std::size_t stop = std::min(images.size(), start + cfg.batch_size);
    grad.setZero();
    for (std::size_t k = start; k < stop; ++k) {
      const auto& [a, n] = images[k];
      const auto target = sample_label(albums[a].label_dist, rng);
      total += model.accumulate_gradient(albums[a].features.row(n).transpose(), target, grad);
    }
    model.parameters() -= (cfg.learning_rate / static_cast<double>(stop - start)) * grad;
  }
  return total / static_cast<double>(images.size());
}

ImageEventModel train_image_event(const DatasetManifest& manifest, const TrainConfig& cfg,
                                  std::vector<double>* epoch_loss) {
  cfg.validate();
  if (manifest.split(Split::Train).empty()) throw Error(ErrorKind::EmptySplit, "train split is empty");
  Rng rng(derive_seed(cfg.seed, "image_event"));
  auto pca = fit_split_pca(manifest, Split::Train, cfg.reduced_dim);
  const auto albums = project_split(manifest, Split::Train, pca);

  ImageEventModel model(cfg.reduced_dim, cfg.hidden, static_cast<Eigen::Index>(manifest.vocabulary.size()));
  model.pca = std::move(pca);
  model.initialize(rng);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = image_event_epoch(model, albums, cfg, rng);
    if (epoch_loss) epoch_loss->push_back(loss);
  }
  return model;
}

}  // namespace eventcure
