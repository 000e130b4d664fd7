#include "eventcure/importance.hpp"

#include <algorithm>
#include <numeric>

#include "eventcure/error.hpp"
#include "eventcure/ranking_loss.hpp"

namespace eventcure {

namespace {

constexpr double kInitRange = 0.08;

}  // namespace

ImportanceModel::ImportanceModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes)
    : input_dim_(input_dim), hidden_(hidden), classes_(classes) {
  if (input_dim < 1 || hidden < 1 || classes < 2) {
    throw Error(ErrorKind::ConfigError, "importance model needs input_dim >= 1, hidden >= 1, classes >= 2");
  }
  params_ = Eigen::VectorXd::Zero(direct_weights_offset() + classes * hidden);
}

void ImportanceModel::initialize(Rng& rng) {
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_(i) = kInitRange * (2.0 * uniform01(rng) - 1.0);
}

ImportanceModel::ConstMap ImportanceModel::trunk_weights() const {
  return ConstMap(params_.data() + trunk_weights_offset(), hidden_, input_dim_);
}

ImportanceModel::ConstVecMap ImportanceModel::trunk_bias() const {
  return ConstVecMap(params_.data() + trunk_bias_offset(), hidden_);
}

ImportanceModel::ConstMap ImportanceModel::head_weights() const {
  return ConstMap(params_.data() + head_weights_offset(), classes_, hidden_);
}

ImportanceModel::ConstVecMap ImportanceModel::head_bias() const {
  return ConstVecMap(params_.data() + head_bias_offset(), classes_);
}

ImportanceModel::ConstMap ImportanceModel::direct_weights() const {
  return ConstMap(params_.data() + direct_weights_offset(), classes_, hidden_);
}

std::vector<Eigen::Index> ImportanceModel::event_parameter_indices(Eigen::Index event) const {
  // Column-major C x h storage: entry (c, k) lives at offset + k * C + c.
  std::vector<Eigen::Index> out;
  for (Eigen::Index k = 0; k < hidden_; ++k) out.push_back(head_weights_offset() + k * classes_ + event);
  out.push_back(head_bias_offset() + event);
  for (Eigen::Index k = 0; k < hidden_; ++k) out.push_back(direct_weights_offset() + k * classes_ + event);
  return out;
}

Eigen::VectorXd ImportanceModel::trunk(const Eigen::VectorXd& x) const {
  if (x.size() != input_dim_) {
    throw Error(ErrorKind::DimensionMismatch, "image feature has " + std::to_string(x.size()) +
                                                  " entries, model expects " + std::to_string(input_dim_));
  }
  return (trunk_weights() * x + trunk_bias()).array().tanh().matrix();
}

Eigen::VectorXd ImportanceModel::head_scores(const Eigen::VectorXd& x) const {
  return head_weights() * trunk(x) + head_bias();
}

double ImportanceModel::pair_difference(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                        Eigen::Index event) const {
  const Eigen::VectorXd diff = trunk(xi) - trunk(xj);
  return 0.5 * (head_weights().row(event).dot(diff) + direct_weights().row(event).dot(diff));
}

double importance_pair_gradient(const ImportanceModel& model, const Eigen::VectorXd& xi, const Eigen::VectorXd& xj,
                                Eigen::Index event, double target, double similar_margin, double different_margin,
                                Eigen::VectorXd& grad) {
  if (event < 0 || event >= model.classes()) throw Error(ErrorKind::InvalidInput, "event index out of range");
  if (grad.size() != model.parameters().size()) grad = Eigen::VectorXd::Zero(model.parameters().size());
  const Eigen::Index C = model.classes();
  const Eigen::Index H = model.hidden();

  const Eigen::VectorXd ti = model.trunk(xi);
  const Eigen::VectorXd tj = model.trunk(xj);
  const Eigen::VectorXd diff = ti - tj;
  const Eigen::VectorXd head = model.head_weights().row(event).transpose();
  const Eigen::VectorXd direct = model.direct_weights().row(event).transpose();
  const double predicted = 0.5 * (head.dot(diff) + direct.dot(diff));

  const auto loss = piecewise_ranking_loss(predicted, target, similar_margin, different_margin);
  const double dd = loss.d_loss_d_predicted;
  if (dd == 0.0) return loss.loss;

  for (Eigen::Index k = 0; k < H; ++k) {
    grad(model.head_weights_offset() + k * C + event) += 0.5 * dd * diff(k);
    grad(model.direct_weights_offset() + k * C + event) += 0.5 * dd * diff(k);
  }
  // The head bias cancels in the difference.
  const Eigen::VectorXd d_trunk = 0.5 * dd * (head + direct);
  const Eigen::VectorXd di = (d_trunk.array() * (1.0 - ti.array().square())).matrix();
  const Eigen::VectorXd dj = (-d_trunk.array() * (1.0 - tj.array().square())).matrix();
  Eigen::Map<Eigen::MatrixXd>(grad.data() + model.trunk_weights_offset(), H, model.input_dim()) +=
      di * xi.transpose() + dj * xj.transpose();
  grad.segment(model.trunk_bias_offset(), H) += di + dj;
  return loss.loss;
}

Eigen::MatrixXd importance_scores(const ImportanceModel& model, const Eigen::MatrixXd& projected) {
  Eigen::MatrixXd scores(projected.rows(), model.classes());
  for (Eigen::Index n = 0; n < projected.rows(); ++n) {
    scores.row(n) = model.head_scores(projected.row(n).transpose()).transpose();
  }
  return scores;
}

Eigen::MatrixXd predict_importance(const ImportanceModel& model, const Eigen::MatrixXd& projected) {
  Eigen::MatrixXd w = importance_scores(model, projected);
  for (Eigen::Index c = 0; c < w.cols(); ++c) {
    const double lo = w.col(c).minCoeff();
    const double hi = w.col(c).maxCoeff();
    if (hi > lo) {
      w.col(c) = (w.col(c).array() - lo) / (hi - lo);
    } else {
      w.col(c).setOnes();
    }
  }
  return w;
}

Eigen::MatrixXd predict_importance(const ImportanceModel& model, const AlbumRecord& album) {
  return predict_importance(model, project_album(album, model.pca));
}

double importance_epoch(ImportanceModel& model, const std::vector<ProjectedAlbum>& albums, const TrainConfig& cfg,
                        Rng& rng, Eigen::VectorXd* accumulated) {
  struct Pair {
    std::size_t album;
    Eigen::Index i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t a = 0; a < albums.size(); ++a) {
    if (!albums[a].gt_importance) throw Error(ErrorKind::MissingGroundTruth, "train album without gt_importance");
    const Eigen::Index n = albums[a].features.rows();
    if (n < 2) continue;
    std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
    for (std::size_t p = 0; p < cfg.pairs_per_album; ++p) {
      const Eigen::Index i = pick(rng);
      Eigen::Index j = pick(rng);
      while (j == i) j = pick(rng);
      pairs.push_back({a, i, j});
    }
  }
  if (pairs.empty()) throw Error(ErrorKind::EmptySplit, "no album with at least two images");
  std::shuffle(pairs.begin(), pairs.end(), rng);

  double total = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.parameters().size());
  for (std::size_t start = 0; start < pairs.size(); start += cfg.batch_size) {
    const std::size_t stop = std::min(pairs.size(), start + cfg.batch_size);
    grad.setZero();
    for (std::size_t k = start; k < stop; ++k) {
      const auto& pair = pairs[k];
      const auto& album = albums[pair.album];
      const auto event = static_cast<Eigen::Index>(sample_label(album.label_dist, rng));
      const auto& gt = *album.gt_importance;
      const double target = gt[static_cast<std::size_t>(pair.i)] - gt[static_cast<std::size_t>(pair.j)];
      total += importance_pair_gradient(model, album.features.row(pair.i).transpose(),
                                        album.features.row(pair.j).transpose(), event, target, cfg.margin_similar,
                                        cfg.margin_different, grad);
    }
    grad *= cfg.learning_rate / static_cast<double>(stop - start);
    model.parameters() -= grad;
    if (accumulated) {
      if (accumulated->size() != grad.size()) *accumulated = Eigen::VectorXd::Zero(grad.size());
      *accumulated += grad;
    }
  }
  return total / static_cast<double>(pairs.size());
}

ImportanceModel train_importance(const DatasetManifest& manifest, const TrainConfig& cfg,
                                 std::vector<double>* epoch_loss) {
  cfg.validate();
  const auto train = manifest.split(Split::Train);
  if (train.empty()) throw Error(ErrorKind::EmptySplit, "train split is empty");
  for (const auto* album : train) {
    if (!album->gt_importance) {
      throw Error(ErrorKind::MissingGroundTruth, "album '" + album->album_id + "' has no gt_importance");
    }
  }
  if (cfg.hidden < 1) throw Error(ErrorKind::ConfigError, "importance model needs hidden >= 1");
  Rng rng(derive_seed(cfg.seed, "importance"));
  auto pca = fit_split_pca(manifest, Split::Train, cfg.reduced_dim);
  const auto albums = project_split(manifest, Split::Train, pca);

  ImportanceModel model(cfg.reduced_dim, cfg.hidden, static_cast<Eigen::Index>(manifest.vocabulary.size()));
  model.pca = std::move(pca);
  model.initialize(rng);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = importance_epoch(model, albums, cfg, rng);
    if (epoch_loss) epoch_loss->push_back(loss);
  }
  return model;
}

}  // namespace eventcure
