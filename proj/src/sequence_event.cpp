#include "eventcure/sequence_event.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eventcure/error.hpp"

namespace eventcure {

namespace {

constexpr double kInitRange = 0.08;

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

}  // namespace

SequenceEventModel::SequenceEventModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes)
    : input_dim_(input_dim), hidden_(hidden), classes_(classes) {
  if (input_dim < 1 || hidden < 1 || classes < 2) {
    throw Error(ErrorKind::ConfigError, "sequence model needs input_dim >= 1, hidden >= 1, classes >= 2");
  }
  params_ = Eigen::VectorXd::Zero(output_bias_offset() + classes);
}

void SequenceEventModel::initialize(Rng& rng) {
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_(i) = kInitRange * (2.0 * uniform01(rng) - 1.0);
  params_.segment(gate_bias_offset() + hidden_, hidden_).setOnes();
}

SequenceEventModel::ConstMap SequenceEventModel::input_weights() const {
  return ConstMap(params_.data() + input_weights_offset(), 4 * hidden_, input_dim_);
}

SequenceEventModel::ConstMap SequenceEventModel::recurrent_weights() const {
  return ConstMap(params_.data() + recurrent_weights_offset(), 4 * hidden_, hidden_);
}

SequenceEventModel::ConstVecMap SequenceEventModel::gate_bias() const {
  return ConstVecMap(params_.data() + gate_bias_offset(), 4 * hidden_);
}

SequenceEventModel::ConstMap SequenceEventModel::output_weights() const {
  return ConstMap(params_.data() + output_weights_offset(), classes_, hidden_);
}

SequenceEventModel::ConstVecMap SequenceEventModel::output_bias() const {
  return ConstVecMap(params_.data() + output_bias_offset(), classes_);
}

LstmState lstm_step(const SequenceEventModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                    const Eigen::VectorXd& c, LstmStepCache* cache) {
  const Eigen::Index H = model.hidden();
  if (x.size() != model.input_dim() || h.size() != H || c.size() != H) {
    throw Error(ErrorKind::DimensionMismatch, "lstm_step input sizes do not match the model");
  }
  const Eigen::VectorXd z = model.input_weights() * x + model.recurrent_weights() * h + model.gate_bias();
  Eigen::VectorXd i = sigmoid(z.segment(0, H));
  Eigen::VectorXd f = sigmoid(z.segment(H, H));
  Eigen::VectorXd o = sigmoid(z.segment(2 * H, H));
  Eigen::VectorXd g = z.segment(3 * H, H).array().tanh().matrix();

  LstmState next;
  next.c = (f.array() * c.array() + i.array() * g.array()).matrix();
  Eigen::VectorXd tanh_c = next.c.array().tanh().matrix();
  next.h = (o.array() * tanh_c.array()).matrix();
  if (cache) {
    cache->x = x;
    cache->h_prev = h;
    cache->c_prev = c;
    cache->input_gate = std::move(i);
    cache->forget_gate = std::move(f);
    cache->output_gate = std::move(o);
    cache->candidate = std::move(g);
    cache->c = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

LstmStepGradient lstm_step_backward(const SequenceEventModel& model, const LstmStepCache& cache,
                                    const Eigen::VectorXd& dh, const Eigen::VectorXd& dc, Eigen::VectorXd& grad) {
  const Eigen::Index H = model.hidden();
  if (grad.size() != model.parameters().size()) grad = Eigen::VectorXd::Zero(model.parameters().size());
  const auto& i = cache.input_gate.array();
  const auto& f = cache.forget_gate.array();
  const auto& o = cache.output_gate.array();
  const auto& g = cache.candidate.array();
  const auto& tc = cache.tanh_c.array();

  const Eigen::ArrayXd dc_total = dc.array() + dh.array() * o * (1.0 - tc.square());
  Eigen::VectorXd dz(4 * H);
  dz.segment(0, H) = (dc_total * g * i * (1.0 - i)).matrix();
  dz.segment(H, H) = (dc_total * cache.c_prev.array() * f * (1.0 - f)).matrix();
  dz.segment(2 * H, H) = (dh.array() * tc * o * (1.0 - o)).matrix();
  dz.segment(3 * H, H) = (dc_total * i * (1.0 - g.square())).matrix();

  SequenceEventModel::Map(grad.data() + model.input_weights_offset(), 4 * H, model.input_dim()) +=
      dz * cache.x.transpose();
  SequenceEventModel::Map(grad.data() + model.recurrent_weights_offset(), 4 * H, H) += dz * cache.h_prev.transpose();
  grad.segment(model.gate_bias_offset(), 4 * H) += dz;

  LstmStepGradient out;
  out.dx = model.input_weights().transpose() * dz;
  out.dh_prev = model.recurrent_weights().transpose() * dz;
  out.dc_prev = (dc_total * f).matrix();
  return out;
}

Eigen::VectorXd sequence_pooled_state(const SequenceEventModel& model, const Eigen::MatrixXd& projected) {
  if (projected.rows() == 0) throw Error(ErrorKind::EmptyAlbum, "album has no images");
  LstmState state{Eigen::VectorXd::Zero(model.hidden()), Eigen::VectorXd::Zero(model.hidden())};
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(model.hidden());
  for (Eigen::Index t = 0; t < projected.rows(); ++t) {
    state = lstm_step(model, projected.row(t).transpose(), state.h, state.c);
    pooled += state.h;
  }
  return pooled / static_cast<double>(projected.rows());
}

Eigen::VectorXd predict_sequence_event(const SequenceEventModel& model, const Eigen::MatrixXd& projected) {
  return softmax(model.output_weights() * sequence_pooled_state(model, projected) + model.output_bias());
}

Eigen::VectorXd predict_sequence_event(const SequenceEventModel& model, const AlbumRecord& album) {
  return predict_sequence_event(model, project_album(album, model.pca));
}

double sequence_accumulate_gradient(const SequenceEventModel& model, const Eigen::MatrixXd& projected,
                                    std::size_t target, Eigen::VectorXd& grad) {
  const Eigen::Index steps = projected.rows();
  if (steps == 0) throw Error(ErrorKind::EmptyAlbum, "album has no images");
  const Eigen::Index H = model.hidden();
  if (grad.size() != model.parameters().size()) grad = Eigen::VectorXd::Zero(model.parameters().size());

  std::vector<LstmStepCache> caches(static_cast<std::size_t>(steps));
  LstmState state{Eigen::VectorXd::Zero(H), Eigen::VectorXd::Zero(H)};
  Eigen::VectorXd pooled = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = 0; t < steps; ++t) {
    state = lstm_step(model, projected.row(t).transpose(), state.h, state.c, &caches[static_cast<std::size_t>(t)]);
    pooled += state.h;
  }
  pooled /= static_cast<double>(steps);

  const Eigen::VectorXd prob = softmax(model.output_weights() * pooled + model.output_bias());
  const auto k = static_cast<Eigen::Index>(target);
  const double loss = -std::log(std::max(prob(k), 1e-300));
  Eigen::VectorXd d_logits = prob;
  d_logits(k) -= 1.0;
  SequenceEventModel::Map(grad.data() + model.output_weights_offset(), model.classes(), H) +=
      d_logits * pooled.transpose();
  grad.segment(model.output_bias_offset(), model.classes()) += d_logits;

  const Eigen::VectorXd d_each = model.output_weights().transpose() * d_logits / static_cast<double>(steps);
  Eigen::VectorXd dh_next = Eigen::VectorXd::Zero(H);
  Eigen::VectorXd dc_next = Eigen::VectorXd::Zero(H);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto back =
        lstm_step_backward(model, caches[static_cast<std::size_t>(t)], d_each + dh_next, dc_next, grad);
    dh_next = back.dh_prev;
    dc_next = back.dc_prev;
  }
  return loss;
}

double sequence_event_epoch(SequenceEventModel& model, const std::vector<ProjectedAlbum>& albums,
                            const TrainConfig& cfg, Rng& rng) {
  if (albums.empty()) throw Error(ErrorKind::EmptySplit, "no training albums");
  std::vector<std::size_t> order(albums.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);

  double total = 0.0;
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(model.parameters().size());
  for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
    const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
    grad.setZero();
    for (std::size_t k = start; k < stop; ++k) {
      const auto& album = albums[order[k]];
      total += sequence_accumulate_gradient(model, album.features, sample_label(album.label_dist, rng), grad);
    }
    grad /= static_cast<double>(stop - start);
    model.parameters() -= cfg.learning_rate * grad;
  }
  return total / static_cast<double>(albums.size());
}

SequenceEventModel train_sequence_event(const DatasetManifest& manifest, const TrainConfig& cfg,
                                        std::vector<double>* epoch_loss) {
  cfg.validate();
  if (manifest.split(Split::Train).empty()) throw Error(ErrorKind::EmptySplit, "train split is empty");
  if (cfg.hidden < 1) throw Error(ErrorKind::ConfigError, "sequence model needs hidden >= 1");
  Rng rng(derive_seed(cfg.seed, "sequence_event"));
  auto pca = fit_split_pca(manifest, Split::Train, cfg.reduced_dim);
  const auto albums = project_split(manifest, Split::Train, pca);

  SequenceEventModel model(cfg.reduced_dim, cfg.hidden, static_cast<Eigen::Index>(manifest.vocabulary.size()));
  model.pca = std::move(pca);
  model.initialize(rng);
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = sequence_event_epoch(model, albums, cfg, rng);
    if (epoch_loss) epoch_loss->push_back(loss);
  }
  return model;
}

}  // namespace eventcure
