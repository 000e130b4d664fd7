#pragma once

// Album-level event recognizer: a single LSTM layer run over the images in
// album order, mean pooling of the hidden states, then a softmax layer.

#include <vector>

#include <Eigen/Dense>

#include "eventcure/dataset.hpp"
#include "eventcure/pca.hpp"
#include "eventcure/projection.hpp"
#include "eventcure/random.hpp"
#include "eventcure/train_config.hpp"

namespace eventcure {

class SequenceEventModel {
 public:
  using Map = Eigen::Map<Eigen::MatrixXd>;
  using ConstMap = Eigen::Map<const Eigen::MatrixXd>;
  using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

  SequenceEventModel() = default;
  /// All parameters start at zero.
  SequenceEventModel(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes);

  /// Uniform [-0.08, 0.08] everywhere except the forget-gate bias, set to 1.
  void initialize(Rng& rng);

  Eigen::Index input_dim() const { return input_dim_; }
  Eigen::Index hidden() const { return hidden_; }
  Eigen::Index classes() const { return classes_; }

  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  // Gate blocks are stacked as [input; forget; output; candidate].
  ConstMap input_weights() const;      // 4h x d
  ConstMap recurrent_weights() const;  // 4h x h
  ConstVecMap gate_bias() const;       // 4h
  ConstMap output_weights() const;     // C x h
  ConstVecMap output_bias() const;     // C

  Eigen::Index input_weights_offset() const { return 0; }
  Eigen::Index recurrent_weights_offset() const { return 4 * hidden_ * input_dim_; }
  Eigen::Index gate_bias_offset() const { return recurrent_weights_offset() + 4 * hidden_ * hidden_; }
  Eigen::Index output_weights_offset() const { return gate_bias_offset() + 4 * hidden_; }
  Eigen::Index output_bias_offset() const { return output_weights_offset() + classes_ * hidden_; }

  PcaTransform pca;

 private:
  Eigen::Index input_dim_ = 0;
  Eigen::Index hidden_ = 0;
  Eigen::Index classes_ = 0;
  Eigen::VectorXd params_;
};

struct LstmState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;
};

/// Everything the backward pass of one step needs.
struct LstmStepCache {
  Eigen::VectorXd x, h_prev, c_prev;
  Eigen::VectorXd input_gate, forget_gate, output_gate, candidate;
  Eigen::VectorXd c, tanh_c;
};

struct LstmStepGradient {
  Eigen::VectorXd dx;
  Eigen::VectorXd dh_prev;
  Eigen::VectorXd dc_prev;
};

/// c' = f*c + i*g, h' = o*tanh(c').
LstmState lstm_step(const SequenceEventModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& h,
                    const Eigen::VectorXd& c, LstmStepCache* cache = nullptr);

/// Back-propagates dLoss/dh' and dLoss/dc' through one step, adding the
/// parameter gradient into `grad`.
LstmStepGradient lstm_step_backward(const SequenceEventModel& model, const LstmStepCache& cache,
                                    const Eigen::VectorXd& dh, const Eigen::VectorXd& dc, Eigen::VectorXd& grad);

/// Mean-pooled hidden state over the album sequence.
Eigen::VectorXd sequence_pooled_state(const SequenceEventModel& model, const Eigen::MatrixXd& projected);

/// Throws EmptyAlbum for zero images.
Eigen::VectorXd predict_sequence_event(const SequenceEventModel& model, const Eigen::MatrixXd& projected);
Eigen::VectorXd predict_sequence_event(const SequenceEventModel& model, const AlbumRecord& album);

/// Cross-entropy for one album against `target`, with full BPTT into `grad`.
double sequence_accumulate_gradient(const SequenceEventModel& model, const Eigen::MatrixXd& projected,
                                    std::size_t target, Eigen::VectorXd& grad);

double sequence_event_epoch(SequenceEventModel& model, const std::vector<ProjectedAlbum>& albums,
                            const TrainConfig& cfg, Rng& rng);

SequenceEventModel train_sequence_event(const DatasetManifest& manifest, const TrainConfig& cfg,
                                        std::vector<double>* epoch_loss = nullptr);

}  // namespace eventcure
