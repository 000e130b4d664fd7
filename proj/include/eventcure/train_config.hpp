#pragma once

#include <cstddef>
#include <cstdint>

#include <Eigen/Core>

namespace eventcure {

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 30;
  std::size_t batch_size = 16;
  std::uint64_t seed = 1;
  double margin_similar = 0.1;
  double margin_different = 0.3;
  Eigen::Index hidden = 32;
  Eigen::Index reduced_dim = 16;
  std::size_t pairs_per_album = 20;

  /// Throws ConfigError (or InvalidMargins) on out-of-range fields.
  void validate() const;
};

}  // namespace eventcure
