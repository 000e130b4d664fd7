#include "eventcure/train_config.hpp"

#include "eventcure/error.hpp"

namespace eventcure {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::ConfigError, "learning rate must be positive");
  if (epochs < 1) throw Error(ErrorKind::ConfigError, "epochs must be at least 1");
  if (batch_size < 1) throw Error(ErrorKind::ConfigError, "batch size must be at least 1");
  if (hidden < 0) throw Error(ErrorKind::ConfigError, "hidden width must be non-negative");
  if (reduced_dim < 1) throw Error(ErrorKind::ConfigError, "reduced dimension must be at least 1");
  if (!(margin_similar >= 0.0 && margin_similar < margin_different)) {
    throw Error(ErrorKind::InvalidMargins, "need 0 <= m_s < m_d");
  }
}

}  // namespace eventcure
