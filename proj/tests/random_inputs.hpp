#pragma once

// Random but valid fusion inputs for property checks.

#include "eventcure/fusion.hpp"
#include "eventcure/random.hpp"

namespace eventcure::testing {

inline Eigen::VectorXd random_distribution(Eigen::Index c, Rng& rng) {
  Eigen::VectorXd p(c);
  for (Eigen::Index k = 0; k < c; ++k) p(k) = -std::log(1.0 - uniform01(rng));  // exponential draws
  return p / p.sum();
}

inline FusionInputs random_fusion_inputs(Rng& rng, Eigen::Index max_images = 20, Eigen::Index max_events = 8) {
  std::uniform_int_distribution<Eigen::Index> images(1, max_images), events(2, max_events);
  const Eigen::Index n = images(rng), c = events(rng);
  FusionInputs in;
  in.q.resize(n, c);
  in.w.resize(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    in.q.row(i) = random_distribution(c, rng).transpose();
    for (Eigen::Index k = 0; k < c; ++k) in.w(i, k) = uniform01(rng);
  }
  in.p_hat = random_distribution(c, rng);
  return in;
}

inline FusionConfig random_fusion_config(Rng& rng) {
  FusionConfig cfg;
  cfg.alpha = 4.0 * uniform01(rng);
  cfg.mask_fraction = uniform01(rng);
  cfg.use_anchor = uniform01(rng) < 0.5;
  return cfg;
}

}  // namespace eventcure::testing
