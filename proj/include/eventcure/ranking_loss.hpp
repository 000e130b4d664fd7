#pragma once

namespace eventcure {

struct RankingLoss {
  double loss = 0.0;
  double d_loss_d_predicted = 0.0;
};

/// Pairwise loss on a predicted score difference `predicted` given the
/// ground-truth difference `target`. Pairs with |target| <= similar_margin are
/// pushed into the band [-similar_margin, similar_margin]; other pairs must
/// clear different_margin in the direction of `target`.
///
///   |G| <= m_s : 1/2 [max(0, D - m_s)^2 + max(0, -D - m_s)^2]
///   G  >  m_s : 1/2 max(0, m_d - D)^2
///   G  < -m_s : 1/2 max(0, m_d + D)^2
///
/// Throws InvalidMargins unless 0 <= m_s < m_d.
RankingLoss piecewise_ranking_loss(double predicted, double target, double similar_margin, double different_margin);

}  // namespace eventcure
