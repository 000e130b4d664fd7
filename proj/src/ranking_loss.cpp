#include "eventcure/ranking_loss.hpp"

#include <algorithm>

#include "eventcure/error.hpp"

namespace eventcure {

RankingLoss piecewise_ranking_loss(double predicted, double target, double similar_margin, double different_margin) {
  if (!(similar_margin >= 0.0 && similar_margin < different_margin)) {
    throw Error(ErrorKind::InvalidMargins, "need 0 <= m_s < m_d");
  }
  RankingLoss out;
  if (target > similar_margin) {
    const double gap = std::max(0.0, different_margin - predicted);
    out.loss = 0.5 * gap * gap;
    out.d_loss_d_predicted = -gap;
  } else if (target < -similar_margin) {
    const double gap = std::max(0.0, different_margin + predicted);
    out.loss = 0.5 * gap * gap;
    out.d_loss_d_predicted = gap;
  } else {
    const double above = std::max(0.0, predicted - similar_margin);
    const double below = std::max(0.0, -predicted - similar_margin);
    out.loss = 0.5 * (above * above + below * below);
    out.d_loss_d_predicted = above - below;
  }
  return out;
}

}  // namespace eventcure
