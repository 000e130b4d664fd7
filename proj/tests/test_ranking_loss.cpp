#include <doctest.h>

#include "eventcure/error.hpp"
#include "eventcure/ranking_loss.hpp"
#include "gradient_suite.hpp"

using namespace eventcure;

TEST_CASE("hand-evaluated ranking loss values") {
  const auto met = piecewise_ranking_loss(0.3, 0.5, 0.1, 0.3);
  CHECK(met.loss == 0.0);
  CHECK(met.d_loss_d_predicted == 0.0);

  const auto zero = piecewise_ranking_loss(0.0, 0.0, 0.1, 0.3);
  CHECK(zero.loss == 0.0);

  const auto short_of_margin = piecewise_ranking_loss(0.0, 0.5, 0.1, 0.3);
  CHECK(short_of_margin.loss == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(short_of_margin.d_loss_d_predicted == doctest::Approx(-0.3).epsilon(1e-12));

  // Mirror image for a negative target.
  const auto negative = piecewise_ranking_loss(0.0, -0.5, 0.1, 0.3);
  CHECK(negative.loss == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(negative.d_loss_d_predicted == doctest::Approx(0.3).epsilon(1e-12));

  // Similar pair predicted too far apart: 1/2 (0.4 - 0.1)^2.
  const auto similar = piecewise_ranking_loss(0.4, 0.05, 0.1, 0.3);
  CHECK(similar.loss == doctest::Approx(0.045).epsilon(1e-12));
  CHECK(similar.d_loss_d_predicted == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("margins are validated") {
  CHECK_THROWS_AS(piecewise_ranking_loss(0.0, 0.0, 0.3, 0.3), Error);
  CHECK_THROWS_AS(piecewise_ranking_loss(0.0, 0.0, -0.1, 0.3), Error);
  try {
    piecewise_ranking_loss(0.0, 0.0, 0.4, 0.3);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidMargins);
  }
}

TEST_CASE("loss is non-negative and continuous at every piece boundary") {
  constexpr double ms = 0.1, md = 0.3, h = 1e-9;
  for (double g : {-0.8, -0.3, -ms, -0.05, 0.0, 0.05, ms, 0.3, 0.8}) {
    for (double d : {-md, -ms, 0.0, ms, md}) {
      const double left = piecewise_ranking_loss(d - h, g, ms, md).loss;
      const double right = piecewise_ranking_loss(d + h, g, ms, md).loss;
      CHECK(std::abs(left - right) < 1e-8);
    }
  }
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double d = 4.0 * uniform01(rng) - 2.0;
    const double g = 2.0 * uniform01(rng) - 1.0;
    CHECK(piecewise_ranking_loss(d, g, ms, md).loss >= 0.0);
  }
}

TEST_CASE("derivative matches finite differences") {
  CHECK(testing::ranking_loss_gradient_error(1, 200) < 1e-6);
}
