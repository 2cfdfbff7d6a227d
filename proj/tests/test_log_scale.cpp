#include <doctest.h>

#include <cmath>
#include <numbers>

#include "relosc/errors.hpp"
#include "relosc/log_scale.hpp"

using namespace relosc;

TEST_SUITE("log_scale") {
  TEST_CASE("e sequence") {
    CHECK(std::isinf(e_threshold(-1)));
    CHECK(e_threshold(-1) < 0);
    CHECK(e_threshold(0) == 0.0);
    CHECK(e_threshold(1) == 1.0);
    CHECK(e_threshold(2) == doctest::Approx(std::numbers::e).epsilon(1e-15));
    CHECK(e_threshold(3) == doctest::Approx(std::exp(std::numbers::e)).epsilon(1e-15));
  }

  TEST_CASE("n = 0 is the identity scale") {
    for (double x : {0.5, 2.0, 1e6}) {
      CHECK(log_product(0, x) == x);
      CHECK(kneser_q(0, x) == 0.0);
      CHECK(inverse_log_product_sum(0, x) == 0.0);
    }
    CHECK(log_product(-1, 7.0) == 1.0);
  }

  TEST_CASE("n = 1 at e^2") {
    const double x = std::exp(2.0);
    CHECK(log_product(1, x) == doctest::Approx(2 * x).epsilon(1e-15));
    CHECK(kneser_q(1, x) == doctest::Approx(-1.0 / (4 * std::exp(4.0))).epsilon(1e-15));
  }

  TEST_CASE("log_n follows the |log| convention and rejects x <= e_{n-1}") {
    CHECK(iterated_log(2, 2.0) == doctest::Approx(std::log(std::log(2.0))));
    CHECK(iterated_log(2, 2.0) < 0);  // continuous but negative below e_2
    CHECK_THROWS_AS(iterated_log(2, 1.0), DomainError);
    CHECK_THROWS_AS(iterated_log(1, 0.0), DomainError);
  }

  TEST_CASE("1/L_n is the derivative of log_{n+1}") {
    const double h = 1e-4;
    for (int n = 0; n <= 3; ++n) {
      for (double x = e_threshold(n) + 1; x < 1e6; x *= 3.7) {
        const double fd = (iterated_log(n + 1, x + h) - iterated_log(n + 1, x - h)) / (2 * h);
        CHECK(fd == doctest::Approx(1.0 / log_product(n, x)).epsilon(1e-6));
      }
    }
  }
}
