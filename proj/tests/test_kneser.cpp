#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/errors.hpp"
#include "relosc/kneser.hpp"
#include "relosc/log_scale.hpp"

using namespace relosc;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<KneserSample> constant_samples(double level) {
  std::vector<KneserSample> s;
  for (double x : geometric_grid(10.0, 1e10, 64)) s.push_back({x, level});
  return s;
}
}  // namespace

TEST_SUITE("kneser") {
  TEST_CASE("d'Alembert companion against Simpson") {
    auto u0 = [](double x) { return x; };
    auto p0 = [](double) { return 1.0; };
    for (double x : {2.0, 5.0, 40.0}) CHECK(dalembert(u0, p0, 1.0, x) == doctest::Approx(x - 1.0).epsilon(1e-10));
    auto u1 = [](double x) { return 1.0 + 0.5 * std::sin(x); };
    auto p1 = [](double x) { return 2.0 + std::cos(x); };
    const double x = 7.3;
    const double ref =
        u1(x) * oracle::simpson([&](double t) { return 1 / (p1(t) * u1(t) * u1(t)); }, 0.5, x, 20000);
    CHECK(dalembert(u1, p1, 0.5, x) == doctest::Approx(ref).epsilon(1e-9));
    CHECK_THROWS_AS(dalembert([](double t) { return t - 3.0; }, p0, 1.0, 5.0), PositivityError);
  }

  TEST_CASE("n = 0 pair: Delta = x^2 (q1 - q0) for c1 = c/x^2") {
    const auto c0 = build_coefficients(family::Constant{}, {1.0, kInf});
    const auto c1 = build_coefficients(family::InverseSquare{-0.3}, {1.0, kInf});
    const auto pair = log_scale_pair(0, 1.0);
    for (double x : {2.0, 30.0, 1e4}) {
      CHECK(delta(c0, c1, 0.0, pair, x) == doctest::Approx(-0.3).epsilon(1e-9));
      CHECK(delta_tilde(c1, 0, x) == doctest::Approx(-0.3).epsilon(1e-12));
    }
  }

  TEST_CASE("Delta tilde of IteratedLog is gamma / p_inf") {
    for (int n = 0; n <= 3; ++n) {
      const double a = e_threshold(n) + 1.0;
      const auto c = build_coefficients(family::IteratedLog{n, 0.7, 1.0, 2.0, 1.0, 0.0}, {a, kInf});
      for (double t : {1.0, 5.0, 20.0}) {
        const double x = a * std::exp(t);
        CHECK(delta_tilde(c, n, x) == doctest::Approx(0.35).epsilon(1e-7));
        CHECK(delta_tilde_reduced(c, n, x) == doctest::Approx(0.35).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("Delta against Delta tilde on the log scale") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> t(1.0, 12.0);
    for (int n = 1; n <= 2; ++n) {
      const double a = e_threshold(n) + 1.0;
      const auto c0 = build_coefficients(family::IteratedLog{n, 0.0, 1.0, 1.0, 1.0, 0.0}, {a, kInf});
      const auto c1 = build_coefficients(family::IteratedLog{n, -0.2, 1.0, 1.0, 1.0, 0.0}, {a, kInf});
      const auto pair = log_scale_pair(n, 1.0);
      for (int i = 0; i < 10; ++i) {
        const double x = a * std::exp(t(rng));
        CHECK(std::fabs(delta(c0, c1, 1.0, pair, x) - delta_tilde(c1, n, x)) < 1e-8);
      }
    }
  }

  TEST_CASE("errors") {
    const auto fin = build_coefficients(family::Constant{}, {1.0, 10.0});
    CHECK_THROWS_AS(delta_tilde(fin, 0, 5.0), MissingTail);
    const auto c = build_coefficients(family::InverseSquare{-0.3}, {3.0, kInf});
    CHECK_THROWS_AS(delta_tilde(c, 1, 2.0), DomainError);
  }

  TEST_CASE("minimality and side conditions") {
    const auto pair = log_scale_pair(0, 1.0);
    const auto g = geometric_grid(2.0, 1e8, 64);
    CHECK(minimality_check(pair, g).verdict == GrowthVerdict::Diverging);
    const auto c1 = build_coefficients(family::InverseSquare{-0.3}, {1.0, kInf});
    CHECK(aventura_check(c1, 1, geometric_grid(4.0, 1e8, 64)));
    const auto wobbly = build_coefficients(family::PowerLaw{{1, 0, 0}, {0, -0.3, -2}, {1, 0, 0}},
                                           {1.0, kInf});
    const auto c0 = build_coefficients(family::Constant{}, {1.0, kInf});
    CHECK(side_conditions_thm_gu(c0, wobbly, pair, g).passed);
  }

  TEST_CASE("pointwise classification") {
    const auto osc = kneser_classify(constant_samples(-0.3));
    CHECK(osc.verdict == KneserVerdict::Oscillatory);
    CHECK(osc.sup_tail == doctest::Approx(-0.3));
    CHECK(kneser_classify(constant_samples(-0.2)).verdict == KneserVerdict::Nonoscillatory);
    CHECK(kneser_classify(constant_samples(-0.25)).verdict == KneserVerdict::Inconclusive);
    // Inside the margin band.
    CHECK(kneser_classify(constant_samples(-0.255)).verdict == KneserVerdict::Inconclusive);
    CHECK(kneser_classify(constant_samples(-0.255), 0.001).verdict == KneserVerdict::Oscillatory);
  }

  TEST_CASE("averaged mode") {
    KneserOptions opt;
    opt.mode = KneserMode::Averaged;
    opt.ell_grid = {2 * std::numbers::pi};
    auto fn = [](double x) { return -0.2 + 0.5 * std::sin(x); };
    const auto g = geometric_grid(10.0, 1e9, 256);
    // Pointwise the band straddles -1/4.
    KneserOptions pw;
    CHECK(kneser_classify(fn, g, pw).verdict == KneserVerdict::Inconclusive);
    // Without rho the averaged hypotheses cannot be checked.
    const auto no_rho = kneser_classify(fn, g, opt);
    CHECK(no_rho.verdict == KneserVerdict::Inconclusive);
    CHECK_FALSE(no_rho.note.empty());
    const auto with_rho = kneser_classify(fn, g, opt, [](double x) { return 1.0 / x; });
    REQUIRE(with_rho.rho.has_value());
    CHECK(with_rho.rho->passed());
    CHECK(with_rho.verdict == KneserVerdict::Nonoscillatory);
  }
}
