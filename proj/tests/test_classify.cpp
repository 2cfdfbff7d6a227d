#include <doctest.h>

#include <cmath>
#include <limits>

#include "relosc/classify.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/errors.hpp"

using namespace relosc;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<WindowSample> samples(std::initializer_list<int> counts) {
  std::vector<WindowSample> w;
  double x = 1.0;
  for (int n : counts) w.push_back({x *= 2, n});
  return w;
}
}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("window points") {
    WindowPolicy p;
    p.K = 5;
    p.K_stable = 2;
    p.K_grow = 2;
    const auto w = window_points({1.0, kInf}, p);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == 2.0);
    CHECK(w[4] == 32.0);
    const auto f = window_points({0.0, 3.0}, p);
    CHECK(f[0] == 1.0);
    CHECK(f[1] == doctest::Approx(2.0));
    CHECK(f[2] == doctest::Approx(2.5));
    p.K_stable = 6;
    CHECK_THROWS_AS(window_points({1.0, kInf}, p), PreconditionError);
  }

  TEST_CASE("window rule") {
    WindowPolicy p;
    p.K = 8;
    CHECK(window_rule(samples({0, 1, 2, 3, 4, 5, 6, 7}), p) == OscKind::Oscillatory);
    CHECK(window_rule(samples({0, 1, 2, 3, 3, 3, 3, 3}), p) == OscKind::Nonoscillatory);
    CHECK(window_rule(samples({0, 1, 2, 3, 3, 4, 4, 5}), p) == OscKind::Inconclusive);
  }

  TEST_CASE("inverse square potentials") {
    const WindowPolicy policy;
    auto kind = [&](double c, bool certificates) {
      ClassifyOptions o;
      o.use_tail_certificates = certificates;
      return classify_oscillation(build_coefficients(family::InverseSquare{c}, {1.0, kInf}), 0.0,
                                  policy, o);
    };
    CHECK(kind(-0.5, true).kind == OscKind::Oscillatory);
    // Zeros of x^{1/2} sin(log(x) / 2) are e^{2 pi} ~ 535 apart in ratio, so
    // ratio-2 windows see no growth; wider windows do.
    CHECK(kind(-0.5, false).kind == OscKind::Inconclusive);
    WindowPolicy wide;
    wide.ratio = 600.0;
    wide.K = 5;
    wide.K_stable = 2;
    ClassifyOptions bare;
    bare.use_tail_certificates = false;
    const auto inv = build_coefficients(family::InverseSquare{-0.5}, {1.0, kInf});
    CHECK(classify_oscillation(inv, 0.0, wide, bare).kind == OscKind::Oscillatory);
    CHECK(kind(0.0, true).kind == OscKind::Nonoscillatory);
    CHECK(kind(0.0, false).kind == OscKind::Nonoscillatory);
    const auto v = kind(-0.3, true);
    CHECK(v.kind == OscKind::Oscillatory);
    CHECK(v.basis == VerdictBasis::KneserCertificate);
    CHECK(v.certificate.has_value());
    CHECK(kind(-0.2, true).kind == OscKind::Nonoscillatory);
  }

  TEST_CASE("essential spectrum decides away from its bottom") {
    const auto c = build_coefficients(family::Constant{1.0, 2.0, 1.0}, {0.0, kInf});
    const auto below = classify_oscillation(c, 1.0);
    CHECK(below.kind == OscKind::Nonoscillatory);
    CHECK(below.basis == VerdictBasis::EssentialSpectrum);
    CHECK(classify_oscillation(c, 3.0).kind == OscKind::Oscillatory);
    ClassifyOptions o;
    o.use_tail_certificates = false;
    CHECK(classify_oscillation(c, 3.0, {}, o).kind == OscKind::Oscillatory);
  }

  TEST_CASE("regular finite endpoint is nonoscillatory") {
    const auto c = build_coefficients(family::Constant{}, {0.0, 10.0});
    CHECK(classify_oscillation(c, 1.0).kind == OscKind::Nonoscillatory);
  }

  TEST_CASE("relative classification") {
    const auto free = build_coefficients(family::Constant{}, {0.0, kInf});
    CHECK(classify_relative(free, -2.0, free, -1.0).kind == OscKind::Nonoscillatory);
    const auto inv = build_coefficients(family::InverseSquare{-0.5}, {1.0, kInf});
    const auto zero = build_coefficients(family::InverseSquare{0.0}, {1.0, kInf});
    CHECK(classify_relative(zero, 0.0, inv, 0.0).kind == OscKind::Oscillatory);
  }

  TEST_CASE("(alpha), (beta) and invariance") {
    const auto g = geometric_grid(2.0, 1e8, 64);
    const auto c0 = build_coefficients(family::Constant{1.0, 1.0, 1.0}, {1.0, kInf});
    const auto c1 =
        build_coefficients(family::PerturbedWeight{1.0, 1.0, 1.0, 0.5, 1.0, 0.3, 1.5}, {1.0, kInf});
    const auto rep = check_alpha_beta(c0, c1, g);
    CHECK(rep.pass_alpha);
    CHECK(rep.pass_beta);
    CHECK(rep.symmetric_agree);
    CHECK(essential_spectrum_invariance(c0, c1, g).verdict == Invariance::Invariant);

    const auto c2 = build_coefficients(family::Constant{1.0, 1.0, 2.0}, {1.0, kInf});
    const auto inv = essential_spectrum_invariance(c0, c2, g);
    CHECK(inv.verdict == Invariance::Unknown);
    CHECK_FALSE(inv.reason.empty());
    CHECK(essential_spectrum_invariance(c2, c2, g).verdict == Invariance::Invariant);
    CHECK_THROWS_AS(check_alpha_beta(c0, c1, geometric_grid(2.0, 10.0, 8)), PreconditionError);
  }

  TEST_CASE("limit point probe") {
    const auto g = geometric_grid(2.0, 1e8, 64);
    const auto free = build_coefficients(family::Constant{}, {1.0, kInf});
    CHECK(limit_point_probe(free, g).verdict == EndpointClass::LimitPoint);
    // r = x^-4, p = 1: int r and int r x^2 both converge.
    const auto lc =
        build_coefficients(family::PowerLaw{{1, 0, 0}, {0, 0, 0}, {0, 1, -4}}, {1.0, kInf});
    CHECK(limit_point_probe(lc, g).verdict == EndpointClass::LimitCircle);
  }
}
