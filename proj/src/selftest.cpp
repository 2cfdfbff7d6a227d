#include "relosc/selftest.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "relosc/classify.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/errors.hpp"
#include "relosc/kneser.hpp"
#include "relosc/log_scale.hpp"
#include "relosc/pruefer.hpp"
#include "relosc/relative.hpp"
#include "relosc/spectra.hpp"

namespace relosc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kLoggedDraws = 4;
constexpr std::size_t kLoggedMessages = 8;

class Suite {
 public:
  Suite(std::string name, std::uint64_t seed, std::uint64_t salt)
      : rng_(seed * 0x9e3779b97f4a7c15ULL + salt) {
    result_.name = std::move(name);
  }

  double uniform(double lo, double hi) {
    const double v = std::uniform_real_distribution<double>(lo, hi)(rng_);
    if (result_.draws.size() < kLoggedDraws) result_.draws.push_back(v);
    return v;
  }

  void check(bool ok, const std::string& what) {
    ++result_.checks;
    if (ok) return;
    ++result_.failures;
    if (result_.messages.size() < kLoggedMessages) result_.messages.push_back(what);
  }

  SuiteResult finish() { return std::move(result_); }

 private:
  std::mt19937_64 rng_;
  SuiteResult result_;
};

std::string str(double v) {
  std::ostringstream ss;
  ss.precision(12);
  ss << v;
  return ss.str();
}

void coeffs_suite(Suite& s) {
  const auto inv = build_coefficients(family::InverseSquare{-0.3, 2.0, 1.5, 0.5}, {1.0, kInf});
  const auto pw =
      build_coefficients(family::PerturbedWeight{1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 2.0}, {0.5, kInf});
  for (int i = 0; i < 20; ++i) {
    const double x = std::exp(s.uniform(0.0, 20.0));
    const CoeffValues v = inv(x);
    s.check(std::fabs(v.q - (2.0 - 0.3 / (x * x))) <= 1e-14 * std::fabs(v.q) &&
                v.p == 1.5 && v.r == 0.5,
            "InverseSquare evaluation at x = " + str(x));
    const CoeffValues w = pw(x);
    const double r_ref = 1.0 + std::pow(x, -2.0);
    s.check(std::fabs(w.r - r_ref) <= 1e-14 * r_ref, "PerturbedWeight r at x = " + str(x));
  }
  for (int n = 1; n <= 3; ++n) {
    const double a = e_threshold(n) + 1.0;
    const auto il = build_coefficients(family::IteratedLog{n, 0.0, 0.0, 1.0, 1.0, 0.0}, {a, kInf});
    for (int i = 0; i < 10; ++i) {
      const double x = a * std::exp(s.uniform(0.0, 15.0));
      const double resid = il.q(x) - kneser_q(n, x);
      const double tol = 4 * std::numeric_limits<double>::epsilon() * std::fabs(kneser_q(n, x));
      s.check(std::fabs(resid) <= tol, "IteratedLog q - Q_n at n = " + std::to_string(n));
    }
  }
  s.check(essential_bottom(pw) == 1.0, "essential bottom of PerturbedWeight");
}

void counting_suite(Suite& s, const CountingPolicy& policy) {
  // Angles one ulp either side of k pi must snap to k.
  for (int k = 1; k <= 50; ++k) {
    const double t = k * kPi;
    s.check(ceil_div_pi(std::nextafter(t, kInf), policy) == k &&
                ceil_div_pi(std::nextafter(t, 0.0), policy) == k,
            "ceil snap at " + std::to_string(k) + " pi");
    s.check(floor_div_pi(std::nextafter(t, kInf), policy) == k &&
                floor_div_pi(std::nextafter(t, 0.0), policy) == k,
            "floor snap at " + std::to_string(k) + " pi");
  }
  // u = sin x: zeros in (0, x) at the multiples of pi.
  const auto c = build_coefficients(family::Constant{}, {0.0, 21 * kPi});
  std::vector<double> cps;
  for (int k = 1; k <= 20; ++k) cps.push_back(k * kPi);
  IntegrateOptions opt;
  opt.checkpoints = cps;
  const SolutionTrace tr = integrate_pruefer(c, 1.0, 0.0, 21 * kPi, opt);
  for (int k = 1; k <= 20; ++k) {
    s.check(count_zeros(tr, k * kPi, policy) == k - 1,
            "count_zeros at " + std::to_string(k) + " pi");
  }
  for (int i = 0; i < 20; ++i) {
    const double x = s.uniform(0.1, 20 * kPi);
    const int expect = static_cast<int>(std::floor(x / kPi));
    if (std::fabs(x - std::round(x / kPi) * kPi) < 1e-6) continue;
    s.check(count_zeros(tr, x, policy) == expect, "count_zeros at x = " + str(x));
  }
}

void relative_suite(Suite& s) {
  const auto c = build_coefficients(family::Constant{}, {0.0, 12.0});
  for (int i = 0; i < 5; ++i) {
    double l0 = s.uniform(-2.0, 5.0);
    double l1 = s.uniform(-2.0, 5.0);
    if (l0 > l1) std::swap(l0, l1);
    if (l1 - l0 < 1e-3) l1 = l0 + 0.5;
    const RelativeTrace rt(integrate_pruefer(c, l0, 0.0, 12.0),
                           integrate_pruefer(c, l1, 0.0, 12.0));
    for (int j = 0; j < 3; ++j) {
      const double x = s.uniform(0.5, 12.0);
      const int n = relative_count(rt, x);
      const DenseZeroCount d = wronskian_zero_count_dense(rt, x, 2000);
      s.check(n == d.count, "relative_count vs dense oracle, lambda = " + str(l0) + ", " + str(l1) +
                                ", x = " + str(x));
    }
  }
  const RelativeTrace self(integrate_pruefer(c, 1.0, 0.0, 12.0),
                           integrate_pruefer(c, 1.0, 0.0, 12.0));
  s.check(self.degenerate() && relative_count(self, 10.0) == -1 &&
              modified_wronskian(self, 10.0) == 0.0,
          "self comparison is degenerate with N = -1");
}

void classify_suite(Suite& s) {
  const WindowPolicy policy;
  auto verdict = [&](double c) {
    const auto cs = build_coefficients(family::InverseSquare{c}, {1.0, kInf});
    return classify_oscillation(cs, 0.0, policy).kind;
  };
  s.check(verdict(-0.5) == OscKind::Oscillatory, "q = -0.5/x^2 oscillatory at 0");
  s.check(verdict(0.0) == OscKind::Nonoscillatory, "q = 0 nonoscillatory at 0");
  const auto free = build_coefficients(family::Constant{}, {0.0, kInf});
  s.check(gap_finiteness(free, -2.0, -1.0).kind == OscKind::Nonoscillatory,
          "gap (-2, -1) below [0, inf) is finite");
  const double lam = s.uniform(-3.0, -0.5);
  s.check(classify_oscillation(free, lam).kind == OscKind::Nonoscillatory,
          "free operator below 0 at lambda = " + str(lam));
}

void kneser_suite(Suite& s) {
  for (int n = 1; n <= 2; ++n) {
    const double a = e_threshold(n) + 1.0;
    const auto c0 = build_coefficients(family::IteratedLog{n, 0.0, 1.0, 1.0, 1.0, 0.0}, {a, kInf});
    const auto c1 =
        build_coefficients(family::PerturbedWeight{1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 2.0}, {a, kInf});
    const PrincipalPair pair = log_scale_pair(n, 1.0);
    for (int i = 0; i < 10; ++i) {
      const double x = a * std::exp(s.uniform(1.0, 12.0));
      const double d = delta(c0, c1, 1.0, pair, x);
      const double dt = delta_tilde(c1, n, x);
      s.check(std::fabs(d - dt) < 1e-8, "Delta vs Delta tilde at n = " + std::to_string(n) +
                                            ", x = " + str(x));
    }
  }
  auto synthetic = [&](double level) {
    std::vector<KneserSample> samples;
    for (double x : geometric_grid(10.0, 1e10, 64)) samples.push_back({x, level});
    return kneser_classify(samples).verdict;
  };
  s.check(synthetic(-0.3) == KneserVerdict::Oscillatory, "constant -0.3 oscillatory");
  s.check(synthetic(-0.2) == KneserVerdict::Nonoscillatory, "constant -0.2 nonoscillatory");
  s.check(synthetic(-0.25) == KneserVerdict::Inconclusive, "constant -1/4 inconclusive");
}

void spectra_suite(Suite& s) {
  const auto c = build_coefficients(family::Constant{}, {0.0, kPi});
  const TruncatedProblem tp{c, kPi};
  s.check(count_below(tp, 5.0).count == 2, "Dirichlet (0, pi) below 5");
  s.check(count_below(tp, 1.0).count == 0, "Dirichlet (0, pi) below 1 is strict");
  s.check(fd_inertia_count(tp, 5.0, 2000).count == 2, "FD inertia (0, pi) below 5");
  const auto inv = build_coefficients(family::InverseSquare{-0.3}, {1.0, kInf});
  int prev = 0;
  for (int i = 0; i < 4; ++i) {
    const double lam = s.uniform(0.0, 1.0) + i;
    const TruncatedProblem t{inv, 30.0};
    const int a = count_below(t, lam).count;
    const int b = fd_inertia_count(t, lam).count;
    s.check(std::abs(a - b) <= 1, "shooting vs FD at lambda = " + str(lam));
    s.check(a >= prev, "count monotone in lambda");
    prev = a;
  }
}

}  // namespace

bool SelftestReport::passed() const {
  for (const auto& s : suites) {
    if (!s.passed()) return false;
  }
  return true;
}

std::string to_string(Fault f) { return f == Fault::SnapZero ? "snap0" : "none"; }

SelftestReport run_selftest(const SelftestOptions& options) {
  SelftestReport report;
  report.seed = options.seed;
  report.fault = options.fault;
  const CountingPolicy policy{options.fault == Fault::SnapZero ? 0.0 : CountingPolicy{}.snap_rtol};

  const std::vector<std::pair<std::string, std::function<void(Suite&)>>> suites = {
      {"coeffs", coeffs_suite},
      {"counting", [&](Suite& s) { counting_suite(s, policy); }},
      {"relative", relative_suite},
      {"classify", classify_suite},
      {"kneser", kneser_suite},
      {"spectra", spectra_suite},
  };
  std::uint64_t salt = 0;
  for (const auto& [name, body] : suites) {
    Suite suite(name, options.seed, ++salt);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(suite);
    } catch (const std::exception& e) {
      suite.check(false, std::string("exception: ") + e.what());
    }
    SuiteResult r = suite.finish();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.suites.push_back(std::move(r));
  }
  return report;
}

}  // namespace relosc
