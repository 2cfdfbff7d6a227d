// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances and runtime budgets are pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relosc/classify.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/kneser.hpp"
#include "relosc/log_scale.hpp"
#include "relosc/pruefer.hpp"
#include "relosc/relative.hpp"
#include "relosc/spectra.hpp"
#include "relosc/tail.hpp"

using namespace relosc;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// AC1
constexpr int kAc1Count = 99;
constexpr double kAc1ZeroTol = 1e-8;
constexpr double kAc1Budget = 1.0;
// AC2
constexpr int kAc2SamePairs = 20;
constexpr int kAc2CrossPairs = 5;
constexpr int kAc2Points = 20;
constexpr int kAc2DenseGrid = 4000;
constexpr double kAc2Budget = 30.0;
// AC3
constexpr int kAc3Trials = 200;
constexpr double kAc3Budget = 60.0;
// AC4
constexpr int kAc4Windows = 20;  // x0 = 2, ratio 2: last window at 2^20
constexpr double kAc4Budget = 60.0;
// AC5
constexpr double kAc5TildeTol = 1e-8;
constexpr int kAc5MethodGap = 1;
constexpr double kAc5Budget = 300.0;
// AC6
constexpr int kAc6Points = 100;
constexpr double kAc6Tol = 1e-8;
constexpr double kAc6Budget = 10.0;
// AC7
constexpr int kAc7Grid = 4000;
constexpr int kAc7Gap = 1;
constexpr double kAc7Budget = 120.0;
// AC8
constexpr double kAc8Tol = 1e-6;
constexpr double kAc8Upper = 1e6;
constexpr double kAc8Budget = 10.0;
// AC9
constexpr double kAc9Budget = 120.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) {
      ++failures_;
      if (first_.empty()) first_ = what;
    }
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream ss;
    ss << summary << "; " << checks_ - failures_ << "/" << checks_ << " checks";
    if (failures_) ss << "; first failure: " << first_;
    return {failures_ == 0, ss.str()};
  }

 private:
  int checks_ = 0;
  int failures_ = 0;
  std::string first_;
};

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

// AC1: sin x on (0, 100 pi).
Outcome ac1() {
  Tally t;
  const double b = 100 * kPi;
  const auto c = build_coefficients(family::Constant{}, {0.0, b});
  const double x = b - 0.1;
  const auto tr = integrate_pruefer(c, 1.0, 0.0, x);
  const int n = count_zeros(tr, x);
  t.expect(n == kAc1Count, "count_zeros = " + std::to_string(n));
  const auto z = zero_positions(tr);
  t.expect(z.size() == static_cast<std::size_t>(kAc1Count),
           "zero_positions size " + std::to_string(z.size()));
  double worst = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) worst = std::max(worst, std::fabs(z[k] - (k + 1) * kPi));
  t.expect(worst < kAc1ZeroTol, "max |x_k - k pi| = " + num(worst));
  return t.outcome("N = " + std::to_string(n) + ", max zero error " + num(worst));
}

// Coefficient sets with cond_strict partners for AC2.
std::vector<CoefficientSet> ac2_families(const Interval& iv) {
  return {
      build_coefficients(family::Constant{}, iv),
      build_coefficients(family::Constant{2.0, 0.5, 0.7}, iv),
      build_coefficients(family::InverseSquare{-0.3, 0.2, 1.0, 1.0}, iv),
      build_coefficients(family::PowerLaw{{1, 0.5, -1}, {0, 3, -1}, {1, 0.5, -2}}, iv),
      build_coefficients(family::PerturbedWeight{1.5, 0.5, 1.0, 1.0, 1.0, -0.5, 1.0}, iv),
  };
}

// AC2: relative_count against the dense Wronskian oracle.
Outcome ac2() {
  Tally t;
  std::mt19937_64 rng(20220202);
  std::uniform_real_distribution<double> lam(-2.0, 5.0), ang(0.0, kPi);
  const Interval iv{1.0, 31.0};
  std::uniform_real_distribution<double> pos(iv.a + 1e-3, iv.b);
  const auto fams = ac2_families(iv);
  const auto grid = geometric_grid(iv.a, iv.b, 400);
  int compared = 0;
  auto run_pair = [&](const CoefficientSet& c0, double l0, const CoefficientSet& c1, double l1,
                      const std::string& label) {
    const auto cond = check_conditions(c0, l0, c1, l1, grid);
    t.expect(cond.cond_strict, label + ": cond_strict");
    const RelativeTrace rt(integrate_pruefer(c0, l0, ang(rng), iv.b),
                           integrate_pruefer(c1, l1, ang(rng), iv.b));
    for (int j = 0; j < kAc2Points; ++j) {
      const double x = pos(rng);
      const int n = relative_count(rt, x);
      const auto d = wronskian_zero_count_dense(rt, x, kAc2DenseGrid);
      t.expect(!d.grid_too_coarse, label + ": dense grid too coarse at x = " + num(x));
      t.expect(n == d.count, label + ": N = " + std::to_string(n) +
                                 ", dense = " + std::to_string(d.count) + " at x = " + num(x));
      ++compared;
    }
  };
  for (int i = 0; i < kAc2SamePairs; ++i) {
    double l0 = lam(rng);
    double l1 = lam(rng);
    if (l0 > l1) std::swap(l0, l1);
    if (l1 - l0 < 1e-3) l1 = l0 + 1e-3;
    const auto& c = fams[i % fams.size()];
    run_pair(c, l0, c, l1, "same pair " + std::to_string(i));
  }
  // Cross pairs: c0 has the larger p and the larger q - lambda r.
  const std::vector<std::pair<CoefficientSet, CoefficientSet>> cross = {
      {build_coefficients(family::PowerLaw{{1, 0.5, -1}, {0, 3, -1}, {1, 0, 0}}, iv), fams[0]},
      {fams[1], build_coefficients(family::Constant{1.5, 0.0, 0.7}, iv)},
      {build_coefficients(family::InverseSquare{0.3, 0.2, 1.0, 1.0}, iv), fams[2]},
      {fams[3], build_coefficients(family::PowerLaw{{1, 0.2, -1}, {0, 1, -1}, {1, 0.5, -2}}, iv)},
      {fams[4], build_coefficients(family::PerturbedWeight{1.0, 0.5, 1.0, 1.0, 1.0, -1.0, 1.0}, iv)},
  };
  for (int i = 0; i < kAc2CrossPairs; ++i) {
    double l0 = lam(rng);
    double l1 = lam(rng);
    if (l0 > l1) std::swap(l0, l1);
    if (l1 - l0 < 1e-3) l1 = l0 + 1e-3;
    run_pair(cross[i].first, l0, cross[i].second, l1, "cross pair " + std::to_string(i));
  }
  return t.outcome(std::to_string(kAc2SamePairs + kAc2CrossPairs) + " pairs, " +
                   std::to_string(compared) + " points");
}

// AC3: (lady), (klotz), (gaga) and the band [N - 4, N + 2].
Outcome ac3() {
  Tally t;
  std::mt19937_64 rng(31415);
  std::uniform_real_distribution<double> lam(-2.0, 8.0), ang(0.0, kPi), unit(0.0, 1.0);
  const Interval iv{1.0, 41.0};
  const std::vector<CoefficientSet> fams = {
      build_coefficients(family::Constant{}, iv),
      build_coefficients(family::Constant{0.5, 1.0, 2.0}, iv),
      build_coefficients(family::InverseSquare{-2.0, 0.0, 1.0, 1.0}, iv),
      build_coefficients(family::PowerLaw{{1, 0.5, -1}, {0, 3, -1}, {1, 0.5, -2}}, iv),
      build_coefficients(family::PerturbedWeight{2.0, -0.5, 1.0, 1.0, 1.0, 1.0, 1.0}, iv),
      build_coefficients(family::Oscillating{1.0, 0.0, 1.0, 2.0, 3.0, false}, iv),
  };
  auto pick = [&]() -> const CoefficientSet& {
    return fams[static_cast<std::size_t>(unit(rng) * fams.size()) % fams.size()];
  };
  int points = 0;
  for (int trial = 0; trial < kAc3Trials; ++trial) {
    const auto& c0 = pick();
    const auto& c1 = pick();
    const auto& c2 = pick();
    const double l0 = lam(rng), l1 = lam(rng), l2 = lam(rng);
    const auto u0 = std::make_shared<const SolutionTrace>(integrate_pruefer(c0, l0, ang(rng), iv.b));
    const auto u1 = std::make_shared<const SolutionTrace>(integrate_pruefer(c1, l1, ang(rng), iv.b));
    const auto u2 = std::make_shared<const SolutionTrace>(integrate_pruefer(c2, l2, ang(rng), iv.b));
    const auto v0 = std::make_shared<const SolutionTrace>(integrate_pruefer(c0, l0, ang(rng), iv.b));
    const auto v1 = std::make_shared<const SolutionTrace>(integrate_pruefer(c1, l1, ang(rng), iv.b));
    const RelativeTrace r01(u0, u1), r10(u1, u0), r12(u1, u2), r02(u0, u2), rv(v0, v1);
    const std::string tag = "trial " + std::to_string(trial);
    for (int j = 0; j < 5; ++j) {
      const double x = iv.a + (iv.b - iv.a) * (0.01 + 0.99 * unit(rng));
      const int n01 = relative_count(r01, x);
      const int n10 = relative_count(r10, x);
      const int n12 = relative_count(r12, x);
      const int n02 = relative_count(r02, x);
      const int nv = relative_count(rv, x);
      const int d = count_zeros(*u1, x) - count_zeros(*u0, x);
      t.expect(d - 3 <= n01 && n01 <= d + 1, tag + ": (lady)");
      t.expect(-n10 - 2 <= n01 && n01 <= -n10, tag + ": (klotz)");
      t.expect(n01 + n12 - 1 <= n02 && n02 <= n01 + n12 + 1, tag + ": (gaga)");
      t.expect(n01 - 4 <= nv && nv <= n01 + 2, tag + ": band");
      ++points;
    }
  }
  return t.outcome(std::to_string(kAc3Trials) + " trials, " + std::to_string(points) + " points");
}

// AC4: Kneser threshold for q = c / x^2 at lambda = 0.
Outcome ac4() {
  Tally t;
  WindowPolicy policy;
  policy.K = kAc4Windows;
  const std::vector<std::pair<double, OscKind>> cases = {
      {-0.5, OscKind::Oscillatory},    {-0.3, OscKind::Oscillatory},
      {-0.2, OscKind::Nonoscillatory}, {0.0, OscKind::Nonoscillatory},
      {0.1, OscKind::Nonoscillatory},
  };
  std::string summary;
  for (const auto& [c, want] : cases) {
    const auto cs = build_coefficients(family::InverseSquare{c}, {1.0, kInf});
    const auto v = classify_oscillation(cs, 0.0, policy);
    t.expect(v.kind == want, "c = " + num(c) + " gave " + to_string(v.kind));
    summary += (summary.empty() ? "" : ", ") + num(c) + ": " + to_string(v.kind) + " via " +
               to_string(v.basis);
  }
  const double last = window_points({1.0, kInf}, policy).back();
  t.expect(last == std::ldexp(1.0, 20), "last window " + num(last));
  return t.outcome(summary);
}

// AC5: weight perturbation r1 = 1 + x^-2, q1 = 1 + gamma x^-2.
Outcome ac5() {
  Tally t;
  const Interval iv{1e-6, kInf};
  const std::vector<double> bs{1e4, 1e5, 1e6, 1e7, 1e8};
  std::vector<double> probes;
  for (int m = 2; m <= 14; ++m) probes.push_back(1.0 - std::pow(10.0, -m));
  AccumulationOptions opt;
  std::string summary;
  for (const auto& [gamma, want] : std::vector<std::pair<double, AccumulationEvidence>>{
           {0.5, AccumulationEvidence::Accumulating}, {0.9, AccumulationEvidence::Finite}}) {
    const auto c = build_coefficients(
        family::PerturbedWeight{1.0, 1.0, 1.0, 1.0, 2.0, gamma, 2.0}, iv);
    for (double x : geometric_grid(10.0, 1e8, 8)) {
      const double dt = delta_tilde(c, 0, x);
      t.expect(std::fabs(dt - (gamma - 1.0)) < kAc5TildeTol,
               "Delta tilde at x = " + num(x) + " is " + num(dt));
    }
    const auto s = accumulation_study(c, bs, probes, opt);
    t.expect(s.evidence == want, "gamma = " + num(gamma) + " gave " + to_string(s.evidence));
    t.expect(s.max_method_gap <= kAc5MethodGap,
             "gamma = " + num(gamma) + " method gap " + std::to_string(s.max_method_gap));
    int top_first = 0, top_last = 0;
    for (const auto& r : s.rows) {
      if (r.lambda != probes.back()) continue;
      if (r.b_trunc == bs.front()) top_first = r.count_shoot;
      if (r.b_trunc == bs.back()) top_last = r.count_shoot;
    }
    summary += (summary.empty() ? "" : "; ") + std::string("gamma ") + num(gamma) + ": " +
               to_string(s.evidence) + ", top-probe count " + std::to_string(top_first) + " -> " +
               std::to_string(top_last) + ", gap " + std::to_string(s.max_method_gap);
  }
  return t.outcome(summary);
}

// AC6: Delta with the log-scale principal pair against Delta tilde.
Outcome ac6() {
  Tally t;
  double worst = 0.0;
  for (int n = 1; n <= 2; ++n) {
    const double p_inf = 2.0, q_inf = 1.0, r_inf = 1.5;
    const double a = e_threshold(n) + 1.0;
    const auto c0 =
        build_coefficients(family::IteratedLog{n, 0.0, q_inf, p_inf, r_inf, 0.0}, {a, kInf});
    // Perturbations that keep Delta tilde bounded: p1 != p_inf through the
    // log-scale term, r1 != r_inf through x^-3.
    const std::vector<CoefficientSet> others = {
        build_coefficients(family::IteratedLog{n, -0.2, q_inf, p_inf, r_inf, 0.5}, {a, kInf}),
        build_coefficients(family::PerturbedWeight{p_inf, q_inf, r_inf, 1.0, 3.0, 0.7, 2.0},
                           {a, kInf}),
    };
    const auto pair = log_scale_pair(n, p_inf);
    const double lambda = q_inf / r_inf;
    for (const auto& c1 : others) {
      for (double x : geometric_grid(a + 1.0, 1e8, kAc6Points)) {
        const double d = delta(c0, c1, lambda, pair, x);
        const double dt = delta_tilde(c1, n, x);
        worst = std::max(worst, std::fabs(d - dt));
        t.expect(std::fabs(d - dt) < kAc6Tol, "n = " + std::to_string(n) + ", " +
                                                  to_string(c1.tag()) + ", x = " + num(x));
      }
    }
  }
  return t.outcome("max |Delta - Delta tilde| = " + num(worst));
}

// AC7: shooting against FD inertia, 3 families x 2 truncations x 5 probes.
Outcome ac7() {
  Tally t;
  const std::vector<std::pair<std::string, CoefficientSet>> fams = {
      {"Constant", build_coefficients(family::Constant{}, {0.0, kInf})},
      {"InverseSquare(-0.3)", build_coefficients(family::InverseSquare{-0.3}, {1.0, kInf})},
      {"PerturbedWeight(0.5)",
       build_coefficients(family::PerturbedWeight{1.0, 1.0, 1.0, 1.0, 2.0, 0.5, 2.0}, {1.0, kInf})},
  };
  const std::vector<double> truncs{20.0, 100.0};
  const std::vector<double> shifts{-0.5, 0.1, 0.5, 1.5, 3.0};
  int cases = 0, worst = 0;
  for (const auto& [name, c] : fams) {
    const double bottom = essential_bottom(c);
    for (double b : truncs) {
      const TruncatedProblem tp{c, b};
      for (double s : shifts) {
        const double lam = bottom + s;
        const int ns = count_below(tp, lam).count;
        const int nf = fd_inertia_count(tp, lam, kAc7Grid).count;
        worst = std::max(worst, std::abs(ns - nf));
        t.expect(std::abs(ns - nf) <= kAc7Gap, name + ", b = " + num(b) + ", lambda = " + num(lam) +
                                                   ": " + std::to_string(ns) + " vs " +
                                                   std::to_string(nf));
        ++cases;
      }
    }
  }
  return t.outcome(std::to_string(cases) + " cases, max |shoot - fd| = " + std::to_string(worst));
}

// Independent nested logs: log_0 = x, log_j = log |log_{j-1}|.
double oracle_L(int n, double x) {
  double v = x, prod = x;
  for (int j = 1; j <= n; ++j) {
    v = std::log(std::fabs(v));
    prod *= v;
  }
  return prod;
}

// AC8: L_n' = L_n sum_{j<=n} 1/L_j and -u0'' + Q_n u0 = 0, u0 = sqrt(L_{n-1}).
Outcome ac8() {
  Tally t;
  double worst_d = 0.0, worst_q = 0.0;
  for (int n = 1; n <= 3; ++n) {
    const double lo = e_threshold(n) + 1.0;
    for (double x : geometric_grid(lo, kAc8Upper, 60)) {
      const double h = 1e-5 * x;
      const double dL = (log_product(n, x + h) - log_product(n, x - h)) / (2 * h);
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) sum += 1.0 / oracle_L(j, x);
      const double want = oracle_L(n, x) * sum;
      const double rel_d = std::fabs(dL - want) / std::fabs(want);
      worst_d = std::max(worst_d, rel_d);
      t.expect(rel_d < kAc8Tol, "L_n' at n = " + std::to_string(n) + ", x = " + num(x));

      // Five-point second difference in log x keeps the step well scaled.
      auto u = [&](double s) { return std::sqrt(oracle_L(n - 1, s)); };
      const double k = 2e-3 * x;
      const double upp = (-u(x + 2 * k) + 16 * u(x + k) - 30 * u(x) + 16 * u(x - k) - u(x - 2 * k)) /
                         (12 * k * k);
      const double qu = kneser_q(n, x) * u(x);
      const double rel_q = std::fabs(-upp + qu) / std::fabs(qu);
      worst_q = std::max(worst_q, rel_q);
      t.expect(rel_q < kAc8Tol, "-u'' + Q u at n = " + std::to_string(n) + ", x = " + num(x));
    }
  }
  return t.outcome("max rel. residuals " + num(worst_d) + " (L_n'), " + num(worst_q) + " (Q_n)");
}

// AC9: (alpha)/(beta) pairs agree on limit point and gap verdicts.
Outcome ac9() {
  Tally t;
  const Interval iv{1.0, kInf};
  const auto g = make_tail_grid(iv, 64);
  auto C = [&](family::Constant f) { return build_coefficients(f, iv); };
  const std::vector<std::pair<CoefficientSet, CoefficientSet>> passing = {
      {C({1, 1, 1}), build_coefficients(family::PerturbedWeight{1, 1, 1, 0.5, 1, 0.3, 1.5}, iv)},
      {build_coefficients(family::InverseSquare{-0.1, 0.5, 1, 1}, iv),
       build_coefficients(family::InverseSquare{0.2, 0.5, 1, 1}, iv)},
      {build_coefficients(family::PowerLaw{{1, 0.5, -1}, {2, 1, -1}, {1, 0, 0}}, iv), C({1, 2, 1})},
      {build_coefficients(family::PerturbedWeight{2, 1, 3, 1, 2, 0, 2}, iv),
       build_coefficients(family::PerturbedWeight{2, 1, 3, -0.5, 1, 0.4, 1}, iv)},
      {build_coefficients(family::PowerLaw{{1, 0, 0}, {0, 0, 0}, {2, 1, -0.5}}, iv), C({1, 0, 2})},
  };
  const std::vector<std::pair<CoefficientSet, CoefficientSet>> failing = {
      {C({1, 1, 1}), C({1, 1, 2})},
      {C({1, 0, 1}), C({2, 0, 1})},
      {C({1, 0, 1}), build_coefficients(family::Oscillating{1, 0, 1, 0.5, 1, false}, iv)},
  };
  int i = 0;
  for (const auto& [c0, c1] : passing) {
    const std::string tag = "pair " + std::to_string(i++);
    const auto ab = check_alpha_beta(c0, c1, g);
    t.expect(ab.pass_alpha && ab.pass_beta, tag + ": (alpha)/(beta) pass");
    const auto inv = essential_spectrum_invariance(c0, c1, g);
    t.expect(inv.verdict == Invariance::Invariant, tag + ": invariance " + to_string(inv.verdict));
    const auto lp0 = limit_point_probe(c0, g).verdict;
    const auto lp1 = limit_point_probe(c1, g).verdict;
    t.expect(lp0 == lp1, tag + ": limit point " + to_string(lp0) + " vs " + to_string(lp1));
    const double bottom = essential_bottom(c0);
    const auto g0 = gap_finiteness(c0, bottom - 2.0, bottom - 0.5).kind;
    const auto g1 = gap_finiteness(c1, bottom - 2.0, bottom - 0.5).kind;
    t.expect(g0 == g1 && g0 != OscKind::Inconclusive,
             tag + ": gap " + to_string(g0) + " vs " + to_string(g1));
  }
  for (const auto& [c0, c1] : failing) {
    const std::string tag = "failing pair " + std::to_string(i++);
    t.expect(!check_alpha_beta(c0, c1, g).pass_alpha, tag + ": (alpha) fails");
    t.expect(essential_spectrum_invariance(c0, c1, g).verdict == Invariance::Unknown,
             tag + ": invariance Unknown");
  }
  return t.outcome(std::to_string(passing.size()) + " passing pairs, " +
                   std::to_string(failing.size()) + " failing pairs");
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* name;
    double budget;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "counting exactness", kAc1Budget, ac1},
      {"AC2", "relative count vs dense Wronskian oracle", kAc2Budget, ac2},
      {"AC3", "inequality suites and solution band", kAc3Budget, ac3},
      {"AC4", "Kneser threshold for c/x^2", kAc4Budget, ac4},
      {"AC5", "weight perturbation accumulation", kAc5Budget, ac5},
      {"AC6", "Delta vs Delta tilde", kAc6Budget, ac6},
      {"AC7", "shooting vs FD inertia", kAc7Budget, ac7},
      {"AC8", "log-scale identities", kAc8Budget, ac8},
      {"AC9", "essential spectrum coherence", kAc9Budget, ac9},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %s  %s (%.2f s / %.0f s budget%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                secs, c.budget, in_time ? "" : ", over budget", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed ? 1 : 0;
}
