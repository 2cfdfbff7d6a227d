#include "relosc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "relosc/errors.hpp"
#include "relosc/quadrature.hpp"
#include "relosc/relative.hpp"

namespace relosc {

namespace {

constexpr double kTailEnd = 1e12;
constexpr std::size_t kCertificatePoints = 64;

std::vector<WindowSample> sample_counts(const SolutionTrace& tr, std::span<const double> pts) {
  std::vector<WindowSample> w;
  w.reserve(pts.size());
  for (double x : pts) w.push_back({x, count_zeros(tr, x)});
  return w;
}

SolutionTrace sparse_trace(const CoefficientSet& c, double lambda, double theta_a,
                           const std::vector<double>& pts, const Tolerances& tol) {
  IntegrateOptions io;
  io.tol = tol;
  io.dense = false;
  io.checkpoints = pts;
  return integrate_pruefer(c, lambda, theta_a, pts.back(), io);
}

// Conditions are sampled on the windows, 16 points per window.
std::vector<double> condition_grid(double a, std::span<const double> pts) {
  std::vector<double> g;
  double left = a;
  for (double x : pts) {
    for (int i = 0; i < 16; ++i) g.push_back(left + (x - left) * i / 16.0);
    left = x;
  }
  g.push_back(pts.back());
  return g;
}

void attach_certificate(OscVerdict& v, const CoefficientSet& c, double lambda, double x_last,
                        const ClassifyOptions& options) {
  const TailLimits& t = *c.tail();
  const double bottom = t.q_inf / t.r_inf;
  const double gap = lambda - bottom;
  const double eps = 1e-12 * std::max(1.0, std::fabs(bottom));
  if (gap < -eps) {
    v.kind = OscKind::Nonoscillatory;
    v.basis = VerdictBasis::EssentialSpectrum;
    v.note = "lambda lies below the essential spectrum [q_inf/r_inf, inf)";
    return;
  }
  if (gap > eps) {
    v.kind = OscKind::Oscillatory;
    v.basis = VerdictBasis::EssentialSpectrum;
    v.note = "lambda lies inside the essential spectrum (q_inf/r_inf, inf)";
    return;
  }
  KneserOptions ko;
  ko.margin = options.margin;
  for (int n = 0; n <= options.max_log_order; ++n) {
    const double start = std::max({x_last, e_threshold(n) + 1.0, c.interval().a + 1.0});
    const auto grid = make_tail_grid(c.interval(), kCertificatePoints, start, kTailEnd);
    KneserReport rep = kneser_classify([&](double x) { return delta_tilde(c, n, x); }, grid, ko);
    rep.note = "Delta tilde of order n = " + std::to_string(n);
    const bool decided = rep.verdict != KneserVerdict::Inconclusive;
    v.certificate = std::move(rep);
    if (decided) {
      v.kind = v.certificate->verdict == KneserVerdict::Oscillatory ? OscKind::Oscillatory
                                                                    : OscKind::Nonoscillatory;
      v.basis = VerdictBasis::KneserCertificate;
      v.note = "lambda is the bottom of the essential spectrum; decided by " +
               v.certificate->note;
      return;
    }
  }
  v.note = "lambda is the bottom of the essential spectrum; Kneser certificates inconclusive";
}

AlphaBetaSide alpha_beta_side(const CoefficientSet& c0, const CoefficientSet& c1,
                              std::span<const double> grid) {
  std::vector<double> r_ratio;
  std::vector<double> p_ratio;
  std::vector<double> q_drift;
  std::vector<double> q_over_r;
  for (double x : grid) {
    const CoeffValues v0 = c0(x);
    const CoeffValues d = coefficient_difference(c0, c1, x);
    r_ratio.push_back(d.r / v0.r);
    p_ratio.push_back(d.p / v0.p);
    q_drift.push_back(d.q / v0.r);
    q_over_r.push_back(v0.q / v0.r);
  }
  AlphaBetaSide s;
  s.r_ratio = assess_vanishing(r_ratio);
  s.p_ratio = assess_vanishing(p_ratio);
  s.q_drift = assess_vanishing(q_drift);
  s.q_over_r = assess_bounded(q_over_r);
  s.pass_alpha = s.r_ratio.vanishes && s.p_ratio.vanishes && s.q_drift.vanishes;
  s.pass_beta = s.q_over_r.bounded;
  return s;
}

}  // namespace

std::string to_string(OscKind k) {
  switch (k) {
    case OscKind::Nonoscillatory:
      return "nonoscillatory";
    case OscKind::Oscillatory:
      return "oscillatory";
    case OscKind::Inconclusive:
      break;
  }
  return "inconclusive";
}

std::string to_string(VerdictBasis b) {
  switch (b) {
    case VerdictBasis::WindowCount:
      return "window_count";
    case VerdictBasis::KneserCertificate:
      return "kneser_certificate";
    case VerdictBasis::EssentialSpectrum:
      return "essential_spectrum";
    case VerdictBasis::RelativeLemma:
      break;
  }
  return "relative_lemma";
}

std::string to_string(Invariance v) { return v == Invariance::Invariant ? "invariant" : "unknown"; }

std::string to_string(EndpointClass e) {
  switch (e) {
    case EndpointClass::LimitPoint:
      return "limit_point";
    case EndpointClass::LimitCircle:
      return "limit_circle";
    case EndpointClass::Inconclusive:
      break;
  }
  return "inconclusive";
}

std::vector<double> window_points(const Interval& interval, const WindowPolicy& policy) {
  if (!(policy.ratio > 1.0)) throw PreconditionError("window ratio must exceed 1");
  if (policy.K_stable < 1 || policy.K_grow < 1 || policy.K <= std::max(policy.K_stable, policy.K_grow)) {
    throw PreconditionError("window policy needs K > max(K_stable, K_grow) >= 1");
  }
  double x0 = policy.x0;
  if (std::isnan(x0)) {
    x0 = interval.a + 1.0;
    if (!interval.right_infinite() && x0 >= interval.b) x0 = 0.5 * (interval.a + interval.b);
  }
  if (!(x0 > interval.a) || !(x0 < interval.b)) {
    throw PreconditionError("first window point must lie inside (a, b)");
  }
  std::vector<double> pts;
  pts.reserve(policy.K);
  for (int k = 0; k < policy.K; ++k) {
    const double x = interval.right_infinite()
                         ? x0 * std::pow(policy.ratio, k)
                         : interval.b - (interval.b - x0) * std::pow(policy.ratio, -k);
    if (!(x > interval.a) || !(x < interval.b) || (!pts.empty() && !(x > pts.back()))) {
      throw PreconditionError("window points leave (a, b) or stop increasing");
    }
    pts.push_back(x);
  }
  return pts;
}

OscKind window_rule(std::span<const WindowSample> w, const WindowPolicy& policy) {
  const std::size_t n = w.size();
  if (n > static_cast<std::size_t>(policy.K_grow)) {
    bool grows = true;
    for (std::size_t k = n - policy.K_grow; k < n; ++k) {
      if (!(w[k].n > w[k - 1].n)) grows = false;
    }
    if (grows) return OscKind::Oscillatory;
  }
  if (n > static_cast<std::size_t>(policy.K_stable)) {
    bool stable = true;
    for (std::size_t k = n - policy.K_stable; k < n; ++k) {
      if (w[k].n != w[k - 1].n) stable = false;
    }
    if (stable) return OscKind::Nonoscillatory;
  }
  return OscKind::Inconclusive;
}

OscVerdict classify_oscillation(const CoefficientSet& c, double lambda, const WindowPolicy& policy,
                                const ClassifyOptions& options) {
  const auto pts = window_points(c.interval(), policy);
  const SolutionTrace tr = sparse_trace(c, lambda, options.theta0_a, pts, options.tol);
  OscVerdict v;
  v.policy = policy;
  v.windows = sample_counts(tr, pts);
  v.kind = window_rule(v.windows, policy);
  v.basis = VerdictBasis::WindowCount;
  if (v.kind == OscKind::Nonoscillatory) v.n_limit = v.windows.back().n;

  if (options.use_tail_certificates && c.tail() && c.interval().right_infinite()) {
    const OscKind by_windows = v.kind;
    attach_certificate(v, c, lambda, pts.back(), options);
    if (v.basis != VerdictBasis::WindowCount && by_windows != OscKind::Inconclusive &&
        by_windows != v.kind) {
      v.note += "; window counts alone suggest " + to_string(by_windows);
    }
  }
  return v;
}

OscVerdict classify_relative(const CoefficientSet& c0, double lambda0, const CoefficientSet& c1,
                             double lambda1, const WindowPolicy& policy,
                             const ClassifyOptions& options) {
  if (c0.interval().a != c1.interval().a) {
    throw PreconditionError("relative classification needs a common left endpoint");
  }
  Interval common{c0.interval().a, std::min(c0.interval().b, c1.interval().b)};
  const auto pts = window_points(common, policy);
  auto t0 = std::make_shared<const SolutionTrace>(
      sparse_trace(c0, lambda0, options.theta0_a, pts, options.tol));
  auto t1 = std::make_shared<const SolutionTrace>(
      sparse_trace(c1, lambda1, options.theta1_a, pts, options.tol));
  const RelativeTrace rt(t0, t1);

  OscVerdict v;
  v.policy = policy;
  for (double x : pts) v.windows.push_back({x, relative_count(rt, x)});
  const OscKind by_windows = window_rule(v.windows, policy);
  if (by_windows == OscKind::Nonoscillatory) v.n_limit = v.windows.back().n;

  const auto grid = condition_grid(common.a, pts);
  const bool monotone = check_conditions(c0, lambda0, c1, lambda1, grid).cond_weak ||
                        check_conditions(c1, lambda1, c0, lambda0, grid).cond_weak;

  ClassifyOptions single = options;
  const OscVerdict v0 = classify_oscillation(c0, lambda0, policy, single);
  single.theta0_a = options.theta1_a;
  const OscVerdict v1 = classify_oscillation(c1, lambda1, policy, single);
  if (v0.kind == OscKind::Nonoscillatory && v1.kind != OscKind::Inconclusive) {
    v.kind = v1.kind;
    v.basis = VerdictBasis::RelativeLemma;
    v.note = "tau0 - lambda0 is nonoscillatory; relative verdict follows tau1 - lambda1 (" +
             to_string(v1.basis) + ")";
    return v;
  }
  if (v1.kind == OscKind::Nonoscillatory && v0.kind != OscKind::Inconclusive) {
    v.kind = v0.kind;
    v.basis = VerdictBasis::RelativeLemma;
    v.note = "tau1 - lambda1 is nonoscillatory; relative verdict follows tau0 - lambda0 (" +
             to_string(v0.basis) + ")";
    return v;
  }

  v.basis = VerdictBasis::WindowCount;
  if (by_windows == OscKind::Oscillatory) {
    v.kind = OscKind::Oscillatory;
  } else if (by_windows == OscKind::Nonoscillatory && monotone) {
    v.kind = OscKind::Nonoscillatory;
    v.note = "relative count stable and monotone under the comparison condition";
  } else {
    v.kind = OscKind::Inconclusive;
    v.note = by_windows == OscKind::Nonoscillatory
                 ? "relative count stable but no comparison condition makes it monotone"
                 : "relative count neither stable nor growing";
  }
  return v;
}

AlphaBetaReport check_alpha_beta(const CoefficientSet& c0, const CoefficientSet& c1,
                                 std::span<const double> tail_grid) {
  if (tail_grid.size() < 32) throw PreconditionError("alpha/beta checks need >= 32 tail points");
  AlphaBetaReport rep;
  rep.grid_points = tail_grid.size();
  rep.direct = alpha_beta_side(c0, c1, tail_grid);
  rep.swapped = alpha_beta_side(c1, c0, tail_grid);
  rep.pass_alpha = rep.direct.pass_alpha;
  rep.pass_beta = rep.direct.pass_beta;
  rep.symmetric_agree = (rep.direct.pass_alpha && rep.direct.pass_beta) ==
                        (rep.swapped.pass_alpha && rep.swapped.pass_beta);
  return rep;
}

InvarianceReport essential_spectrum_invariance(const CoefficientSet& c0, const CoefficientSet& c1,
                                               std::span<const double> tail_grid) {
  InvarianceReport rep;
  if (c0 == c1) {
    rep.verdict = Invariance::Invariant;
    rep.reason = "identical coefficient sets";
    return rep;
  }
  rep.hypotheses = check_alpha_beta(c0, c1, tail_grid);
  if (rep.hypotheses->pass_alpha && rep.hypotheses->pass_beta) {
    rep.verdict = Invariance::Invariant;
    rep.reason = "conditions (alpha) and (beta) hold on the tail grid";
  } else {
    rep.verdict = Invariance::Unknown;
    rep.reason = !rep.hypotheses->pass_alpha ? "condition (alpha) fails on the tail grid"
                                             : "condition (beta) fails on the tail grid";
  }
  return rep;
}

LimitPointReport limit_point_probe(const CoefficientSet& c, std::span<const double> tail_grid) {
  if (tail_grid.size() < 2 * static_cast<std::size_t>(kTailWindows)) {
    throw PreconditionError("limit-point probe needs two tail points per window");
  }
  // u(x) = int_anchor^x 1/p, tabulated at the grid points and extended
  // inside each cell by a local quadrature.
  std::vector<double> u_at(tail_grid.size(), 0.0);
  auto inv_p = [&](double t) { return 1.0 / c.p(t); };
  for (std::size_t i = 1; i < tail_grid.size(); ++i) {
    u_at[i] = u_at[i - 1] + integrate(inv_p, tail_grid[i - 1], tail_grid[i], 1e-10).value;
  }
  auto u = [&](double t) {
    auto it = std::upper_bound(tail_grid.begin(), tail_grid.end(), t);
    const std::size_t i = (it == tail_grid.begin()) ? 0 : static_cast<std::size_t>(it - tail_grid.begin()) - 1;
    const double base = tail_grid[i];
    if (t == base) return u_at[i];
    return u_at[i] + integrate(inv_p, base, t, 1e-10).value;
  };

  LimitPointReport rep;
  rep.window_sums_u = window_integrals(
      [&](double t) {
        const double ut = u(t);
        return c.r(t) * ut * ut;
      },
      tail_grid, kTailWindows, 1e-8);
  rep.window_sums_v = window_integrals([&](double t) { return c.r(t); }, tail_grid, kTailWindows, 1e-8);
  rep.growth_u = assess_growth(rep.window_sums_u);
  rep.growth_v = assess_growth(rep.window_sums_v);
  if (rep.growth_u.verdict == GrowthVerdict::Diverging ||
      rep.growth_v.verdict == GrowthVerdict::Diverging) {
    rep.verdict = EndpointClass::LimitPoint;
  } else if (rep.growth_u.verdict == GrowthVerdict::Converging &&
             rep.growth_v.verdict == GrowthVerdict::Converging) {
    rep.verdict = EndpointClass::LimitCircle;
  }
  return rep;
}

}  // namespace relosc
