#include "relosc/kneser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relosc/errors.hpp"
#include "relosc/quadrature.hpp"

namespace relosc {

namespace {

const TailLimits& require_tail(const CoefficientSet& c) {
  if (!c.tail()) throw MissingTail("coefficient set has no declared tail limits");
  return *c.tail();
}

void require_above_threshold(int n, double x) {
  if (!(x > e_threshold(n))) throw DomainError("x must exceed e_n");
}

bool monotone(std::span<const double> seq) {
  double scale = 1.0;
  for (double v : seq) scale = std::max(scale, std::fabs(v));
  const double tol = 1e-3 * scale;
  bool up = true;
  bool down = true;
  for (std::size_t k = 1; k < seq.size(); ++k) {
    if (seq[k] < seq[k - 1] - tol) up = false;
    if (seq[k] > seq[k - 1] + tol) down = false;
  }
  return up || down;
}

void fill_windows(KneserReport& rep, int windows) {
  std::vector<double> values;
  values.reserve(rep.samples.size());
  for (const auto& s : rep.samples) values.push_back(s.value);
  const auto w = window_stats(values, windows);
  rep.window_sup.clear();
  rep.window_inf.clear();
  for (const auto& s : w) {
    rep.window_sup.push_back(s.max);
    rep.window_inf.push_back(s.min);
  }
  rep.sup_tail = rep.window_sup.back();
  rep.inf_tail = rep.window_inf.back();
}

std::span<const double> last_windows(const std::vector<double>& v) {
  const std::size_t k = std::min<std::size_t>(kTrendWindows, v.size());
  return std::span<const double>(v).subspan(v.size() - k);
}

KneserVerdict decide(const KneserReport& rep) {
  if (rep.sup_tail < kKneserThreshold - rep.margin && monotone(last_windows(rep.window_sup))) {
    return KneserVerdict::Oscillatory;
  }
  if (rep.inf_tail > kKneserThreshold + rep.margin && monotone(last_windows(rep.window_inf))) {
    return KneserVerdict::Nonoscillatory;
  }
  return KneserVerdict::Inconclusive;
}

}  // namespace

std::string to_string(KneserMode m) {
  return m == KneserMode::Pointwise ? "pointwise" : "averaged";
}

std::string to_string(KneserVerdict v) {
  switch (v) {
    case KneserVerdict::Oscillatory:
      return "oscillatory";
    case KneserVerdict::Nonoscillatory:
      return "nonoscillatory";
    case KneserVerdict::Inconclusive:
      break;
  }
  return "inconclusive";
}

double dalembert(const Evaluator& u0, const Evaluator& p0, double c, double x) {
  if (x == c) return 0.0;
  auto integrand = [&](double t) {
    const double u = u0(t);
    if (!(u > 0.0)) {
      throw PositivityError("u0 is not positive at t = " + std::to_string(t));
    }
    return 1.0 / (p0(t) * u * u);
  };
  const double sign = x > c ? 1.0 : -1.0;
  const QuadResult q = integrate(integrand, std::min(c, x), std::max(c, x), 1e-10);
  return u0(x) * sign * q.value;
}

PrincipalPair make_principal_pair(Evaluator u0, Evaluator du0, Evaluator p0, double c) {
  PrincipalPair pair;
  pair.u0 = u0;
  pair.du0 = std::move(du0);
  pair.p0 = p0;
  pair.c = c;
  pair.v0 = [u0, p0, c](double x) { return dalembert(u0, p0, c, x); };
  return pair;
}

PrincipalPair log_scale_pair(int n, double p_inf) {
  if (n < 0) throw DomainError("log scale order must be nonnegative");
  if (!(p_inf > 0.0)) throw SpecError("p_inf must be positive");
  PrincipalPair pair;
  pair.u0 = [n](double x) { return std::sqrt(log_product(n - 1, x)); };
  pair.du0 = [n](double x) {
    return 0.5 * std::sqrt(log_product(n - 1, x)) * inverse_log_product_sum(n, x);
  };
  pair.v0 = [n, p_inf](double x) {
    return std::sqrt(log_product(n - 1, x)) * iterated_log(n, x) / p_inf;
  };
  pair.p0 = [p_inf](double) { return p_inf; };
  pair.c = e_threshold(n);
  return pair;
}

GrowthAssessment minimality_check(const PrincipalPair& pair, std::span<const double> tail_grid) {
  auto integrand = [&](double t) {
    const double u = pair.u0(t);
    if (!(u > 0.0)) throw PositivityError("u0 is not positive at t = " + std::to_string(t));
    return 1.0 / (pair.p0(t) * u * u);
  };
  const auto sums = window_integrals(integrand, tail_grid, kTailWindows, 1e-8);
  return assess_growth(sums);
}

double delta(const CoefficientSet& c0, const CoefficientSet& c1, double lambda,
             const PrincipalPair& pair, double x) {
  const double u0 = pair.u0(x);
  const double du0 = pair.du0(x);
  const double v0 = pair.v0(x);
  const double p0 = c0.p(x);
  const double p1 = c1.p(x);
  const CoeffValues d = coefficient_difference(c0, c1, x);
  const double flux = p0 * du0;
  const double bracket = u0 * u0 * (d.q - lambda * d.r) + flux * flux * d.p / (p1 * p0);
  return p0 * v0 * v0 * bracket;
}

double delta_tilde(const CoefficientSet& c1, int n, double x) {
  const TailLimits& t = require_tail(c1);
  require_above_threshold(n, x);
  const CoeffValues dev = c1.deviation(x);
  const double p1 = c1.p(x);
  const double ln = log_product(n, x);
  const double s = inverse_log_product_sum(n, x);
  const double bracket = (dev.q - (t.q_inf / t.r_inf) * dev.r) / t.p_inf - kneser_q(n, x) +
                         0.25 * s * s * (dev.p / p1);
  return ln * ln * bracket;
}

double delta_tilde_reduced(const CoefficientSet& c1, int n, double x) {
  const TailLimits& t = require_tail(c1);
  require_above_threshold(n, x);
  const CoeffValues dev = c1.deviation(x);
  const double ln = log_product(n, x);
  return ln * ln * ((dev.q - (t.q_inf / t.r_inf) * dev.r) / t.p_inf - kneser_q(n, x));
}

SideConditionReport side_conditions_thm_gu(const CoefficientSet& c0, const CoefficientSet& c1,
                                           const PrincipalPair& pair,
                                           std::span<const double> tail_grid) {
  std::vector<double> first;
  std::vector<double> second;
  for (double x : tail_grid) {
    const double ratio = coefficient_difference(c0, c1, x).p / c1.p(x);
    first.push_back(pair.v0(x) * c0.p(x) * pair.du0(x) * ratio);
    second.push_back(ratio);
  }
  SideConditionReport rep;
  rep.v0_p0_du0_term = assess_vanishing(first);
  rep.p_ratio_term = assess_vanishing(second);
  rep.passed = rep.v0_p0_du0_term.vanishes && rep.p_ratio_term.vanishes;
  return rep;
}

VanishAssessment aventura_assessment(const CoefficientSet& c1, int n,
                                     std::span<const double> tail_grid) {
  require_tail(c1);
  std::vector<double> values;
  for (double x : tail_grid) {
    require_above_threshold(n, x);
    const double ln = log_product(n, x);
    values.push_back(ln * ln * c1.deviation(x).p / (x * x));
  }
  return assess_vanishing(values);
}

bool aventura_check(const CoefficientSet& c1, int n, std::span<const double> tail_grid) {
  return aventura_assessment(c1, n, tail_grid).vanishes;
}

KneserReport kneser_classify(std::span<const KneserSample> samples, double margin, int windows) {
  KneserReport rep;
  rep.mode = KneserMode::Pointwise;
  rep.margin = margin;
  rep.samples.assign(samples.begin(), samples.end());
  fill_windows(rep, windows);
  rep.verdict = decide(rep);
  if (rep.verdict == KneserVerdict::Inconclusive) {
    rep.note = "tail extrema within the margin of -1/4 or not settled";
  }
  return rep;
}

KneserReport kneser_classify(const Evaluator& delta_fn, std::span<const double> tail_grid,
                             const KneserOptions& options, const Evaluator& rho) {
  if (options.mode == KneserMode::Pointwise) {
    std::vector<KneserSample> samples;
    samples.reserve(tail_grid.size());
    for (double x : tail_grid) samples.push_back({x, delta_fn(x)});
    return kneser_classify(samples, options.margin, options.windows);
  }

  if (options.ell_grid.empty()) throw PreconditionError("averaged mode needs an l-grid");
  std::vector<KneserReport> per_ell;
  for (double ell : options.ell_grid) {
    if (!(ell > 0.0)) throw PreconditionError("averaging lengths must be positive");
    KneserReport r;
    r.mode = KneserMode::Averaged;
    r.margin = options.margin;
    r.best_ell = ell;
    for (double x : tail_grid) {
      const double avg = integrate(delta_fn, x, x + ell, 1e-8).value / ell;
      r.samples.push_back({x, avg});
    }
    fill_windows(r, options.windows);
    r.verdict = decide(r);
    per_ell.push_back(std::move(r));
  }

  // inf over l of the limsup estimates, sup over l of the liminf estimates.
  auto osc = std::min_element(per_ell.begin(), per_ell.end(),
                              [](const auto& a, const auto& b) { return a.sup_tail < b.sup_tail; });
  auto non = std::max_element(per_ell.begin(), per_ell.end(),
                              [](const auto& a, const auto& b) { return a.inf_tail < b.inf_tail; });
  KneserReport rep;
  if (osc->verdict == KneserVerdict::Oscillatory) {
    rep = *osc;
  } else if (non->verdict == KneserVerdict::Nonoscillatory) {
    rep = *non;
  } else {
    rep = *osc;
    rep.verdict = KneserVerdict::Inconclusive;
    rep.note = "averaged tail extrema within the margin of -1/4 or not settled";
  }

  std::vector<double> raw;
  for (double x : tail_grid) raw.push_back(delta_fn(x));
  const bool delta_bounded = assess_bounded(raw).bounded;

  if (!rho) {
    rep.verdict = KneserVerdict::Inconclusive;
    rep.note = "averaged mode needs rho = 1/(p0 u0 v0) to check its hypotheses";
    return rep;
  }
  std::vector<double> rho_vals;
  std::vector<double> variation;
  for (double x : tail_grid) {
    const double r0 = rho(x);
    rho_vals.push_back(r0);
    double worst = 0.0;
    for (double ell : options.ell_grid) {
      auto dev = [&](double t) { return std::fabs(rho(t) - r0); };
      worst = std::max(worst, integrate(dev, x, x + ell, 1e-3).value / ell / std::fabs(r0));
    }
    variation.push_back(worst);
  }
  RhoConditions rc;
  rc.bounded = assess_bounded(rho_vals).bounded;
  rc.vanishes = assess_vanishing(rho_vals).vanishes;
  rc.averaged_variation = assess_vanishing(variation).vanishes;
  rep.rho = rc;
  if (!delta_bounded || !rc.passed()) {
    rep.verdict = KneserVerdict::Inconclusive;
    rep.note = !delta_bounded ? "Delta is not bounded on the tail grid"
                              : "rho fails the averaged-criterion regularity checks";
  }
  return rep;
}

}  // namespace relosc
