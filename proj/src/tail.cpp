#include "relosc/tail.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relosc/errors.hpp"

namespace relosc {

std::vector<WindowStats> window_stats(std::span<const double> values, int n_windows) {
  const std::size_t n = values.size();
  if (n_windows < 1 || n < 2 * static_cast<std::size_t>(n_windows)) {
    throw PreconditionError("tail window split needs at least two samples per window (" +
                            std::to_string(n) + " samples, " + std::to_string(n_windows) +
                            " windows)");
  }
  std::vector<WindowStats> out;
  out.reserve(n_windows);
  for (int w = 0; w < n_windows; ++w) {
    const std::size_t lo = w * n / n_windows;
    const std::size_t hi = (w + 1) * n / n_windows;
    WindowStats s{values[lo], values[lo], 0.0, 0.0};
    for (std::size_t i = lo; i < hi; ++i) {
      s.min = std::min(s.min, values[i]);
      s.max = std::max(s.max, values[i]);
      s.mean += values[i];
      s.abs_max = std::max(s.abs_max, std::fabs(values[i]));
    }
    s.mean /= static_cast<double>(hi - lo);
    out.push_back(s);
  }
  return out;
}

LimitAssessment assess_limit(std::span<const double> values, TailTolerance tol) {
  const auto w = window_stats(values);
  LimitAssessment out;
  out.estimate = w.back().mean;
  for (std::size_t k = w.size() - kTrendWindows; k < w.size(); ++k) {
    out.max_deviation = std::max(
        {out.max_deviation, std::fabs(w[k].max - out.estimate), std::fabs(w[k].min - out.estimate)});
  }
  out.converged = std::isfinite(out.estimate) &&
                  out.max_deviation <= tol.atol + tol.rtol * std::fabs(out.estimate);
  return out;
}

VanishAssessment assess_vanishing(std::span<const double> values, double tol) {
  const auto w = window_stats(values);
  VanishAssessment out;
  for (const auto& s : w) out.window_abs_max.push_back(s.abs_max);
  out.last_abs_max = w.back().abs_max;
  bool shrinking = true;
  for (std::size_t k = w.size() - kTrendWindows + 1; k < w.size(); ++k) {
    if (w[k].abs_max > w[k - 1].abs_max * (1.0 + 1e-9) + 1e-300) shrinking = false;
  }
  out.vanishes = std::isfinite(out.last_abs_max) && out.last_abs_max <= tol && shrinking;
  return out;
}

BoundAssessment assess_bounded(std::span<const double> values) {
  const auto w = window_stats(values);
  std::vector<double> running(w.size());
  double m = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    m = std::max(m, w[k].abs_max);
    running[k] = m;
  }
  BoundAssessment out;
  out.bound = m;
  const double before = running[w.size() - kTrendWindows - 1];
  out.bounded = std::isfinite(m) && m <= 1.02 * before + 1e-300;
  return out;
}

GrowthAssessment assess_growth(std::span<const double> increments) {
  const std::size_t n = increments.size();
  if (n < static_cast<std::size_t>(kTrendWindows) + 1) {
    throw PreconditionError("growth assessment needs at least five windows");
  }
  GrowthAssessment out;
  for (double v : increments) out.total += v;
  bool diverging = true;
  bool converging = true;
  for (std::size_t k = n - kTrendWindows; k < n; ++k) {
    const double prev = increments[k - 1];
    const double cur = increments[k];
    if (!(cur > 0.0) || !(cur >= 0.5 * prev)) diverging = false;
    if (!(cur <= 0.5 * prev)) converging = false;
  }
  if (!(increments[n - 1] <= 1e-3 * out.total)) converging = false;
  if (!std::isfinite(out.total)) {
    out.verdict = GrowthVerdict::Diverging;
  } else if (diverging) {
    out.verdict = GrowthVerdict::Diverging;
  } else if (converging) {
    out.verdict = GrowthVerdict::Converging;
  }
  return out;
}

std::vector<double> geometric_grid(double x0, double x1, std::size_t n) {
  if (!(x0 > 0.0) || !(x1 > x0) || n < 2) {
    throw DomainError("geometric grid needs 0 < x0 < x1 and n >= 2");
  }
  std::vector<double> g(n);
  const double l0 = std::log(x0);
  const double l1 = std::log(x1);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::exp(l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = x0;
  g.back() = x1;
  return g;
}

std::vector<double> make_tail_grid(const Interval& interval, std::size_t n) {
  if (interval.right_infinite()) {
    return make_tail_grid(interval, n, std::max(interval.a + 1.0, 1.0), 1e12);
  }
  return make_tail_grid(interval, n, interval.a, interval.b);
}

std::vector<double> make_tail_grid(const Interval& interval, std::size_t n, double x_start,
                                   double x_end) {
  if (interval.right_infinite()) {
    if (x_start <= interval.a) throw DomainError("tail grid must start inside (a, b)");
    return geometric_grid(x_start, x_end, n);
  }
  const double b = interval.b;
  const double width = b - std::max(x_start, interval.a);
  if (!(width > 0.0)) throw DomainError("tail grid start must lie below b");
  std::vector<double> g;
  g.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double x = b - width * std::ldexp(1.0, -static_cast<int>(k));
    if (x >= b || (!g.empty() && x <= g.back())) break;
    g.push_back(x);
  }
  return g;
}

}  // namespace relosc
