#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "relosc/coeffs.hpp"

// Finite proxies for limits x -> b. A tail grid is split into consecutive
// windows of equal point count; assertions about limits look at the last
// few windows only.

namespace relosc {

inline constexpr int kTailWindows = 8;
inline constexpr int kTrendWindows = 4;

struct TailTolerance {
  double atol = 1e-8;
  double rtol = 1e-6;
};

/// Threshold below which a quantity is treated as having reached zero.
inline constexpr double kVanishTolerance = 1e-5;

struct WindowStats {
  double min;
  double max;
  double mean;
  double abs_max;
};

/// Splits values into n_windows consecutive chunks. Needs at least two
/// values per window.
std::vector<WindowStats> window_stats(std::span<const double> values, int n_windows = kTailWindows);

struct LimitAssessment {
  double estimate = 0.0;
  bool converged = false;
  double max_deviation = 0.0;  // over the last kTrendWindows windows
};

/// Estimate is the last-window mean; converged when every sample of the last
/// kTrendWindows windows lies within atol + rtol |estimate| of it.
LimitAssessment assess_limit(std::span<const double> values, TailTolerance tol = {});

struct VanishAssessment {
  bool vanishes = false;
  double last_abs_max = 0.0;
  std::vector<double> window_abs_max;
};

/// True when the last window's |value| is below tol and the window maxima do
/// not grow over the last kTrendWindows windows.
VanishAssessment assess_vanishing(std::span<const double> values, double tol = kVanishTolerance);

struct BoundAssessment {
  bool bounded = false;
  double bound = 0.0;  // running max of |value| over the whole grid
};

/// Sampled boundedness: the running max of |value| grows by at most 2%
/// across the last kTrendWindows windows.
BoundAssessment assess_bounded(std::span<const double> values);

enum class GrowthVerdict { Diverging, Converging, Inconclusive };

struct GrowthAssessment {
  GrowthVerdict verdict = GrowthVerdict::Inconclusive;
  double total = 0.0;
};

/// Reads the increments of a nonnegative partial-sum sequence over
/// consecutive windows. Diverging: every one of the last kTrendWindows
/// increments is at least half the previous one. Converging: each is at most
/// half the previous one and the last is below 1e-3 of the running total.
GrowthAssessment assess_growth(std::span<const double> increments);

/// n points from x0 to x1 with constant ratio.
std::vector<double> geometric_grid(double x0, double x1, std::size_t n);

/// Tail grid approaching b. For b = inf: geometric from a + 1 to 1e12. For
/// finite b: b - (b - a) 2^{-k}, k = 1..n (capped where points collapse).
std::vector<double> make_tail_grid(const Interval& interval, std::size_t n = 64);

/// Geometric tail grid on [x_start, x_end] for b = inf, clustering grid
/// toward b starting at x_start otherwise.
std::vector<double> make_tail_grid(const Interval& interval, std::size_t n, double x_start,
                                   double x_end);

}  // namespace relosc
