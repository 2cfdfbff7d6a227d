#pragma once

#include <functional>
#include <span>
#include <vector>

namespace relosc {

struct QuadResult {
  double value;
  double error;
};

/// Adaptive Gauss-Kronrod on [lo, hi]. Ranges spanning decades are split
/// into pieces of ratio at most 4 first. Throws QuadratureFailure when the
/// error estimate exceeds rtol times the L1 norm.
QuadResult integrate(const std::function<double(double)>& f, double lo, double hi,
                     double rtol = 1e-10);

/// Integrals of f over consecutive windows of the grid (split as in
/// window_stats); window w spans from its first point to the first point of
/// window w + 1, the last one to the end of the grid.
std::vector<double> window_integrals(const std::function<double(double)>& f,
                                     std::span<const double> grid, int n_windows,
                                     double rtol = 1e-10);

}  // namespace relosc
