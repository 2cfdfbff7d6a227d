#include "relosc/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "relosc/errors.hpp"

namespace relosc {

namespace {

std::vector<double> breakpoints(double lo, double hi) {
  std::vector<double> pts{lo};
  double x = lo;
  if (x < 1.0 && hi > 2.0) {
    x = 1.0;
    pts.push_back(x);
  }
  if (x > 0.0) {
    while (hi / x > 4.0) {
      x *= 4.0;
      pts.push_back(x);
    }
  }
  pts.push_back(hi);
  return pts;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double lo, double hi, double rtol) {
  if (lo == hi) return {0.0, 0.0};
  if (!(hi > lo)) throw DomainError("integration bounds out of order");
  QuadResult out{0.0, 0.0};
  double l1_total = 0.0;
  const auto pts = breakpoints(lo, hi);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    out.value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, pts[i], pts[i + 1], 15, rtol, &err, &l1);
    out.error += err;
    l1_total += l1;
  }
  // Nodes far from the origin are rounded; allow for the resulting noise.
  const double node_noise = 1e3 * std::numeric_limits<double>::epsilon() *
                            std::max(std::fabs(lo), std::fabs(hi)) / (hi - lo);
  if (!std::isfinite(out.value) || out.error > (10.0 * rtol + node_noise) * l1_total) {
    throw QuadratureFailure("quadrature on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                            "] reached error " + std::to_string(out.error));
  }
  return out;
}

std::vector<double> window_integrals(const std::function<double(double)>& f,
                                     std::span<const double> grid, int n_windows, double rtol) {
  const std::size_t n = grid.size();
  if (n_windows < 1 || n < 2 * static_cast<std::size_t>(n_windows)) {
    throw PreconditionError("window integrals need at least two grid points per window");
  }
  std::vector<double> out;
  for (int w = 0; w < n_windows; ++w) {
    const std::size_t lo = w * n / n_windows;
    const std::size_t hi = (w + 1 == n_windows) ? n - 1 : (w + 1) * n / n_windows;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += integrate(f, grid[i], grid[i + 1], rtol).value;
    out.push_back(sum);
  }
  return out;
}

}  // namespace relosc
