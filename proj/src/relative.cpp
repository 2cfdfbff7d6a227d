#include "relosc/relative.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "relosc/errors.hpp"

namespace relosc {

namespace {

constexpr double kPi = std::numbers::pi;

bool same_solution(const SolutionTrace& t0, const SolutionTrace& t1) {
  if (&t0 == &t1) return true;
  if (t0.lambda() != t1.lambda() || !(t0.coefficients() == t1.coefficients())) return false;
  const double d = t1.theta_a() - t0.theta_a();
  const int k = static_cast<int>(std::lround(d / kPi));
  return std::fabs(d - k * kPi) <= CountingPolicy{}.snap_rtol * std::max(1.0, std::fabs(d));
}

// Cartesian state (u, p u') of one solution.
using Cart = std::array<double, 2>;

struct CartesianRhs {
  const CoefficientSet& c;
  double lambda;
  Cart operator()(double x, const Cart& y) const {
    return {y[1] / c.p(x), c.effective_potential(x, lambda) * y[0]};
  }
};

Cart rk4(const CartesianRhs& f, double x0, Cart y, double x1, int m) {
  const double h = (x1 - x0) / m;
  for (int i = 0; i < m; ++i) {
    const double x = x0 + i * h;
    const Cart k1 = f(x, y);
    const Cart k2 = f(x + h / 2, {y[0] + h / 2 * k1[0], y[1] + h / 2 * k1[1]});
    const Cart k3 = f(x + h / 2, {y[0] + h / 2 * k2[0], y[1] + h / 2 * k2[1]});
    const Cart k4 = f(x + h, {y[0] + h * k3[0], y[1] + h * k3[1]});
    y[0] += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    y[1] += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  return y;
}

// Step doubling until the two results agree; returns the finer one and
// updates m for the next cell.
Cart rk4_cell(const CartesianRhs& f, double x0, const Cart& y0, double x1, int& m) {
  Cart coarse = rk4(f, x0, y0, x1, m);
  for (int guard = 0; guard < 20; ++guard) {
    const Cart fine = rk4(f, x0, y0, x1, 2 * m);
    const double scale = std::max({std::hypot(fine[0], fine[1]), std::hypot(y0[0], y0[1]), 1e-300});
    const double diff = std::hypot(fine[0] - coarse[0], fine[1] - coarse[1]) / scale;
    m *= 2;
    if (diff <= 1e-10) {
      if (diff < 1e-13 && m > 4) m /= 4;
      return fine;
    }
    coarse = fine;
  }
  throw StepFailure("RK4 oracle could not resolve cell at x = " + std::to_string(x0), x0);
}

double wronskian(const Cart& y0, const Cart& y1) { return y0[0] * y1[1] - y0[1] * y1[0]; }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

RelativeTrace::RelativeTrace(std::shared_ptr<const SolutionTrace> t0,
                             std::shared_ptr<const SolutionTrace> t1)
    : t0_(std::move(t0)), t1_(std::move(t1)) {
  if (!t0_ || !t1_) throw PreconditionError("relative trace needs two traces");
  if (t0_->x_begin() != t1_->x_begin()) {
    throw PreconditionError("relative trace needs traces starting at the same point");
  }
  x_end_ = std::min(t0_->x_end(), t1_->x_end());
  degenerate_ = same_solution(*t0_, *t1_);
  locate_events();
}

RelativeTrace::RelativeTrace(SolutionTrace t0, SolutionTrace t1)
    : RelativeTrace(std::make_shared<const SolutionTrace>(std::move(t0)),
                    std::make_shared<const SolutionTrace>(std::move(t1))) {}

double RelativeTrace::delta(double x) const {
  if (!(x >= x_begin() && x <= x_end_)) {
    throw RangeError("x outside the common range of the relative trace");
  }
  return t1_->theta(x) - t0_->theta(x);
}

void RelativeTrace::locate_events() {
  if (degenerate_ || !t0_->dense() || !t1_->dense()) return;
  std::vector<double> grid;
  for (const auto& s : t0_->states()) grid.push_back(s.x);
  for (const auto& s : t1_->states()) grid.push_back(s.x);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  while (!grid.empty() && grid.back() > x_end_) grid.pop_back();

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double xl = grid[i];
    const double xr = grid[i + 1];
    const double dl = delta(xl);
    const double dr = delta(xr);
    const int k_lo = static_cast<int>(std::floor(std::min(dl, dr) / kPi));
    const int k_hi = static_cast<int>(std::ceil(std::max(dl, dr) / kPi));
    std::vector<double> found;
    for (int k = k_lo; k <= k_hi; ++k) {
      const double level = k * kPi;
      if (dl == level || sign(dl - level) == sign(dr - level)) continue;
      double lo = xl;
      double hi = xr;
      const int s_lo = sign(dl - level);
      for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sign(delta(mid) - level) == s_lo) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      found.push_back(0.5 * (lo + hi));
    }
    std::sort(found.begin(), found.end());
    w_events_.insert(w_events_.end(), found.begin(), found.end());
  }
}

double modified_wronskian(const RelativeTrace& rt, double x) {
  if (!(x >= rt.x_begin() && x <= rt.x_end())) {
    throw RangeError("x outside the common range of the relative trace");
  }
  const PrueferState s0 = rt.trace0().at(x);
  const PrueferState s1 = rt.trace1().at(x);
  return std::exp(s0.log_rho + s1.log_rho) * std::sin(s0.theta - s1.theta);
}

int relative_count(const RelativeTrace& rt, double x, const CountingPolicy& policy) {
  return ceil_div_pi(rt.delta(x), policy) - floor_div_pi(rt.delta_a(), policy) - 1;
}

DenseZeroCount wronskian_zero_count_dense(const RelativeTrace& rt, double x, int grid_n) {
  if (grid_n < 1000) throw PreconditionError("dense Wronskian oracle needs grid_n >= 1000");
  if (!(x > rt.x_begin() && x <= rt.x_end())) {
    throw RangeError("x outside the common range of the relative trace");
  }
  DenseZeroCount out;
  if (rt.degenerate()) {
    out.degenerate = true;
    return out;
  }
  const SolutionTrace& t0 = rt.trace0();
  const SolutionTrace& t1 = rt.trace1();
  const CartesianRhs f0{t0.coefficients(), t0.lambda()};
  const CartesianRhs f1{t1.coefficients(), t1.lambda()};
  const double a = rt.x_begin();
  const double h = (x - a) / grid_n;

  Cart y0{std::sin(t0.theta_a()), std::cos(t0.theta_a())};
  Cart y1{std::sin(t1.theta_a()), std::cos(t1.theta_a())};
  int m0 = 4;
  int m1 = 4;
  int last_sign = sign(wronskian(y0, y1));

  for (int i = 0; i < grid_n; ++i) {
    const double xl = a + i * h;
    const double xr = (i + 1 == grid_n) ? x : a + (i + 1) * h;
    const Cart y0l = y0;
    const Cart y1l = y1;
    y0 = rk4_cell(f0, xl, y0l, xr, m0);
    y1 = rk4_cell(f1, xl, y1l, xr, m1);

    const int s = sign(wronskian(y0, y1));
    if (s != 0 && last_sign != 0 && s != last_sign) {
      ++out.count;
      // Bisection on W inside the cell.
      double lo = xl;
      double hi = xr;
      const int mm0 = m0;
      const int mm1 = m1;
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Cart z0 = rk4(f0, xl, y0l, mid, 4 * mm0);
        const Cart z1 = rk4(f1, xl, y1l, mid, 4 * mm1);
        if (sign(wronskian(z0, z1)) == last_sign) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      const double z = 0.5 * (lo + hi);
      if (!out.zeros.empty() && z - out.zeros.back() < h) out.grid_too_coarse = true;
      out.zeros.push_back(z);
    }
    if (s != 0) last_sign = s;

    // Keep both solutions in range; W only needs its sign.
    for (Cart* y : {&y0, &y1}) {
      const double n = std::max(std::fabs((*y)[0]), std::fabs((*y)[1]));
      if (n > 1e100 || (n < 1e-100 && n > 0.0)) {
        const double sc = 1.0 / n;
        (*y)[0] *= sc;
        (*y)[1] *= sc;
      }
    }
  }
  return out;
}

ConditionReport check_conditions(const CoefficientSet& c0, double lambda0, const CoefficientSet& c1,
                                 double lambda1, std::span<const double> grid) {
  ConditionReport rep;
  for (double x : grid) {
    ++rep.samples;
    const double p0 = c0.p(x);
    const double p1 = c1.p(x);
    const double v0 = c0.effective_potential(x, lambda0);
    const double v1 = c1.effective_potential(x, lambda1);
    if (!(p0 >= p1) || !(v0 >= v1)) {
      if (rep.cond_weak) rep.first_failure_x = x;
      rep.cond_weak = false;
      rep.cond_strict = false;
    } else if (!(v0 > v1)) {
      rep.cond_strict = false;
    }
  }
  return rep;
}

ComparisonReport sturm_comparison_check(const RelativeTrace& rt) {
  const SolutionTrace& t0 = rt.trace0();
  const SolutionTrace& t1 = rt.trace1();
  const double a = rt.x_begin();
  const double b = rt.x_end();
  constexpr int kSamples = 1024;
  std::vector<double> grid;
  grid.reserve(kSamples);
  for (int i = 0; i < kSamples; ++i) grid.push_back(a + (b - a) * (i + 0.5) / kSamples);
  const ConditionReport cond =
      check_conditions(t0.coefficients(), t0.lambda(), t1.coefficients(), t1.lambda(), grid);
  if (!cond.cond_strict) {
    throw PreconditionError("Sturm comparison needs p0 >= p1 and q0 - l0 r0 > q1 - l1 r1");
  }

  ComparisonReport rep;
  std::vector<double> z0;
  for (double z : t0.events()) {
    if (z < b) z0.push_back(z);
  }
  const auto& z1 = t1.events();
  for (std::size_t i = 0; i + 1 < z0.size(); ++i) {
    ++rep.intervals_checked;
    auto it = std::upper_bound(z1.begin(), z1.end(), z0[i]);
    if (it == z1.end() || !(*it < z0[i + 1])) {
      rep.passed = false;
      rep.violations.push_back({z0[i], z0[i + 1]});
    }
  }
  return rep;
}

}  // namespace relosc
