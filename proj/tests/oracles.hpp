#pragma once

// Reference computations that share no code with the library: fixed-step
// RK4 on the Cartesian system, bisection, composite Simpson.

#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using Fn = std::function<double(double)>;

struct Cartesian {
  double u;
  double pu;  // p u'
};

// (u, pu')' = (pu / p, (q - lambda r) u), n uniform RK4 steps from a to x.
inline Cartesian rk4(const Fn& p, const Fn& q, const Fn& r, double lambda, Cartesian s, double a,
                     double x, int n) {
  const double h = (x - a) / n;
  auto f = [&](double t, Cartesian y) {
    return Cartesian{y.pu / p(t), (q(t) - lambda * r(t)) * y.u};
  };
  double t = a;
  for (int i = 0; i < n; ++i) {
    const Cartesian k1 = f(t, s);
    const Cartesian k2 = f(t + h / 2, {s.u + h / 2 * k1.u, s.pu + h / 2 * k1.pu});
    const Cartesian k3 = f(t + h / 2, {s.u + h / 2 * k2.u, s.pu + h / 2 * k2.pu});
    const Cartesian k4 = f(t + h, {s.u + h * k3.u, s.pu + h * k3.pu});
    s.u += h / 6 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u);
    s.pu += h / 6 * (k1.pu + 2 * k2.pu + 2 * k3.pu + k4.pu);
    t = a + (i + 1) * h;
  }
  return s;
}

// Sign changes of u along an RK4 sweep in log x (a > 0) with m steps per cell.
inline std::vector<double> rk4_zeros_log(const Fn& p, const Fn& q, const Fn& r, double lambda,
                                         Cartesian s, double a, double b, int cells, int m) {
  std::vector<double> zeros;
  const double la = std::log(a);
  const double step = (std::log(b) - la) / cells;
  double x0 = a;
  for (int i = 0; i < cells; ++i) {
    const double x1 = std::exp(la + (i + 1) * step);
    const Cartesian next = rk4(p, q, r, lambda, s, x0, x1, m);
    if (s.u != 0.0 && (s.u > 0) != (next.u > 0)) zeros.push_back(0.5 * (x0 + x1));
    s = next;
    x0 = x1;
  }
  return zeros;
}

inline double bisect(const Fn& f, double lo, double hi, int iters = 200) {
  double flo = f(lo);
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Roots of f on [lo, hi] found by scanning n cells then bisecting.
inline std::vector<double> roots(const Fn& f, double lo, double hi, int n) {
  std::vector<double> out;
  const double h = (hi - lo) / n;
  double a = lo;
  double fa = f(a);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + i * h;
    const double fb = f(b);
    if (fa != 0.0 && fb != 0.0 && (fa > 0) != (fb > 0)) out.push_back(bisect(f, a, b));
    a = b;
    fa = fb;
  }
  return out;
}

inline double simpson(const Fn& f, double a, double b, int n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3;
}

}  // namespace oracle
