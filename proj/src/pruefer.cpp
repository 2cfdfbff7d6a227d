#include "relosc/pruefer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relosc/errors.hpp"

namespace relosc {

namespace {

constexpr double kPi = std::numbers::pi;

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

using Vec = std::array<double, 2>;

struct PrueferRhs {
  const CoefficientSet& c;
  double lambda;

  Vec operator()(double x, const Vec& y) const {
    const double inv_p = 1.0 / c.p(x);
    const double v = c.effective_potential(x, lambda);
    const double s = std::sin(y[0]);
    const double co = std::cos(y[0]);
    return {inv_p * co * co - v * s * s, (inv_p + v) * s * co};
  }
};

Vec axpy(const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
  Vec out = y;
  for (const auto& [w, k] : terms) {
    out[0] += h * w * (*k)[0];
    out[1] += h * w * (*k)[1];
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool near_multiple(double theta, int k, const CountingPolicy& policy) {
  return std::fabs(theta - k * kPi) <= policy.snap_rtol * std::max(1.0, std::fabs(theta));
}

}  // namespace

int ceil_div_pi(double theta, const CountingPolicy& policy) {
  const double t = theta / kPi;
  const int k = static_cast<int>(std::lround(t));
  if (near_multiple(theta, k, policy)) return k;
  return static_cast<int>(std::ceil(t));
}

int floor_div_pi(double theta, const CountingPolicy& policy) {
  const double t = theta / kPi;
  const int k = static_cast<int>(std::lround(t));
  if (near_multiple(theta, k, policy)) return k;
  return static_cast<int>(std::floor(t));
}

std::array<double, 2> DenseSegment::eval(double x) const {
  const double s = (x - x0) / h;
  const double s1 = 1.0 - s;
  std::array<double, 2> y{};
  for (int i = 0; i < 2; ++i) {
    const auto& r = coeff[i];
    y[i] = r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
  }
  return y;
}

PrueferState SolutionTrace::at(double x) const {
  if (!(x >= x_begin() && x <= x_end())) {
    throw RangeError("x = " + fmt(x) + " outside trace [" + fmt(x_begin()) + ", " + fmt(x_end()) +
                     "]");
  }
  if (dense_ && !segments_.empty()) {
    if (x == x_end()) return states_.back();
    auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                               [](double v, const DenseSegment& s) { return v < s.x0; });
    const DenseSegment& seg = *(it == segments_.begin() ? it : it - 1);
    const auto y = seg.eval(x);
    return {x, y[0], y[1]};
  }
  auto it = std::lower_bound(states_.begin(), states_.end(), x,
                             [](const PrueferState& s, double v) { return s.x < v; });
  if (it == states_.end() || it->x != x) {
    throw RangeError("x = " + fmt(x) + " is not a recorded checkpoint of a sparse trace");
  }
  return *it;
}

SolutionTrace integrate_pruefer(const CoefficientSet& c, double lambda, double theta_a,
                                double x_end, Tolerances tol) {
  IntegrateOptions opt;
  opt.tol = tol;
  return integrate_pruefer(c, lambda, theta_a, x_end, opt);
}

SolutionTrace integrate_pruefer(const CoefficientSet& c, double lambda, double theta_a,
                                double x_end, const IntegrateOptions& options) {
  const Interval& iv = c.interval();
  if (!(x_end > iv.a) || !(x_end <= iv.b)) {
    throw DomainError("x_end = " + fmt(x_end) + " outside (a, b]");
  }
  if (!std::isfinite(theta_a)) throw DomainError("initial angle must be finite");
  const Tolerances tol = options.tol;
  if (!(tol.rtol > 0.0) || !(tol.atol > 0.0)) throw PreconditionError("tolerances must be positive");

  std::vector<double> checkpoints;
  for (double xc : options.checkpoints) {
    if (xc > iv.a && xc < x_end) checkpoints.push_back(xc);
  }
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  checkpoints.push_back(x_end);

  SolutionTrace trace(c, lambda, theta_a, tol, options.dense);
  const PrueferRhs f{c, lambda};
  const CountingPolicy snap{};
  const int base = floor_div_pi(theta_a, snap);

  double x = iv.a;
  Vec y{theta_a, 0.0};
  Vec k1 = f(x, y);
  trace.states_.push_back({x, y[0], y[1]});

  const double span = x_end - x;
  double h = std::min(span, 0.01 / std::max({std::fabs(k1[0]), std::fabs(k1[1]), 1e-2}));
  std::size_t next_cp = 0;
  int next_multiple = base + 1;

  while (true) {
    const double target = checkpoints[next_cp];
    double h_try = h;
    if (options.max_step > 0.0) h_try = std::min(h_try, options.max_step);
    bool landing = false;
    if (x + h_try >= target || target - (x + h_try) < 1e-12 * std::max(1.0, std::fabs(target))) {
      h_try = target - x;
      landing = true;
    }
    const double h_min = 1e-14 * std::max(1.0, std::fabs(x));
    if (h_try < h_min && !landing) {
      throw StepFailure("step size underflow at x = " + fmt(x), x);
    }

    const Vec k2 = f(x + c2 * h_try, axpy(y, h_try, {{a21, &k1}}));
    const Vec k3 = f(x + c3 * h_try, axpy(y, h_try, {{a31, &k1}, {a32, &k2}}));
    const Vec k4 = f(x + c4 * h_try, axpy(y, h_try, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec k5 =
        f(x + c5 * h_try, axpy(y, h_try, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const double x_new = landing ? target : x + h_try;
    const Vec k6 =
        f(x_new, axpy(y, h_try, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec y_new =
        axpy(y, h_try, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
    const Vec k7 = f(x_new, y_new);

    double err = 0.0;
    Vec e{};
    for (int i = 0; i < 2; ++i) {
      e[i] = h_try * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol.atol + tol.rtol * std::max(std::fabs(y[i]), std::fabs(y_new[i]));
      err += (e[i] / sc) * (e[i] / sc);
    }
    err = std::sqrt(err / 2.0);
    const bool angle_ok = std::fabs(y_new[0] - y[0]) <= kPi / 2;

    if (!(err <= 1.0) || !angle_ok || !std::isfinite(y_new[0]) || !std::isfinite(y_new[1])) {
      double shrink = 0.2;
      if (std::isfinite(err) && err > 0.0) shrink = std::max(0.2, 0.9 * std::pow(err, -0.25));
      if (!angle_ok) shrink = std::min(shrink, 0.5);
      h = std::min(h_try, h) * std::min(shrink, 0.9);
      if (h < h_min) throw StepFailure("step size underflow at x = " + fmt(x), x);
      continue;
    }

    DenseSegment seg{};
    seg.x0 = x;
    seg.h = h_try;
    for (int i = 0; i < 2; ++i) {
      const double ydiff = y_new[i] - y[i];
      const double bspl = h_try * k1[i] - ydiff;
      seg.coeff[i] = {y[i], ydiff, bspl, ydiff - h_try * k7[i] - bspl,
                      h_try * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                               d7 * k7[i])};
    }

    // Multiples of pi crossed upward; theta' = 1/p > 0 there.
    while (next_multiple * kPi <= y_new[0]) {
      const double level = next_multiple * kPi;
      if (level > y[0]) {
        double lo = x;
        double hi = x_new;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi);
          if (seg.eval(mid)[0] < level) {
            lo = mid;
          } else {
            hi = mid;
          }
        }
        trace.events_.push_back(0.5 * (lo + hi));
      }
      ++next_multiple;
    }

    trace.error_estimate_ += std::fabs(e[0]);
    ++trace.steps_;
    x = x_new;
    y = y_new;
    k1 = k7;

    if (options.dense) {
      trace.segments_.push_back(seg);
      trace.states_.push_back({x, y[0], y[1]});
    } else if (landing) {
      trace.states_.push_back({x, y[0], y[1]});
    }

    double grow = 5.0;
    if (err > 0.0) grow = std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)));
    if (!landing || h_try >= h) h = h_try * grow;

    if (landing) {
      if (next_cp + 1 == checkpoints.size()) break;
      ++next_cp;
    }
  }
  return trace;
}

int count_zeros(const SolutionTrace& trace, double x, const CountingPolicy& policy) {
  return ceil_div_pi(trace.theta(x), policy) - floor_div_pi(trace.theta_a(), policy) - 1;
}

std::vector<double> zero_positions(const SolutionTrace& trace) { return trace.events(); }

}  // namespace relosc
