#pragma once

#include <memory>
#include <span>
#include <vector>

#include "relosc/pruefer.hpp"

namespace relosc {

/// Two Prüfer traces started at the same a, possibly for different
/// coefficients and spectral parameters. delta = theta1 - theta0.
class RelativeTrace {
 public:
  RelativeTrace(std::shared_ptr<const SolutionTrace> t0, std::shared_ptr<const SolutionTrace> t1);
  RelativeTrace(SolutionTrace t0, SolutionTrace t1);

  const SolutionTrace& trace0() const noexcept { return *t0_; }
  const SolutionTrace& trace1() const noexcept { return *t1_; }

  double x_begin() const noexcept { return t0_->x_begin(); }
  double x_end() const noexcept { return x_end_; }

  double delta(double x) const;
  double delta_a() const noexcept { return t1_->theta_a() - t0_->theta_a(); }

  /// Both traces describe the same solution of the same equation.
  bool degenerate() const noexcept { return degenerate_; }

  /// x where delta crosses a multiple of pi, i.e. W(u0, u1) = 0. Only
  /// available when both traces are dense; empty otherwise.
  const std::vector<double>& w_events() const noexcept { return w_events_; }

 private:
  void locate_events();

  std::shared_ptr<const SolutionTrace> t0_;
  std::shared_ptr<const SolutionTrace> t1_;
  double x_end_;
  bool degenerate_;
  std::vector<double> w_events_;
};

/// W(u0, u1) = u0 (p1 u1') - (p0 u0') u1 = rho0 rho1 sin(theta0 - theta1).
double modified_wronskian(const RelativeTrace& rt, double x);

/// N(u0, u1)(x) = ceil(delta(x)/pi) - floor(delta(a)/pi) - 1.
int relative_count(const RelativeTrace& rt, double x, const CountingPolicy& policy = {});

struct DenseZeroCount {
  int count = 0;
  std::vector<double> zeros;
  bool grid_too_coarse = false;
  bool degenerate = false;
};

/// Independent oracle for relative_count: integrates u and p u' of both
/// solutions in Cartesian form with a fixed-step RK4 scheme and counts sign
/// changes of W on grid_n uniform cells of (a, x), refined by bisection.
DenseZeroCount wronskian_zero_count_dense(const RelativeTrace& rt, double x, int grid_n = 2000);

struct ConditionReport {
  bool cond_weak = true;    // p0 >= p1 and q0 - l0 r0 >= q1 - l1 r1
  bool cond_strict = true;  // and q0 - l0 r0 > q1 - l1 r1
  std::size_t samples = 0;
  double first_failure_x = 0.0;  // meaningful when cond_weak is false
};

ConditionReport check_conditions(const CoefficientSet& c0, double lambda0, const CoefficientSet& c1,
                                 double lambda1, std::span<const double> grid);

struct ComparisonViolation {
  double zero_left;
  double zero_right;
};

struct ComparisonReport {
  bool passed = true;
  std::size_t intervals_checked = 0;
  std::vector<ComparisonViolation> violations;
};

/// Between consecutive zeros of u0 there is a zero of u1. Needs cond_strict
/// on the common range, checked on 1024 sample points; throws
/// PreconditionError otherwise.
ComparisonReport sturm_comparison_check(const RelativeTrace& rt);

}  // namespace relosc
