#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "relosc/coeffs.hpp"

namespace relosc {

struct Tolerances {
  double rtol = 1e-9;
  double atol = 1e-12;
};

/// Snap policy for the floor/ceiling of theta / pi. Angles within
/// snap_rtol * max(1, |theta|) of a multiple of pi count as that multiple.
struct CountingPolicy {
  double snap_rtol = 1e-9;
};

/// ceil(theta / pi) and floor(theta / pi) under the snap policy.
int ceil_div_pi(double theta, const CountingPolicy& policy = {});
int floor_div_pi(double theta, const CountingPolicy& policy = {});

/// Prüfer variables of u = rho sin(theta), p u' = rho cos(theta) at x.
struct PrueferState {
  double x;
  double theta;  // continuous lift, never reduced mod pi
  double log_rho;
};

/// Continuous extension of one Dormand-Prince step (Hairer's contd5).
struct DenseSegment {
  double x0;
  double h;
  std::array<std::array<double, 5>, 2> coeff;  // [component][rcont index]

  std::array<double, 2> eval(double x) const;
};

struct IntegrateOptions {
  Tolerances tol{};
  /// Keep the per-step continuous extension so theta(x) is available
  /// everywhere; otherwise only checkpoint states are stored.
  bool dense = true;
  /// Abscissae the integrator must land on exactly (sorted, inside the range).
  std::vector<double> checkpoints{};
  double max_step = 0.0;  // 0 = unlimited
};

/// Prüfer trace of one solution of (tau - lambda) u = 0 starting at a.
class SolutionTrace {
 public:
  double lambda() const noexcept { return lambda_; }
  const CoefficientSet& coefficients() const noexcept { return coeffs_; }
  double theta_a() const noexcept { return theta_a_; }
  const Tolerances& tolerances() const noexcept { return tol_; }
  bool dense() const noexcept { return dense_; }

  const std::vector<PrueferState>& states() const noexcept { return states_; }
  /// x positions where theta crosses a multiple of pi, increasing.
  const std::vector<double>& events() const noexcept { return events_; }
  /// Sum of accepted local error estimates of theta.
  double error_estimate() const noexcept { return error_estimate_; }
  std::size_t steps() const noexcept { return steps_; }

  double x_begin() const { return states_.front().x; }
  double x_end() const { return states_.back().x; }

  /// State at x; RangeError outside the trace, or (sparse traces) away from
  /// a stored state.
  PrueferState at(double x) const;
  double theta(double x) const { return at(x).theta; }

 private:
  friend SolutionTrace integrate_pruefer(const CoefficientSet&, double, double, double,
                                         const IntegrateOptions&);
  SolutionTrace(CoefficientSet c, double lambda, double theta_a, Tolerances tol, bool dense)
      : coeffs_(std::move(c)), lambda_(lambda), theta_a_(theta_a), tol_(tol), dense_(dense) {}

  CoefficientSet coeffs_;
  double lambda_;
  double theta_a_;
  Tolerances tol_;
  bool dense_;
  std::vector<PrueferState> states_;
  std::vector<DenseSegment> segments_;
  std::vector<double> events_;
  double error_estimate_ = 0.0;
  std::size_t steps_ = 0;
};

/// Integrates
///   theta'   = cos^2(theta) / p - (q - lambda r) sin^2(theta)
///   log_rho' = (1/p + q - lambda r) sin(theta) cos(theta)
/// from a to x_end with an adaptive Dormand-Prince 5(4) pair. Steps with
/// |delta theta| > pi/2 are rejected.
/// Throws DomainError if x_end is outside (a, b], StepFailure on underflow.
SolutionTrace integrate_pruefer(const CoefficientSet& c, double lambda, double theta_a,
                                double x_end, const IntegrateOptions& options);
SolutionTrace integrate_pruefer(const CoefficientSet& c, double lambda, double theta_a,
                                double x_end, Tolerances tol = {});

/// Zeros of u in (a, x): ceil(theta(x)/pi) - floor(theta(a)/pi) - 1.
int count_zeros(const SolutionTrace& trace, double x, const CountingPolicy& policy = {});

/// Located zeros of u in (a, x_end].
std::vector<double> zero_positions(const SolutionTrace& trace);

}  // namespace relosc
