#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace relosc {

/// (a, b) with finite a and b finite or +inf. The left endpoint is regular.
struct Interval {
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();

  bool right_infinite() const noexcept { return std::isinf(b); }
  bool contains(double x) const noexcept { return x >= a && x <= b; }
  bool operator==(const Interval&) const = default;
};

struct TailLimits {
  double p_inf;
  double q_inf;
  double r_inf;
  bool operator==(const TailLimits&) const = default;
};

struct CoeffValues {
  double p;
  double q;
  double r;
};

namespace family {

struct Constant {
  double p = 1.0;
  double q = 0.0;
  double r = 1.0;
  bool operator==(const Constant&) const = default;
};

/// p = p_inf, q = q_inf + c / x^2, r = r_inf.
struct InverseSquare {
  double c = 0.0;
  double q_inf = 0.0;
  double p_inf = 1.0;
  double r_inf = 1.0;
  bool operator==(const InverseSquare&) const = default;
};

/// q = q_inf + p_inf Q_n(x) + gamma / L_n(x)^2,
/// p = p_inf + p_log_coeff x^2 / L_n(x)^2, r = r_inf. Needs a > e_n.
struct IteratedLog {
  int n = 0;
  double gamma = 0.0;
  double q_inf = 0.0;
  double p_inf = 1.0;
  double r_inf = 1.0;
  double p_log_coeff = 0.0;
  bool operator==(const IteratedLog&) const = default;
};

/// p = p_inf, q = q_inf + q_coeff x^(-q_exp), r = r_inf + weight_coeff x^(-weight_exp).
struct PerturbedWeight {
  double p_inf = 1.0;
  double q_inf = 0.0;
  double r_inf = 1.0;
  double weight_coeff = 0.0;
  double weight_exp = 1.0;
  double q_coeff = 0.0;
  double q_exp = 2.0;
  bool operator==(const PerturbedWeight&) const = default;
};

/// Each coefficient is base + coeff * x^exponent; exponents of either sign.
struct PowerLaw {
  struct Term {
    double base = 0.0;
    double coeff = 0.0;
    double exponent = 0.0;
    bool operator==(const Term&) const = default;
  };
  Term p{1.0, 0.0, 0.0};
  Term q{0.0, 0.0, 0.0};
  Term r{1.0, 0.0, 0.0};
  bool operator==(const PowerLaw&) const = default;
};

/// q = q + amplitude * sin(frequency * g(x)) with g(x) = x or log x.
struct Oscillating {
  double p = 1.0;
  double q = 0.0;
  double r = 1.0;
  double amplitude = 1.0;
  double frequency = 1.0;
  bool log_argument = false;
  bool operator==(const Oscillating&) const = default;
};

/// Piecewise-linear interpolation of sampled coefficients.
struct Tabulated {
  std::vector<double> x;
  std::vector<double> p;
  std::vector<double> q;
  std::vector<double> r;
  bool operator==(const Tabulated&) const = default;
};

}  // namespace family

using FamilySpec = std::variant<family::Constant, family::InverseSquare, family::IteratedLog,
                                family::PerturbedWeight, family::PowerLaw, family::Oscillating,
                                family::Tabulated>;

enum class FamilyTag {
  Constant,
  InverseSquare,
  IteratedLog,
  PerturbedWeight,
  PowerLaw,
  Oscillating,
  Tabulated
};

std::string to_string(FamilyTag tag);
FamilyTag family_tag(const FamilySpec& spec);

/// Immutable, cheaply copyable coefficient triple (p, q, r) on an interval.
class CoefficientSet {
 public:
  const Interval& interval() const noexcept;
  const FamilySpec& spec() const noexcept;
  FamilyTag tag() const noexcept;
  const std::optional<TailLimits>& tail() const noexcept;

  /// Throws DomainError outside [a, b].
  CoeffValues operator()(double x) const;
  double p(double x) const { return (*this)(x).p; }
  double q(double x) const { return (*this)(x).q; }
  double r(double x) const { return (*this)(x).r; }

  /// (p - p_inf, q - q_inf, r - r_inf) evaluated without forming p, q, r.
  /// Throws MissingTail when no tail is declared.
  CoeffValues deviation(double x) const;

  /// q(x) - lambda r(x), split through the tail limits when they exist.
  double effective_potential(double x, double lambda) const;

  bool operator==(const CoefficientSet& other) const;

 private:
  struct Impl;
  explicit CoefficientSet(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;

  friend CoefficientSet build_coefficients(FamilySpec spec, Interval interval);
};

/// Validates parameters against the interval and fills in tail limits.
/// Throws DomainError or SpecError.
CoefficientSet build_coefficients(FamilySpec spec, Interval interval);

struct PositivityViolation {
  double x;
  char coefficient;  // 'p' or 'r'
  double value;
};

struct ValidationReport {
  bool passed = true;
  std::vector<PositivityViolation> violations;
};

/// Checks p > 0 and r > 0 at every grid point. The grid must lie in [a, b]
/// and increase strictly.
ValidationReport validate(const CoefficientSet& c, std::span<const double> grid);

enum class TailSource { Declared, Estimated };

struct TailEstimate {
  TailLimits limits;
  TailSource source;
  bool converged;
};

/// Declared limits verbatim, or last-window means of p, q, r over the grid.
TailEstimate tail_limits(const CoefficientSet& c, std::span<const double> tail_grid);

/// (p1 - p0, q1 - q0, r1 - r0) at x. When both sets declare tail limits the
/// difference is formed from the deviations, so common limits cancel exactly.
CoeffValues coefficient_difference(const CoefficientSet& c0, const CoefficientSet& c1, double x);

}  // namespace relosc
