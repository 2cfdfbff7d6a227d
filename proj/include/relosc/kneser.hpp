#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relosc/coeffs.hpp"
#include "relosc/log_scale.hpp"
#include "relosc/tail.hpp"

// Kneser-type criteria. For a positive principal solution u0 of
// (tau0 - lambda) u = 0 and its d'Alembert companion v0,
//
//   Delta = p0 v0^2 [u0^2 (q1 - q0 - lambda (r1 - r0))
//                    + (p0 u0')^2 (p1 - p0) / (p1 p0)]
//
// decides oscillation of tau1 - lambda against the constant -1/4.

namespace relosc {

using Evaluator = std::function<double(double)>;

inline constexpr double kKneserThreshold = -0.25;
inline constexpr double kDefaultKneserMargin = 0.01;

struct PrincipalPair {
  Evaluator u0;
  Evaluator du0;  // u0'
  Evaluator v0;
  Evaluator p0;
  double c = 0.0;  // lower limit of the d'Alembert integral
};

/// v0(x) = u0(x) * int_c^x dt / (p0 u0^2), Gauss-Kronrod to rtol 1e-10.
/// Throws PositivityError if u0 <= 0 at a node, QuadratureFailure if the
/// error estimate is not met.
double dalembert(const Evaluator& u0, const Evaluator& p0, double c, double x);

/// Pair with v0 computed by dalembert().
PrincipalPair make_principal_pair(Evaluator u0, Evaluator du0, Evaluator p0, double c);

/// u0 = sqrt(L_{n-1}), v0 = sqrt(L_{n-1}) log_n / p_inf, anchored at e_n.
/// u0 solves -u'' + Q_n u = 0, so it is principal for p = p_inf,
/// q = q_inf + p_inf Q_n, r = r_inf at lambda = q_inf / r_inf.
PrincipalPair log_scale_pair(int n, double p_inf);

/// Growth of x -> int_c^x dt / (p0 u0^2) over windows of the tail grid.
/// Diverging means u0 is minimal (principal).
GrowthAssessment minimality_check(const PrincipalPair& pair, std::span<const double> tail_grid);

double delta(const CoefficientSet& c0, const CoefficientSet& c1, double lambda,
             const PrincipalPair& pair, double x);

/// L_n^2 [q1/p_inf - Q_n - q_inf r1/(p_inf r_inf) + S^2 (1 - p_inf/p1) / 4]
/// with S = sum_{j<n} 1/L_j and the limits taken from c1. Throws MissingTail
/// or DomainError (x <= e_n).
double delta_tilde(const CoefficientSet& c1, int n, double x);

/// delta_tilde without the p-term, i.e. the expression of the n >= 1
/// corollary under p1 = p_inf + o(x^2 / L_n^2).
double delta_tilde_reduced(const CoefficientSet& c1, int n, double x);

struct SideConditionReport {
  bool passed = false;
  VanishAssessment v0_p0_du0_term;  // v0 p0 u0' (p1 - p0) / p1
  VanishAssessment p_ratio_term;    // (p1 - p0) / p1
};

SideConditionReport side_conditions_thm_gu(const CoefficientSet& c0, const CoefficientSet& c1,
                                           const PrincipalPair& pair,
                                           std::span<const double> tail_grid);

/// L_n^2 (p1 - p_inf) / x^2 -> 0 on the tail grid.
bool aventura_check(const CoefficientSet& c1, int n, std::span<const double> tail_grid);
VanishAssessment aventura_assessment(const CoefficientSet& c1, int n,
                                     std::span<const double> tail_grid);

enum class KneserMode { Pointwise, Averaged };
enum class KneserVerdict { Oscillatory, Nonoscillatory, Inconclusive };

std::string to_string(KneserMode m);
std::string to_string(KneserVerdict v);

struct KneserOptions {
  KneserMode mode = KneserMode::Pointwise;
  double margin = kDefaultKneserMargin;
  std::vector<double> ell_grid{1.0, 2.0, 4.0, 8.0};
  int windows = kTailWindows;
};

struct KneserSample {
  double x;
  double value;
};

/// Regularity of rho = 1 / (p0 u0 v0) needed by the averaged criterion.
struct RhoConditions {
  bool bounded = false;
  bool vanishes = false;
  bool averaged_variation = false;  // (1/l) int_0^l |rho(x+t) - rho(x)| dt = o(rho)
  bool passed() const { return bounded && vanishes && averaged_variation; }
};

struct KneserReport {
  KneserMode mode = KneserMode::Pointwise;
  std::vector<KneserSample> samples;
  std::vector<double> window_sup;
  std::vector<double> window_inf;
  double sup_tail = 0.0;  // limsup estimate
  double inf_tail = 0.0;  // liminf estimate
  double margin = kDefaultKneserMargin;
  KneserVerdict verdict = KneserVerdict::Inconclusive;
  std::optional<double> best_ell;  // averaged mode: the l that decided
  std::optional<RhoConditions> rho;
  std::optional<SideConditionReport> side_conditions;
  std::string note;
};

/// Pointwise classification of tail samples of Delta (or Delta tilde).
/// Samples must be ordered in x and fill at least two per window.
KneserReport kneser_classify(std::span<const KneserSample> samples,
                             double margin = kDefaultKneserMargin,
                             int windows = kTailWindows);

/// Samples Delta on the tail grid. In averaged mode the windows read
/// (1/l) int_x^{x+l} Delta for every l of the grid, and rho (when given)
/// is checked; without rho the averaged verdict is Inconclusive.
KneserReport kneser_classify(const Evaluator& delta_fn, std::span<const double> tail_grid,
                             const KneserOptions& options, const Evaluator& rho = {});

}  // namespace relosc
