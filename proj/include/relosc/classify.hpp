#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relosc/coeffs.hpp"
#include "relosc/kneser.hpp"
#include "relosc/pruefer.hpp"
#include "relosc/tail.hpp"

namespace relosc {

/// Finite stand-in for x -> b: counts are read at K window points
/// x_k = x0 ratio^k (b = inf) or x_k = b - (b - x0) ratio^{-k} (b finite),
/// k = 0..K-1.
struct WindowPolicy {
  double x0 = std::numeric_limits<double>::quiet_NaN();  // NaN: a + 1
  double ratio = 2.0;
  int K = 12;
  int K_stable = 4;
  int K_grow = 4;
};

/// Throws PreconditionError for an inconsistent policy or windows outside (a, b).
std::vector<double> window_points(const Interval& interval, const WindowPolicy& policy);

enum class OscKind { Nonoscillatory, Oscillatory, Inconclusive };

/// What a verdict rests on.
enum class VerdictBasis {
  WindowCount,        // the window rule on the counts
  KneserCertificate,  // Delta tilde at the bottom of the essential spectrum
  EssentialSpectrum,  // lambda strictly below or above q_inf / r_inf
  RelativeLemma       // classical verdicts of both sides combined
};

std::string to_string(OscKind k);
std::string to_string(VerdictBasis b);

struct WindowSample {
  double x;
  int n;
};

struct OscVerdict {
  OscKind kind = OscKind::Inconclusive;
  std::optional<int> n_limit;  // set when the window counts are stable
  std::vector<WindowSample> windows;
  WindowPolicy policy;
  VerdictBasis basis = VerdictBasis::WindowCount;
  std::optional<KneserReport> certificate;
  std::string note;
};

struct ClassifyOptions {
  Tolerances tol{};
  /// Use the declared tail (b = inf) to decide through the essential
  /// spectrum and Kneser certificates before the window rule.
  bool use_tail_certificates = true;
  double margin = kDefaultKneserMargin;
  int max_log_order = 3;  // Delta tilde orders tried, 0..max_log_order
  double theta0_a = 0.0;
  double theta1_a = 0.0;  // second solution, relative classification only
};

/// Window rule alone: Oscillatory when N grows over each of the last K_grow
/// windows, Nonoscillatory when it is constant over the last K_stable.
OscKind window_rule(std::span<const WindowSample> windows, const WindowPolicy& policy);

OscVerdict classify_oscillation(const CoefficientSet& c, double lambda,
                                const WindowPolicy& policy = {},
                                const ClassifyOptions& options = {});

/// tau0 - lambda0 relative to tau1 - lambda1. When one side is classically
/// nonoscillatory the two classical verdicts decide; otherwise the window
/// rule on N(u0, u1) is applied, and stability only counts when one of the
/// comparison conditions makes N monotone.
OscVerdict classify_relative(const CoefficientSet& c0, double lambda0, const CoefficientSet& c1,
                             double lambda1, const WindowPolicy& policy = {},
                             const ClassifyOptions& options = {});

struct AlphaBetaSide {
  VanishAssessment r_ratio;  // r1/r0 - 1
  VanishAssessment p_ratio;  // p1/p0 - 1
  VanishAssessment q_drift;  // (q1 - q0)/r0
  BoundAssessment q_over_r;  // q0/r0
  bool pass_alpha = false;
  bool pass_beta = false;
};

struct AlphaBetaReport {
  AlphaBetaSide direct;   // (alpha), (beta)
  AlphaBetaSide swapped;  // (alpha'), (beta') with the roles exchanged
  bool pass_alpha = false;
  bool pass_beta = false;
  bool symmetric_agree = false;
  std::size_t grid_points = 0;
};

/// Needs a tail grid of at least 32 points approaching b.
AlphaBetaReport check_alpha_beta(const CoefficientSet& c0, const CoefficientSet& c1,
                                 std::span<const double> tail_grid);

enum class Invariance { Invariant, Unknown };
std::string to_string(Invariance v);

struct InvarianceReport {
  Invariance verdict = Invariance::Unknown;
  std::string reason;
  std::optional<AlphaBetaReport> hypotheses;
};

/// Claims sigma_ess(T0) = sigma_ess(T1) only when (alpha) and (beta) pass on
/// the grid or the coefficient sets coincide.
InvarianceReport essential_spectrum_invariance(const CoefficientSet& c0, const CoefficientSet& c1,
                                               std::span<const double> tail_grid);

enum class EndpointClass { LimitPoint, LimitCircle, Inconclusive };
std::string to_string(EndpointClass e);

struct LimitPointReport {
  EndpointClass verdict = EndpointClass::Inconclusive;
  std::vector<double> window_sums_u;  // int r u^2, u = int_c^x 1/p
  std::vector<double> window_sums_v;  // int r, v = 1
  GrowthAssessment growth_u;
  GrowthAssessment growth_v;
};

/// Heuristic Weyl classification at b from the p-only expression.
LimitPointReport limit_point_probe(const CoefficientSet& c, std::span<const double> tail_grid);

}  // namespace relosc
