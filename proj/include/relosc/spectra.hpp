#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relosc/classify.hpp"
#include "relosc/coeffs.hpp"
#include "relosc/pruefer.hpp"

namespace relosc {

enum class BoundaryCondition { Dirichlet, Neumann };

/// Regular problem on [a, b_trunc] cut from the coefficients. A finite b
/// may be used as b_trunc itself (treated as a regular endpoint).
struct TruncatedProblem {
  CoefficientSet coefficients;
  double b_trunc;
  BoundaryCondition left = BoundaryCondition::Dirichlet;
  BoundaryCondition right = BoundaryCondition::Dirichlet;
};

enum class CountMethod { PrueferShooting, FDInertia };
enum class GridMap { Uniform, Logarithmic };

std::string to_string(BoundaryCondition bc);
std::string to_string(CountMethod m);
std::string to_string(GridMap g);

/// Number of eigenvalues strictly below lambda.
struct EigenCount {
  double lambda;
  int count;
  CountMethod method;
  double resolution;     // rtol for shooting, grid_n for the FD oracle
  bool shifted = false;  // FD pivot hit zero; lambda was nudged by 1e-12
};

/// Prufer shooting: theta starts at 0 (Dirichlet) or pi/2 (Neumann) and
/// count = max(0, ceil((theta(b_trunc) - beta) / pi)), beta = pi or pi/2.
EigenCount count_below(const TruncatedProblem& tp, double lambda, Tolerances tol = {});

/// Sylvester inertia of the three-point discretization with midpoint p and
/// nodal q, r. The logarithmic map x = e^t (a > 0) keeps wide truncations
/// resolved near a.
EigenCount fd_inertia_count(const TruncatedProblem& tp, double lambda, int grid_n = 4000,
                            GridMap map = GridMap::Uniform);

/// tau - lambda relative to tau - mu on the same coefficients (lambda < mu).
/// Nonoscillatory means finitely many eigenvalues in (lambda, mu).
OscVerdict gap_finiteness(const CoefficientSet& c, double lambda, double mu,
                          const WindowPolicy& policy = {}, const ClassifyOptions& options = {});

/// q_inf / r_inf. Throws MissingTail.
double essential_bottom(const CoefficientSet& c);

struct AccumulationOptions {
  int grid_n = 4000;
  std::optional<GridMap> map;  // default: logarithmic when a > 0 and b_trunc / a > 100
  int jobs = 1;
  Tolerances tol{};
};

struct AccumulationRow {
  double b_trunc;
  double lambda;
  int count_shoot;
  int count_fd;
};

enum class AccumulationEvidence { Accumulating, Finite, Inconclusive };
std::string to_string(AccumulationEvidence e);

struct AccumulationStudy {
  double bottom = 0.0;
  std::vector<AccumulationRow> rows;  // truncation-major, input order
  AccumulationEvidence evidence = AccumulationEvidence::Inconclusive;
  int max_method_gap = 0;  // max |count_shoot - count_fd|
  std::string note;
};

/// Counts below each probe for each truncation, by both methods. Probes
/// must lie below essential_bottom(c); truncations increase.
/// Accumulating: at the largest truncation the count rises by at least two
/// across the probes and still rises over the upper half of them, and at
/// the top probe it grows from the first truncation to the last without
/// decreasing in between. Finite: every probe's count is constant over the
/// last three truncations and flat across the upper half of the probes.
AccumulationStudy accumulation_study(const CoefficientSet& c, std::span<const double> truncations,
                                     std::span<const double> probes,
                                     const AccumulationOptions& options = {});

}  // namespace relosc
