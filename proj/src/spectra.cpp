#include "relosc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "relosc/errors.hpp"
#include "relosc/parallel.hpp"

namespace relosc {

namespace {

constexpr double kPi = std::numbers::pi;

void check_problem(const TruncatedProblem& tp) {
  const Interval& iv = tp.coefficients.interval();
  if (!(tp.b_trunc > iv.a) || !(tp.b_trunc <= iv.b)) {
    throw DomainError("truncation point must lie in (a, b]");
  }
}

double boundary_angle(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? 0.0 : kPi / 2;
}

struct Node {
  double x;  // physical position
  double w;  // Jacobian dx/dt (1 for the uniform map)
};

// Inertia of the symmetric tridiagonal A - lambda B with diagonal alpha and
// off-diagonal beta[i] between rows i-1 and i.
int negative_pivots(const std::vector<double>& alpha, const std::vector<double>& beta, bool& zero) {
  int neg = 0;
  double d = 1.0;
  zero = false;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    d = (i == 0) ? alpha[0] : alpha[i] - beta[i] * beta[i] / d;
    if (d == 0.0 || !std::isfinite(d)) {
      zero = true;
      return 0;
    }
    if (d < 0.0) ++neg;
  }
  return neg;
}

}  // namespace

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

std::string to_string(CountMethod m) {
  return m == CountMethod::PrueferShooting ? "pruefer_shooting" : "fd_inertia";
}

std::string to_string(GridMap g) { return g == GridMap::Uniform ? "uniform" : "logarithmic"; }

std::string to_string(AccumulationEvidence e) {
  switch (e) {
    case AccumulationEvidence::Accumulating:
      return "accumulating";
    case AccumulationEvidence::Finite:
      return "finite";
    case AccumulationEvidence::Inconclusive:
      break;
  }
  return "inconclusive";
}

EigenCount count_below(const TruncatedProblem& tp, double lambda, Tolerances tol) {
  check_problem(tp);
  const SolutionTrace tr = integrate_pruefer(tp.coefficients, lambda, boundary_angle(tp.left),
                                             tp.b_trunc, IntegrateOptions{tol, false, {}, 0.0});
  const double beta = tp.right == BoundaryCondition::Dirichlet ? kPi : kPi / 2;
  const int n = ceil_div_pi(tr.theta(tp.b_trunc) - beta);
  return {lambda, std::max(0, n), CountMethod::PrueferShooting, tol.rtol};
}

EigenCount fd_inertia_count(const TruncatedProblem& tp, double lambda, int grid_n, GridMap map) {
  check_problem(tp);
  if (grid_n < 64) throw PreconditionError("FD inertia needs grid_n >= 64");
  const CoefficientSet& c = tp.coefficients;
  const double a = c.interval().a;
  const double b = tp.b_trunc;
  if (map == GridMap::Logarithmic && !(a > 0.0)) {
    throw DomainError("logarithmic grid needs a > 0");
  }

  // Grid in the computational variable t; x = t (uniform) or x = e^t.
  const double t0 = map == GridMap::Uniform ? a : std::log(a);
  const double t1 = map == GridMap::Uniform ? b : std::log(b);
  const double h = (t1 - t0) / grid_n;
  auto node = [&](double t) -> Node {
    if (map == GridMap::Uniform) return {t, 1.0};
    const double x = std::exp(t);
    return {x, x};
  };
  // Transformed coefficients: p/w, q w, r w with w = dx/dt.
  auto p_at = [&](double t) {
    const Node n = node(t);
    return c.p(std::clamp(n.x, a, b)) / n.w;
  };
  std::vector<double> qt(grid_n + 1);
  std::vector<double> rt(grid_n + 1);
  std::vector<double> pm(grid_n);  // p at cell midpoints
  for (int i = 0; i <= grid_n; ++i) {
    const double t = (i == grid_n) ? t1 : t0 + i * h;
    const Node n = node(t);
    const double x = (i == 0) ? a : (i == grid_n) ? b : std::clamp(n.x, a, b);
    const CoeffValues v = c(x);
    qt[i] = v.q * n.w;
    rt[i] = v.r * n.w;
  }
  for (int i = 0; i < grid_n; ++i) pm[i] = p_at(t0 + (i + 0.5) * h);

  const int first = tp.left == BoundaryCondition::Dirichlet ? 1 : 0;
  const int last = tp.right == BoundaryCondition::Dirichlet ? grid_n - 1 : grid_n;
  const double h2 = h * h;

  auto count = [&](double lam, bool& zero) {
    std::vector<double> alpha;
    std::vector<double> beta;
    alpha.reserve(last - first + 1);
    beta.reserve(last - first + 1);
    for (int i = first; i <= last; ++i) {
      double diag;
      if (i == 0) {
        diag = pm[0] / h2 + 0.5 * (qt[0] - lam * rt[0]);
      } else if (i == grid_n) {
        diag = pm[grid_n - 1] / h2 + 0.5 * (qt[grid_n] - lam * rt[grid_n]);
      } else {
        diag = (pm[i - 1] + pm[i]) / h2 + qt[i] - lam * rt[i];
      }
      alpha.push_back(diag);
      beta.push_back(i == first ? 0.0 : -pm[i - 1] / h2);
    }
    return negative_pivots(alpha, beta, zero);
  };

  bool zero = false;
  int n = count(lambda, zero);
  bool shifted = false;
  if (zero) {
    shifted = true;
    n = count(lambda + 1e-12, zero);
    if (zero) throw PreconditionError("FD pivot breakdown persists after shifting lambda");
  }
  return {lambda, n, CountMethod::FDInertia, static_cast<double>(grid_n), shifted};
}

OscVerdict gap_finiteness(const CoefficientSet& c, double lambda, double mu,
                          const WindowPolicy& policy, const ClassifyOptions& options) {
  if (!(lambda < mu)) throw PreconditionError("gap finiteness needs lambda < mu");
  return classify_relative(c, lambda, c, mu, policy, options);
}

double essential_bottom(const CoefficientSet& c) {
  if (!c.tail()) throw MissingTail("essential bottom needs declared tail limits");
  return c.tail()->q_inf / c.tail()->r_inf;
}

AccumulationStudy accumulation_study(const CoefficientSet& c, std::span<const double> truncations,
                                     std::span<const double> probes,
                                     const AccumulationOptions& options) {
  AccumulationStudy study;
  study.bottom = essential_bottom(c);
  if (truncations.empty() || probes.empty()) {
    throw PreconditionError("accumulation study needs truncations and probes");
  }
  for (double l : probes) {
    if (!(l < study.bottom)) throw PreconditionError("probes must lie below q_inf / r_inf");
  }
  for (std::size_t i = 1; i < truncations.size(); ++i) {
    if (!(truncations[i] > truncations[i - 1])) {
      throw PreconditionError("truncations must increase");
    }
  }

  const std::size_t nb = truncations.size();
  const std::size_t np = probes.size();
  study.rows.resize(nb * np);
  const double a = c.interval().a;
  parallel_for(nb * np, options.jobs, [&](std::size_t idx) {
    const double b = truncations[idx / np];
    const double lam = probes[idx % np];
    const TruncatedProblem tp{c, b};
    GridMap map = GridMap::Uniform;
    if (options.map) {
      map = *options.map;
    } else if (a > 0.0 && b / a > 100.0) {
      map = GridMap::Logarithmic;
    }
    const int shoot = count_below(tp, lam, options.tol).count;
    const int fd = fd_inertia_count(tp, lam, options.grid_n, map).count;
    study.rows[idx] = {b, lam, shoot, fd};
  });

  for (const auto& r : study.rows) {
    study.max_method_gap = std::max(study.max_method_gap, std::abs(r.count_shoot - r.count_fd));
  }

  // Order probes ascending without disturbing the row layout.
  std::vector<std::size_t> order(np);
  for (std::size_t j = 0; j < np; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return probes[i] < probes[j]; });
  auto at = [&](std::size_t bi, std::size_t pj) { return study.rows[bi * np + pj].count_shoot; };

  const std::size_t last_b = nb - 1;
  const std::size_t top = order.back();
  const std::size_t upper_start = np / 2;
  const int rise_all = at(last_b, top) - at(last_b, order.front());
  const int rise_upper = at(last_b, top) - at(last_b, order[upper_start]);
  bool top_monotone_in_b = true;
  for (std::size_t bi = 1; bi < nb; ++bi) {
    if (at(bi, top) < at(bi - 1, top)) top_monotone_in_b = false;
  }
  bool stable_in_b = nb >= 3;
  for (std::size_t pj = 0; pj < np && stable_in_b; ++pj) {
    for (std::size_t bi = nb - 2; bi < nb; ++bi) {
      if (at(bi, pj) != at(bi - 1, pj)) stable_in_b = false;
    }
  }

  const bool top_grew = at(last_b, top) > at(0, top);
  if (rise_all >= 2 && rise_upper >= 1 && top_monotone_in_b && top_grew) {
    study.evidence = AccumulationEvidence::Accumulating;
    study.note = "counts keep rising as the probes approach q_inf/r_inf";
  } else if (stable_in_b && rise_upper == 0) {
    study.evidence = AccumulationEvidence::Finite;
    study.note = "counts stable in b_trunc and flat over the upper probes";
  } else {
    study.note = "counts neither rising toward q_inf/r_inf nor settled";
  }
  return study;
}

}  // namespace relosc
