#include "relosc/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relosc/errors.hpp"
#include "relosc/log_scale.hpp"
#include "relosc/tail.hpp"

namespace relosc {

struct CoefficientSet::Impl {
  FamilySpec spec;
  Interval interval;
  std::optional<TailLimits> tail;
  FamilyTag tag;
};

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double power_term(const family::PowerLaw::Term& t, double x) {
  if (t.coeff == 0.0) return 0.0;
  if (t.exponent == 0.0) return t.coeff;
  return t.coeff * std::pow(x, t.exponent);
}

// Deviation of each coefficient from its tail limit; the caller adds the
// limits back when it needs the full value.
CoeffValues tail_deviation(const FamilySpec& spec, double x) {
  return std::visit(
      overloaded{
          [](const family::Constant&) { return CoeffValues{0.0, 0.0, 0.0}; },
          [x](const family::InverseSquare& f) { return CoeffValues{0.0, f.c / (x * x), 0.0}; },
          [x](const family::IteratedLog& f) {
            const double Ln = log_product(f.n, x);
            const double q = f.p_inf * kneser_q(f.n, x) + f.gamma / (Ln * Ln);
            const double p = f.p_log_coeff == 0.0 ? 0.0 : f.p_log_coeff * (x / Ln) * (x / Ln);
            return CoeffValues{p, q, 0.0};
          },
          [x](const family::PerturbedWeight& f) {
            const double q = f.q_coeff == 0.0 ? 0.0 : f.q_coeff * std::pow(x, -f.q_exp);
            const double r = f.weight_coeff == 0.0 ? 0.0 : f.weight_coeff * std::pow(x, -f.weight_exp);
            return CoeffValues{0.0, q, r};
          },
          [x](const family::PowerLaw& f) {
            return CoeffValues{power_term(f.p, x), power_term(f.q, x), power_term(f.r, x)};
          },
          [](const family::Oscillating&) -> CoeffValues {
            throw MissingTail("oscillating family has no tail limits");
          },
          [](const family::Tabulated&) -> CoeffValues {
            throw MissingTail("tabulated family has no tail limits");
          },
      },
      spec);
}

CoeffValues tabulated_eval(const family::Tabulated& t, double x) {
  if (x < t.x.front() || x > t.x.back()) {
    throw DomainError("x = " + fmt(x) + " outside the tabulated range");
  }
  auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - t.x.begin());
  if (hi >= t.x.size()) hi = t.x.size() - 1;
  const std::size_t lo = hi - 1;
  const double s = (x - t.x[lo]) / (t.x[hi] - t.x[lo]);
  auto lerp = [s, lo, hi](const std::vector<double>& v) { return v[lo] + s * (v[hi] - v[lo]); };
  return {lerp(t.p), lerp(t.q), lerp(t.r)};
}

// Nominal limits of the closed-form families, independent of whether the
// interval reaches infinity.
TailLimits nominal_limits(const FamilySpec& spec) {
  return std::visit(
      overloaded{
          [](const family::Constant& f) { return TailLimits{f.p, f.q, f.r}; },
          [](const family::InverseSquare& f) { return TailLimits{f.p_inf, f.q_inf, f.r_inf}; },
          [](const family::IteratedLog& f) { return TailLimits{f.p_inf, f.q_inf, f.r_inf}; },
          [](const family::PerturbedWeight& f) { return TailLimits{f.p_inf, f.q_inf, f.r_inf}; },
          [](const family::PowerLaw& f) { return TailLimits{f.p.base, f.q.base, f.r.base}; },
          [](const family::Oscillating& f) { return TailLimits{f.p, f.q, f.r}; },
          [](const family::Tabulated&) { return TailLimits{0.0, 0.0, 0.0}; },
      },
      spec);
}

CoeffValues full_eval(const FamilySpec& spec, double x) {
  if (const auto* t = std::get_if<family::Tabulated>(&spec)) return tabulated_eval(*t, x);
  if (const auto* o = std::get_if<family::Oscillating>(&spec)) {
    const double arg = o->log_argument ? std::log(x) : x;
    return {o->p, o->q + o->amplitude * std::sin(o->frequency * arg), o->r};
  }
  if (const auto* pl = std::get_if<family::PowerLaw>(&spec)) {
    return {pl->p.base + power_term(pl->p, x), pl->q.base + power_term(pl->q, x),
            pl->r.base + power_term(pl->r, x)};
  }
  const CoeffValues d = tail_deviation(spec, x);
  const TailLimits lim = nominal_limits(spec);
  return {lim.p_inf + d.p, lim.q_inf + d.q, lim.r_inf + d.r};
}

void require_positive_limits(double p_inf, double r_inf, const char* family) {
  if (!(p_inf > 0.0) || !(r_inf > 0.0)) {
    throw SpecError(std::string(family) + ": p_inf and r_inf must be positive (got p_inf = " +
                    fmt(p_inf) + ", r_inf = " + fmt(r_inf) + ")");
  }
}

void require_interval(const Interval& iv) {
  if (!std::isfinite(iv.a)) throw DomainError("left endpoint a must be finite");
  if (!(iv.b > iv.a)) throw DomainError("interval needs a < b");
}

bool term_decays(const family::PowerLaw::Term& t) { return t.coeff == 0.0 || t.exponent < 0.0; }

bool term_needs_positive_x(const family::PowerLaw::Term& t) {
  return t.coeff != 0.0 && (t.exponent < 0.0 || t.exponent != std::floor(t.exponent));
}

std::optional<TailLimits> check_family(const FamilySpec& spec, const Interval& iv) {
  return std::visit(
      overloaded{
          [](const family::Constant& f) -> std::optional<TailLimits> {
            require_positive_limits(f.p, f.r, "Constant");
            return TailLimits{f.p, f.q, f.r};
          },
          [&iv](const family::InverseSquare& f) -> std::optional<TailLimits> {
            require_positive_limits(f.p_inf, f.r_inf, "InverseSquare");
            if (!(iv.a > 0.0)) throw DomainError("InverseSquare needs a > 0");
            return TailLimits{f.p_inf, f.q_inf, f.r_inf};
          },
          [&iv](const family::IteratedLog& f) -> std::optional<TailLimits> {
            require_positive_limits(f.p_inf, f.r_inf, "IteratedLog");
            if (f.n < 0) throw SpecError("IteratedLog needs n >= 0");
            // (x / L_0)^2 = 1, so the p term would not decay.
            if (f.n == 0 && f.p_log_coeff != 0.0) {
              throw SpecError("IteratedLog p_log_coeff needs n >= 1");
            }
            if (!(iv.a > e_threshold(f.n))) {
              throw DomainError("IteratedLog with n = " + std::to_string(f.n) + " needs a > e_n = " +
                                fmt(e_threshold(f.n)));
            }
            return TailLimits{f.p_inf, f.q_inf, f.r_inf};
          },
          [&iv](const family::PerturbedWeight& f) -> std::optional<TailLimits> {
            require_positive_limits(f.p_inf, f.r_inf, "PerturbedWeight");
            if (!(f.weight_exp > 0.0)) throw SpecError("PerturbedWeight needs weight_exp > 0");
            if (!(f.q_exp > 0.0)) throw SpecError("PerturbedWeight needs q_exp > 0");
            if (!(iv.a > 0.0)) throw DomainError("PerturbedWeight needs a > 0");
            return TailLimits{f.p_inf, f.q_inf, f.r_inf};
          },
          [&iv](const family::PowerLaw& f) -> std::optional<TailLimits> {
            if ((term_needs_positive_x(f.p) || term_needs_positive_x(f.q) ||
                 term_needs_positive_x(f.r)) &&
                !(iv.a > 0.0)) {
              throw DomainError("PowerLaw with negative or fractional exponents needs a > 0");
            }
            if (iv.right_infinite() && f.p.base > 0.0 && f.r.base > 0.0 && term_decays(f.p) &&
                term_decays(f.q) && term_decays(f.r)) {
              return TailLimits{f.p.base, f.q.base, f.r.base};
            }
            return std::nullopt;
          },
          [&iv](const family::Oscillating& f) -> std::optional<TailLimits> {
            if (f.log_argument && !(iv.a > 0.0)) {
              throw DomainError("Oscillating with log argument needs a > 0");
            }
            if (f.amplitude == 0.0) {
              require_positive_limits(f.p, f.r, "Oscillating");
              return TailLimits{f.p, f.q, f.r};
            }
            return std::nullopt;
          },
          [&iv](const family::Tabulated& f) -> std::optional<TailLimits> {
            const std::size_t n = f.x.size();
            if (n < 2 || f.p.size() != n || f.q.size() != n || f.r.size() != n) {
              throw SpecError("Tabulated needs at least two samples and equal column lengths");
            }
            for (std::size_t i = 1; i < n; ++i) {
              if (!(f.x[i] > f.x[i - 1])) throw SpecError("Tabulated grid must increase strictly");
            }
            if (iv.a < f.x.front() || iv.right_infinite() || iv.b > f.x.back()) {
              throw DomainError("interval must lie inside the tabulated range");
            }
            return std::nullopt;
          },
      },
      spec);
}

}  // namespace

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Constant: return "Constant";
    case FamilyTag::InverseSquare: return "InverseSquare";
    case FamilyTag::IteratedLog: return "IteratedLog";
    case FamilyTag::PerturbedWeight: return "PerturbedWeight";
    case FamilyTag::PowerLaw: return "PowerLaw";
    case FamilyTag::Oscillating: return "Oscillating";
    case FamilyTag::Tabulated: return "Tabulated";
  }
  return "Unknown";
}

FamilyTag family_tag(const FamilySpec& spec) { return static_cast<FamilyTag>(spec.index()); }

CoefficientSet::CoefficientSet(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

const Interval& CoefficientSet::interval() const noexcept { return impl_->interval; }
const FamilySpec& CoefficientSet::spec() const noexcept { return impl_->spec; }
FamilyTag CoefficientSet::tag() const noexcept { return impl_->tag; }
const std::optional<TailLimits>& CoefficientSet::tail() const noexcept { return impl_->tail; }

CoeffValues CoefficientSet::operator()(double x) const {
  if (!impl_->interval.contains(x)) {
    throw DomainError("x = " + fmt(x) + " outside [" + fmt(impl_->interval.a) + ", " +
                      fmt(impl_->interval.b) + "]");
  }
  return full_eval(impl_->spec, x);
}

CoeffValues CoefficientSet::deviation(double x) const {
  if (!impl_->tail) throw MissingTail(to_string(impl_->tag) + " coefficients declare no tail");
  if (!impl_->interval.contains(x)) throw DomainError("x = " + fmt(x) + " outside the interval");
  if (std::holds_alternative<family::Oscillating>(impl_->spec)) return {0.0, 0.0, 0.0};
  return tail_deviation(impl_->spec, x);
}

double CoefficientSet::effective_potential(double x, double lambda) const {
  if (impl_->tail) {
    const CoeffValues d = deviation(x);
    return (d.q - lambda * d.r) + (impl_->tail->q_inf - lambda * impl_->tail->r_inf);
  }
  const CoeffValues v = (*this)(x);
  return v.q - lambda * v.r;
}

bool CoefficientSet::operator==(const CoefficientSet& other) const {
  if (impl_ == other.impl_) return true;
  return impl_->interval == other.impl_->interval && impl_->spec == other.impl_->spec;
}

CoefficientSet build_coefficients(FamilySpec spec, Interval interval) {
  require_interval(interval);
  auto tail = check_family(spec, interval);
  // Tail limits are limits as x -> inf; a finite right endpoint declares none.
  if (!interval.right_infinite()) tail.reset();
  const FamilyTag tag = family_tag(spec);
  auto impl = std::make_shared<const CoefficientSet::Impl>(
      CoefficientSet::Impl{std::move(spec), interval, tail, tag});
  return CoefficientSet(std::move(impl));
}

ValidationReport validate(const CoefficientSet& c, std::span<const double> grid) {
  ValidationReport rep;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0 && !(grid[i] > grid[i - 1])) throw DomainError("validation grid must increase strictly");
    const CoeffValues v = c(grid[i]);
    if (!(v.p > 0.0)) rep.violations.push_back({grid[i], 'p', v.p});
    if (!(v.r > 0.0)) rep.violations.push_back({grid[i], 'r', v.r});
  }
  rep.passed = rep.violations.empty();
  return rep;
}

TailEstimate tail_limits(const CoefficientSet& c, std::span<const double> tail_grid) {
  if (tail_grid.size() < 16) throw PreconditionError("tail_limits needs at least 16 grid points");
  if (c.tail()) return {*c.tail(), TailSource::Declared, true};
  std::vector<double> p, q, r;
  for (double x : tail_grid) {
    const CoeffValues v = c(x);
    p.push_back(v.p);
    q.push_back(v.q);
    r.push_back(v.r);
  }
  const auto ap = assess_limit(p);
  const auto aq = assess_limit(q);
  const auto ar = assess_limit(r);
  return {{ap.estimate, aq.estimate, ar.estimate},
          TailSource::Estimated,
          ap.converged && aq.converged && ar.converged};
}

CoeffValues coefficient_difference(const CoefficientSet& c0, const CoefficientSet& c1, double x) {
  if (c0.tail() && c1.tail()) {
    const CoeffValues d0 = c0.deviation(x);
    const CoeffValues d1 = c1.deviation(x);
    const TailLimits& t0 = *c0.tail();
    const TailLimits& t1 = *c1.tail();
    return {(d1.p - d0.p) + (t1.p_inf - t0.p_inf), (d1.q - d0.q) + (t1.q_inf - t0.q_inf),
            (d1.r - d0.r) + (t1.r_inf - t0.r_inf)};
  }
  const CoeffValues v0 = c0(x);
  const CoeffValues v1 = c1(x);
  return {v1.p - v0.p, v1.q - v0.q, v1.r - v0.r};
}

}  // namespace relosc
