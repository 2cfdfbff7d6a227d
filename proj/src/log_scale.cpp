#include "relosc/log_scale.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "relosc/errors.hpp"

namespace relosc {

namespace {

void require_order(int n) {
  if (n < 0) throw DomainError("log scale order must be non-negative, got " + std::to_string(n));
}

void require_continuity(int n, double x) {
  if (!(x > e_threshold(n - 1))) {
    throw DomainError("log_" + std::to_string(n) + " is undefined at x = " + std::to_string(x));
  }
}

}  // namespace

double e_threshold(int n) {
  if (n < -1) throw DomainError("e_n is defined for n >= -1");
  double e = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n; ++k) e = std::exp(e);
  return e;
}

double iterated_log(int n, double x) {
  require_order(n);
  require_continuity(n, x);
  double v = x;
  for (int k = 0; k < n; ++k) v = std::log(std::fabs(v));
  return v;
}

double log_product(int n, double x) {
  if (n == -1) return 1.0;
  require_order(n);
  require_continuity(n, x);
  double v = x;
  double prod = x;
  for (int k = 1; k <= n; ++k) {
    v = std::log(std::fabs(v));
    prod *= v;
  }
  return prod;
}

double kneser_q(int n, double x) {
  require_order(n);
  if (n == 0) return 0.0;
  require_continuity(n, x);
  double v = x;
  double prod = x;
  double sum = 1.0 / (prod * prod);
  for (int k = 1; k < n; ++k) {
    v = std::log(std::fabs(v));
    prod *= v;
    sum += 1.0 / (prod * prod);
  }
  return -0.25 * sum;
}

double inverse_log_product_sum(int n, double x) {
  require_order(n);
  if (n == 0) return 0.0;
  require_continuity(n, x);
  double v = x;
  double prod = x;
  double sum = 1.0 / prod;
  for (int k = 1; k < n; ++k) {
    v = std::log(std::fabs(v));
    prod *= v;
    sum += 1.0 / prod;
  }
  return sum;
}

LogScale::LogScale(int n) : n_(n) { require_order(n); }

LogScaleValues LogScale::operator()(double x) const { return log_scale_eval(n_, x); }

LogScaleValues log_scale_eval(int n, double x) {
  return {iterated_log(n, x), log_product(n, x), kneser_q(n, x)};
}

}  // namespace relosc
