#pragma once

// Iterated logarithms and the Kneser comparison scale.
//
//   log_0(x) = x,  log_n(x) = log|log_{n-1}(x)|
//   L_n(x)   = prod_{j=0}^{n} log_j(x)          (L_{-1} = 1)
//   Q_n(x)   = -1/4 sum_{j=0}^{n-1} L_j(x)^{-2} (Q_0 = 0)
//
// log_n is continuous for x > e_{n-1} and positive for x > e_n, where
// e_{-1} = -inf and e_n = exp(e_{n-1}).

namespace relosc {

/// e_n; returns -inf for n = -1.
double e_threshold(int n);

/// log_n(x). Throws DomainError for x <= e_{n-1}.
double iterated_log(int n, double x);

/// L_n(x); L_{-1}(x) = 1.
double log_product(int n, double x);

/// Q_n(x).
double kneser_q(int n, double x);

/// sum_{j=0}^{n-1} 1/L_j(x); zero for n = 0.
double inverse_log_product_sum(int n, double x);

struct LogScaleValues {
  double log_n;
  double L_n;
  double Q_n;
};

class LogScale {
 public:
  explicit LogScale(int n);

  int order() const noexcept { return n_; }
  double threshold() const { return e_threshold(n_); }
  LogScaleValues operator()(double x) const;

 private:
  int n_;
};

LogScaleValues log_scale_eval(int n, double x);

}  // namespace relosc
