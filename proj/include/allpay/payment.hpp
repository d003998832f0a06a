#pragma once

#include <span>
#include <string>
#include <vector>

namespace allpay {

/// Monomial payment family p(b, v) = c * b^a * v^(-d) with closed-form partials.
/// The modelling assumptions require c > 0, a > 1 and d >= 0; other members
/// can be constructed so that validate_payment() can report on them.
class PaymentFunction {
 public:
  PaymentFunction() = default;
  PaymentFunction(double c, double a, double d);

  double operator()(double b, double v) const;
  double d_b(double b, double v) const;
  double d_v(double b, double v) const;
  double d_bb(double b, double v) const;
  double d_bv(double b, double v) const;
  double d_bbv(double b, double v) const;

  /// Effort b >= 0 with p(b, v) = cost (closed-form inverse in b).
  double effort_for_cost(double cost, double v) const;

  /// True when p does not depend on the type (d == 0).
  bool type_independent() const { return d_ == 0.0; }

  double c() const { return c_; }
  double a() const { return a_; }
  double d() const { return d_; }
  std::string describe() const;

 private:
  double type_factor(double v, double extra_power) const;

  double c_ = 1.0;
  double a_ = 2.0;
  double d_ = 0.0;
};

/// Value scale h(v) = v^gamma, gamma > 0, so that a prize Z is worth h(v) Z.
class ValueScale {
 public:
  ValueScale() = default;
  explicit ValueScale(double gamma);

  double operator()(double v) const;
  double derivative(double v) const;
  double gamma() const { return gamma_; }

 private:
  double gamma_ = 1.0;
};

/// p_hat(b, v) = p(b, v) / h(v). For the monomial family this stays in the
/// family with d -> d + gamma; evaluation at v = 0 then raises DomainError.
PaymentFunction normalize_payment(const PaymentFunction& p, const ValueScale& h);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  double worst_value = 0.0;
  double worst_b = 0.0;
  double worst_v = 0.0;
};

struct DerivativeCheck {
  std::string name;
  bool passed = true;
  double max_rel_error = 0.0;
};

struct PaymentReport {
  std::vector<AssumptionCheck> assumptions;
  std::vector<DerivativeCheck> derivatives;
  bool ok() const;
  std::string summary() const;
};

/// Checks p(0,v)=0, p'_b>0, p'_v<=0, p''_bb>0, p'''_bbv<=0 on the grid, and
/// cross-checks every analytic partial against central finite differences.
PaymentReport validate_payment(const PaymentFunction& p, std::span<const double> b_grid,
                               std::span<const double> v_grid);

/// validate_payment on a default grid b in (0, b_max], v in (v_lo, v_hi].
PaymentReport validate_payment(const PaymentFunction& p, double b_max, double v_lo, double v_hi);

}  // namespace allpay
