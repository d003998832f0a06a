#include "allpay/payment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "allpay/errors.hpp"

namespace allpay {

PaymentFunction::PaymentFunction(double c, double a, double d) : c_(c), a_(a), d_(d) {
  if (!std::isfinite(c) || !std::isfinite(a) || !std::isfinite(d)) {
    throw ConfigError("PaymentFunction: parameters must be finite");
  }
}

double PaymentFunction::type_factor(double v, double extra_power) const {
  const double power = -d_ - extra_power;
  if (power != 0.0 && !(v > 0.0)) {
    std::ostringstream msg;
    msg << "payment: type-dependent term undefined at v = " << v;
    throw DomainError(msg.str());
  }
  return power == 0.0 ? 1.0 : std::pow(v, power);
}

namespace {
// b^e with the convention 0^0 = 1 and 0^e = 0 for e > 0.
double bpow(double b, double e) { return e == 0.0 ? 1.0 : std::pow(b, e); }
}  // namespace

double PaymentFunction::operator()(double b, double v) const {
  return c_ * bpow(b, a_) * type_factor(v, 0.0);
}
double PaymentFunction::d_b(double b, double v) const {
  return c_ * a_ * bpow(b, a_ - 1.0) * type_factor(v, 0.0);
}
double PaymentFunction::d_v(double b, double v) const {
  return -d_ * c_ * bpow(b, a_) * type_factor(v, 1.0);
}
double PaymentFunction::d_bb(double b, double v) const {
  return c_ * a_ * (a_ - 1.0) * bpow(b, a_ - 2.0) * type_factor(v, 0.0);
}
double PaymentFunction::d_bv(double b, double v) const {
  return -d_ * c_ * a_ * bpow(b, a_ - 1.0) * type_factor(v, 1.0);
}
double PaymentFunction::d_bbv(double b, double v) const {
  return -d_ * c_ * a_ * (a_ - 1.0) * bpow(b, a_ - 2.0) * type_factor(v, 1.0);
}

double PaymentFunction::effort_for_cost(double cost, double v) const {
  if (!(cost > 0.0)) return 0.0;
  if (!(c_ > 0.0) || !(a_ > 0.0)) throw DomainError("effort_for_cost: payment is not increasing in b");
  return std::pow(cost / (c_ * type_factor(v, 0.0)), 1.0 / a_);
}

std::string PaymentFunction::describe() const {
  std::ostringstream out;
  out << c_ << " * b^" << a_;
  if (d_ != 0.0) out << " * v^" << -d_;
  return out.str();
}

ValueScale::ValueScale(double gamma) : gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("ValueScale: gamma must be > 0");
  }
}

double ValueScale::operator()(double v) const { return v <= 0.0 ? 0.0 : std::pow(v, gamma_); }

double ValueScale::derivative(double v) const {
  if (v <= 0.0) return gamma_ == 1.0 ? 1.0 : (gamma_ > 1.0 ? 0.0 : HUGE_VAL);
  return gamma_ * std::pow(v, gamma_ - 1.0);
}

PaymentFunction normalize_payment(const PaymentFunction& p, const ValueScale& h) {
  return PaymentFunction(p.c(), p.a(), p.d() + h.gamma());
}

bool PaymentReport::ok() const {
  return std::all_of(assumptions.begin(), assumptions.end(), [](auto& a) { return a.passed; }) &&
         std::all_of(derivatives.begin(), derivatives.end(), [](auto& d) { return d.passed; });
}

std::string PaymentReport::summary() const {
  std::ostringstream out;
  for (const auto& a : assumptions) {
    out << (a.passed ? "ok   " : "FAIL ") << a.name;
    if (!a.passed) out << " (worst " << a.worst_value << " at b=" << a.worst_b << ", v=" << a.worst_v << ")";
    out << '\n';
  }
  for (const auto& d : derivatives) {
    out << (d.passed ? "ok   " : "FAIL ") << d.name << " vs finite difference, max rel err "
        << d.max_rel_error << '\n';
  }
  return out.str();
}

PaymentReport validate_payment(const PaymentFunction& p, std::span<const double> b_grid,
                               std::span<const double> v_grid) {
  using Fn = std::function<double(double, double)>;
  PaymentReport report;

  // Sign assumptions: violation measured as how far the value is on the wrong side.
  struct Sign {
    const char* name;
    Fn f;
    int sense;  // +1: must be > 0, -1: must be <= 0
  };
  const Sign signs[] = {
      {"p'_b > 0", [&](double b, double v) { return p.d_b(b, v); }, +1},
      {"p'_v <= 0", [&](double b, double v) { return p.d_v(b, v); }, -1},
      {"p''_bb > 0", [&](double b, double v) { return p.d_bb(b, v); }, +1},
      {"p'''_bbv <= 0", [&](double b, double v) { return p.d_bbv(b, v); }, -1},
  };

  AssumptionCheck zero{"p(0, v) = 0"};
  for (double v : v_grid) {
    const double val = p(0.0, v);
    if (std::abs(val) > std::abs(zero.worst_value) || (val != 0.0 && zero.passed)) {
      zero.worst_value = val;
      zero.worst_v = v;
    }
    if (val != 0.0) zero.passed = false;
  }
  report.assumptions.push_back(zero);

  for (const auto& s : signs) {
    AssumptionCheck check{s.name};
    double worst_margin = HUGE_VAL;
    for (double b : b_grid) {
      for (double v : v_grid) {
        const double val = s.f(b, v);
        const bool ok = s.sense > 0 ? val > 0.0 : val <= 0.0;
        const double margin = s.sense > 0 ? val : -val;
        if (!ok && check.passed) worst_margin = HUGE_VAL;
        if (!ok) check.passed = false;
        if ((!ok || check.passed) && margin < worst_margin) {
          worst_margin = margin;
          check.worst_value = val;
          check.worst_b = b;
          check.worst_v = v;
        }
      }
    }
    report.assumptions.push_back(check);
  }

  // Central finite differences of the next-lower analytic quantity.
  struct Partial {
    const char* name;
    Fn analytic;
    Fn base;
    bool in_b;
  };
  const Partial partials[] = {
      {"p'_b", [&](double b, double v) { return p.d_b(b, v); },
       [&](double b, double v) { return p(b, v); }, true},
      {"p'_v", [&](double b, double v) { return p.d_v(b, v); },
       [&](double b, double v) { return p(b, v); }, false},
      {"p''_bb", [&](double b, double v) { return p.d_bb(b, v); },
       [&](double b, double v) { return p.d_b(b, v); }, true},
      {"p''_bv", [&](double b, double v) { return p.d_bv(b, v); },
       [&](double b, double v) { return p.d_b(b, v); }, false},
      {"p'''_bbv", [&](double b, double v) { return p.d_bbv(b, v); },
       [&](double b, double v) { return p.d_bb(b, v); }, false},
  };
  for (const auto& part : partials) {
    DerivativeCheck check{part.name};
    for (double b : b_grid) {
      for (double v : v_grid) {
        const double x = part.in_b ? b : v;
        const double h = 1e-5 * std::max(std::abs(x), 1e-3);
        if (!part.in_b && v - h <= 0.0 && p.d() != 0.0) continue;
        double fd;
        if (part.in_b) {
          fd = (part.base(b + h, v) - part.base(b - h, v)) / (2 * h);
        } else {
          fd = (part.base(b, v + h) - part.base(b, v - h)) / (2 * h);
        }
        const double exact = part.analytic(b, v);
        // Scale by the neighbouring magnitudes so that an identically zero
        // partial compares against rounding noise rather than zero.
        const double scale =
            std::max({std::abs(exact), std::abs(fd), std::abs(part.base(b, v)) / std::max(std::abs(x), 1e-3)});
        const double err = scale > 0.0 ? std::abs(exact - fd) / scale : 0.0;
        check.max_rel_error = std::max(check.max_rel_error, err);
      }
    }
    check.passed = check.max_rel_error <= 1e-5;
    report.derivatives.push_back(check);
  }
  return report;
}

PaymentReport validate_payment(const PaymentFunction& p, double b_max, double v_lo, double v_hi) {
  std::vector<double> bs, vs;
  for (int i = 1; i <= 40; ++i) bs.push_back(b_max * i / 40.0);
  for (int i = 1; i <= 40; ++i) vs.push_back(v_lo + (v_hi - v_lo) * i / 40.0);
  return validate_payment(p, bs, vs);
}

}  // namespace allpay
