#pragma once

#include <string>
#include <vector>

#include "allpay/numerics.hpp"

namespace allpay {

/// Type distribution on a common support [lo, hi] with an optional
/// probability atom at the lower end point:
///   F(v) = w + (1 - w) G((v - lo) / (hi - lo))   for v >= lo,
/// where G is a continuous c.d.f. on [0, 1] from one of the catalog families.
class TypeDistribution {
 public:
  enum class Family { Uniform, Power, PiecewisePolynomial };

  static TypeDistribution uniform(numerics::Interval support = {0.0, 1.0});
  /// Mixture atom*delta(lo) + (1 - atom)*uniform.
  static TypeDistribution atom_uniform(double atom, numerics::Interval support = {0.0, 1.0});
  /// G(t) = t^alpha, alpha > 0.
  static TypeDistribution power(double alpha, numerics::Interval support = {0.0, 1.0});
  /// G(t) = sum_j coefficients[p][j] * t^j on [breakpoints[p], breakpoints[p+1]],
  /// with breakpoints spanning [0, 1].
  static TypeDistribution piecewise_polynomial(std::vector<double> breakpoints,
                                               std::vector<std::vector<double>> coefficients,
                                               numerics::Interval support = {0.0, 1.0});

  /// Returns a copy with the lower-end atom set to w in [0, 1).
  TypeDistribution with_atom(double w) const;

  /// Right-continuous c.d.f.; 0 below the support, 1 above.
  double cdf(double v) const;
  /// Density of the continuous part; 0 outside the open support.
  double density(double v) const;
  /// (1 - F(v)) / f(v) for v in (lo, hi]; 0 at hi. Throws DomainError for v <= lo.
  double hazard_complement(double v) const;
  /// Inverse c.d.f. for u in [0, 1); u < atom maps to the lower end point.
  double quantile(double u) const;

  double atom() const { return atom_; }
  const numerics::Interval& support() const { return support_; }
  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<std::vector<double>>& coefficients() const { return coefficients_; }
  std::string describe() const;
  bool operator==(const TypeDistribution&) const = default;

  /// Checks the catalog invariants, including unit total mass by quadrature.
  void validate() const;

 private:
  TypeDistribution(Family family, numerics::Interval support);

  double unit_cdf(double t) const;
  double unit_density(double t) const;
  double unit_quantile(double u) const;
  double to_unit(double v) const { return (v - support_.lo()) / support_.width(); }

  Family family_;
  numerics::Interval support_;
  double atom_ = 0.0;
  double alpha_ = 1.0;
  std::vector<double> breakpoints_;
  std::vector<std::vector<double>> coefficients_;
};

}  // namespace allpay
