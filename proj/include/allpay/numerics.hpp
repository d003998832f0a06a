#pragma once

// Scalar numerical kernels shared by the solvers: adaptive quadrature,
// bracketed root finding, fixed-step backward RK4 and monotone inversion.
// Every function here is pure and reentrant.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "allpay/errors.hpp"

namespace allpay::numerics {

using ScalarFn = std::function<double(double)>;

struct Tolerance {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_iter = 2000;

  /// Throws std::invalid_argument unless abs_tol > 0, rel_tol >= 0, max_iter >= 1.
  void validate() const;
};

class Interval {
 public:
  /// Requires finite lo < hi.
  Interval(double lo, double hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }
  bool contains(double x) const { return x >= lo_ && x <= hi_; }
  bool operator==(const Interval&) const = default;

 private:
  double lo_;
  double hi_;
};

class IntegrationError : public SolverError {
 public:
  IntegrationError(const std::string& what, double last_estimate, double last_error)
      : SolverError(what), last_estimate_(last_estimate), last_error_(last_error) {}

  double last_estimate() const { return last_estimate_; }
  double last_error() const { return last_error_; }

 private:
  double last_estimate_;
  double last_error_;
};

class BracketError : public SolverError {
 public:
  using SolverError::SolverError;
};

class OdeError : public SolverError {
 public:
  OdeError(const std::string& what, double at) : SolverError(what), at_(at) {}
  /// Abscissa at which the right-hand side stopped being finite.
  double at() const { return at_; }

 private:
  double at_;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature. The rule is open, so
/// integrable endpoint singularities are never evaluated. Converges when the
/// summed error estimate is below max(abs_tol, rel_tol*|I|); max_iter bounds
/// the number of bisections. Throws IntegrationError otherwise.
double integrate(const ScalarFn& f, const Interval& domain, const Tolerance& tol = {});

/// Sum of integrate() over consecutive sub-intervals [nodes[k], nodes[k+1]].
/// Useful when the integrand is only piecewise smooth between known nodes.
double integrate_piecewise(const ScalarFn& f, std::span<const double> nodes,
                           const Tolerance& tol = {});

/// Brent's method (inverse quadratic / secant steps guarded by bisection).
/// Requires g(lo)*g(hi) <= 0, throws BracketError otherwise. The returned point
/// always lies inside the bracket.
double find_root(const ScalarFn& g, const Interval& bracket, const Tolerance& tol = {});

/// Same as find_root, with the end-point values already known.
double find_root(const ScalarFn& g, const Interval& bracket, double g_lo, double g_hi,
                 const Tolerance& tol);

struct OdeTable {
  std::vector<double> v;      // ascending
  std::vector<double> k;      // solution values
  std::vector<double> slope;  // rhs(v, k) at each node
};

/// Classical RK4 with `steps` equal steps from v_end down to v_start, starting
/// from k(v_end) = k_end. The output is sorted by ascending v and contains the
/// boundary point exactly. Throws OdeError if rhs is not finite at any stage.
OdeTable solve_ode_backward(const std::function<double(double, double)>& rhs, double v_end,
                            double k_end, double v_start, int steps);

struct InverseResult {
  double x;
  bool clamped;  // y was outside the range of the function on the domain
};

/// Solves fn(x) = y for a strictly increasing fn on `domain`. Targets below the
/// range return domain.lo, above return domain.hi, both flagged as clamped.
InverseResult monotone_inverse(const ScalarFn& fn, double y, const Interval& domain,
                               const Tolerance& tol = {});

/// Piecewise cubic Hermite interpolant through (x, y). Slopes come either from
/// the Fritsch-Carlson (PCHIP) rule or are supplied by the caller; supplied
/// slopes are limited so that monotone data stays monotone.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);
  /// Non-finite entries of `slopes` are replaced by PCHIP estimates.
  MonotoneCubic(std::vector<double> x, std::vector<double> y, std::vector<double> slopes);

  double operator()(double x) const;
  double derivative(double x) const;

  /// Inverse of a strictly increasing table. Throws InvariantError if the
  /// tabulated values are not strictly increasing.
  InverseResult inverse(double y, const Tolerance& tol = {}) const;

  /// Index k of the segment [x_k, x_{k+1}] containing x (clamped to the table).
  std::size_t segment(double x) const;

  std::span<const double> xs() const { return x_; }
  std::span<const double> ys() const { return y_; }
  std::span<const double> slopes() const { return d_; }
  bool strictly_increasing() const { return increasing_; }
  bool empty() const { return x_.empty(); }

 private:
  void init(std::vector<double> slopes);
  double eval_segment(std::size_t k, double x) const;

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
  bool increasing_ = false;
};

/// n equally spaced points on [lo, hi] including both end points.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace allpay::numerics
