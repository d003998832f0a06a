#include "allpay/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace allpay {

using numerics::Interval;

namespace {

double poly(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double poly_derivative(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 1;) acc = acc * t + static_cast<double>(j) * c[j];
  return acc;
}

}  // namespace

TypeDistribution::TypeDistribution(Family family, Interval support)
    : family_(family), support_(support) {
  if (support.lo() < 0.0) throw ConfigError("TypeDistribution: support must be nonnegative");
}

TypeDistribution TypeDistribution::uniform(Interval support) {
  return TypeDistribution(Family::Uniform, support);
}

TypeDistribution TypeDistribution::atom_uniform(double atom, Interval support) {
  return uniform(support).with_atom(atom);
}

TypeDistribution TypeDistribution::power(double alpha, Interval support) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ConfigError("TypeDistribution::power: alpha must be > 0");
  }
  TypeDistribution d(Family::Power, support);
  d.alpha_ = alpha;
  return d;
}

TypeDistribution TypeDistribution::piecewise_polynomial(
    std::vector<double> breakpoints, std::vector<std::vector<double>> coefficients,
    Interval support) {
  if (breakpoints.size() < 2 || coefficients.size() + 1 != breakpoints.size()) {
    throw ConfigError("piecewise_polynomial: need one coefficient list per piece");
  }
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
    throw ConfigError("piecewise_polynomial: breakpoints must span [0, 1]");
  }
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k] < breakpoints[k + 1])) {
      throw ConfigError("piecewise_polynomial: breakpoints must increase");
    }
  }
  for (const auto& c : coefficients) {
    if (c.empty()) throw ConfigError("piecewise_polynomial: empty coefficient list");
  }
  TypeDistribution d(Family::PiecewisePolynomial, support);
  d.breakpoints_ = std::move(breakpoints);
  d.coefficients_ = std::move(coefficients);
  d.validate();
  return d;
}

TypeDistribution TypeDistribution::with_atom(double w) const {
  if (!(w >= 0.0 && w < 1.0)) throw ConfigError("TypeDistribution: atom must lie in [0, 1)");
  TypeDistribution d = *this;
  d.atom_ = w;
  return d;
}

double TypeDistribution::unit_cdf(double t) const {
  switch (family_) {
    case Family::Uniform:
      return t;
    case Family::Power:
      return std::pow(t, alpha_);
    case Family::PiecewisePolynomial: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
      std::size_t piece = static_cast<std::size_t>(it - breakpoints_.begin());
      piece = std::clamp<std::size_t>(piece, 1, coefficients_.size()) - 1;
      return poly(coefficients_[piece], t);
    }
  }
  return 0.0;
}

double TypeDistribution::unit_density(double t) const {
  switch (family_) {
    case Family::Uniform:
      return 1.0;
    case Family::Power:
      return alpha_ * std::pow(t, alpha_ - 1.0);
    case Family::PiecewisePolynomial: {
      const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
      std::size_t piece = static_cast<std::size_t>(it - breakpoints_.begin());
      piece = std::clamp<std::size_t>(piece, 1, coefficients_.size()) - 1;
      return poly_derivative(coefficients_[piece], t);
    }
  }
  return 0.0;
}

double TypeDistribution::unit_quantile(double u) const {
  switch (family_) {
    case Family::Uniform:
      return u;
    case Family::Power:
      return std::pow(u, 1.0 / alpha_);
    case Family::PiecewisePolynomial: {
      std::size_t piece = 0;
      while (piece + 1 < coefficients_.size() &&
             poly(coefficients_[piece], breakpoints_[piece + 1]) <= u) {
        ++piece;
      }
      const auto& c = coefficients_[piece];
      const Interval dom(breakpoints_[piece], breakpoints_[piece + 1]);
      return numerics::monotone_inverse([&](double t) { return poly(c, t); }, u, dom,
                                        {1e-15, 0.0, 200})
          .x;
    }
  }
  return 0.0;
}

double TypeDistribution::cdf(double v) const {
  if (v < support_.lo()) return 0.0;
  if (v >= support_.hi()) return 1.0;
  return atom_ + (1.0 - atom_) * unit_cdf(to_unit(v));
}

double TypeDistribution::density(double v) const {
  if (v <= support_.lo() || v > support_.hi()) return 0.0;
  return (1.0 - atom_) * unit_density(to_unit(v)) / support_.width();
}

double TypeDistribution::hazard_complement(double v) const {
  if (v <= support_.lo()) {
    std::ostringstream msg;
    msg << "hazard_complement: v = " << v << " is not above the lower support bound";
    throw DomainError(msg.str());
  }
  if (v >= support_.hi()) return 0.0;
  // (1 - F)/f = (1 - G(t)) * width / g(t); the atom cancels.
  const double t = to_unit(v);
  return (1.0 - unit_cdf(t)) * support_.width() / unit_density(t);
}

double TypeDistribution::quantile(double u) const {
  if (u < atom_) return support_.lo();
  const double r = std::clamp((u - atom_) / (1.0 - atom_), 0.0, 1.0);
  return support_.lo() + support_.width() * unit_quantile(r);
}

std::string TypeDistribution::describe() const {
  std::ostringstream out;
  switch (family_) {
    case Family::Uniform:
      out << "uniform";
      break;
    case Family::Power:
      out << "power(alpha=" << alpha_ << ")";
      break;
    case Family::PiecewisePolynomial:
      out << "piecewise_polynomial(" << coefficients_.size() << " pieces)";
      break;
  }
  if (atom_ > 0.0) out << " + atom " << atom_;
  out << " on [" << support_.lo() << ", " << support_.hi() << "]";
  return out.str();
}

void TypeDistribution::validate() const {
  if (family_ == Family::PiecewisePolynomial) {
    if (std::abs(unit_cdf(0.0)) > 1e-12) throw ConfigError("piecewise_polynomial: G(0) != 0");
    if (std::abs(poly(coefficients_.back(), 1.0) - 1.0) > 1e-12) {
      throw ConfigError("piecewise_polynomial: G(1) != 1");
    }
    for (std::size_t k = 1; k + 1 < breakpoints_.size(); ++k) {
      const double left = poly(coefficients_[k - 1], breakpoints_[k]);
      const double right = poly(coefficients_[k], breakpoints_[k]);
      if (std::abs(left - right) > 1e-12) {
        throw ConfigError("piecewise_polynomial: c.d.f. is discontinuous at a breakpoint");
      }
    }
    for (std::size_t p = 0; p < coefficients_.size(); ++p) {
      const double a = breakpoints_[p], b = breakpoints_[p + 1];
      for (int s = 1; s < 1000; ++s) {
        const double t = a + (b - a) * s / 1000.0;
        if (!(poly_derivative(coefficients_[p], t) > 0.0)) {
          throw ConfigError("piecewise_polynomial: density must be positive on the open support");
        }
      }
    }
  }
  const double mass =
      atom_ + numerics::integrate([this](double v) { return density(v); }, support_,
                                  {1e-13, 1e-13, 4000});
  if (std::abs(mass - 1.0) > 1e-9) {
    std::ostringstream msg;
    msg << "TypeDistribution: total mass " << mass << " differs from 1";
    throw ConfigError(msg.str());
  }
}

}  // namespace allpay
