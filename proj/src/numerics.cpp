#include "allpay/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace allpay::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo, hi, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gauss_kronrod(const ScalarFn& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  const double value = kronrod * half;
  double error = std::abs((kronrod - gauss) * half);
  // Rounding floor: the estimate cannot be resolved below a few ulps of the sum.
  error = std::max(error, 50.0 * kEps * std::abs(value));
  if (!std::isfinite(value)) error = std::numeric_limits<double>::infinity();
  return {lo, hi, value, error};
}

}  // namespace

void Tolerance::validate() const {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("Tolerance: abs_tol must be > 0");
  if (!(rel_tol >= 0.0)) throw std::invalid_argument("Tolerance: rel_tol must be >= 0");
  if (max_iter < 1) throw std::invalid_argument("Tolerance: max_iter must be >= 1");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream msg;
    msg << "Interval: need finite lo < hi, got [" << lo << ", " << hi << "]";
    throw std::invalid_argument(msg.str());
  }
}

double integrate(const ScalarFn& f, const Interval& domain, const Tolerance& tol) {
  tol.validate();
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, domain.lo(), domain.hi());
  double total = first.value;
  double total_err = first.error;
  heap.push(first);

  for (int iter = 0;; ++iter) {
    if (std::isfinite(total) && total_err <= std::max(tol.abs_tol, tol.rel_tol * std::abs(total))) {
      return total;
    }
    if (iter >= tol.max_iter) break;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      // Interval can no longer be split in floating point.
      heap.push(worst);
      break;
    }
    Segment left = gauss_kronrod(f, worst.lo, mid);
    Segment right = gauss_kronrod(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Recompute from scratch to avoid drift in the running sums.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  std::ostringstream msg;
  msg << "integrate: no convergence on [" << domain.lo() << ", " << domain.hi()
      << "], estimate " << total << " +/- " << total_err;
  throw IntegrationError(msg.str(), total, total_err);
}

double integrate_piecewise(const ScalarFn& f, std::span<const double> nodes,
                           const Tolerance& tol) {
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    if (nodes[k + 1] > nodes[k]) sum += integrate(f, Interval(nodes[k], nodes[k + 1]), tol);
  }
  return sum;
}

double find_root(const ScalarFn& g, const Interval& bracket, const Tolerance& tol) {
  return find_root(g, bracket, g(bracket.lo()), g(bracket.hi()), tol);
}

double find_root(const ScalarFn& g, const Interval& bracket, double g_lo, double g_hi,
                 const Tolerance& tol) {
  tol.validate();
  double a = bracket.lo(), b = bracket.hi();
  double fa = g_lo, fb = g_hi;
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (!std::isfinite(fa) || !std::isfinite(fb) || std::signbit(fa) == std::signbit(fb)) {
    std::ostringstream msg;
    msg << "find_root: no sign change on [" << a << ", " << b << "] (g = " << fa << ", " << fb
        << ")";
    throw BracketError(msg.str());
  }

  // Brent (1973), as in Numerical Recipes zbrent.
  double c = b, fc = fb, d = b - a, e = d;
  for (int iter = 0; iter < tol.max_iter; ++iter) {
    if (std::signbit(fb) == std::signbit(fc)) {
      c = a;
      fc = fa;
      e = d = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol.abs_tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      const double min1 = 3.0 * xm * q - std::abs(tol1 * q);
      const double min2 = std::abs(e * q);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol1 ? d : std::copysign(tol1, xm);
    b = std::clamp(b, bracket.lo(), bracket.hi());
    fb = g(b);
  }
  return b;
}

OdeTable solve_ode_backward(const std::function<double(double, double)>& rhs, double v_end,
                            double k_end, double v_start, int steps) {
  if (steps < 1) throw std::invalid_argument("solve_ode_backward: steps must be >= 1");
  if (!(v_start < v_end)) throw std::invalid_argument("solve_ode_backward: need v_start < v_end");

  const double h = (v_end - v_start) / steps;
  auto eval = [&](double v, double k) {
    const double r = rhs(v, k);
    if (!std::isfinite(r) || !std::isfinite(k)) {
      std::ostringstream msg;
      msg << "solve_ode_backward: non-finite right-hand side at v = " << v;
      throw OdeError(msg.str(), v);
    }
    return r;
  };

  OdeTable out;
  out.v.resize(steps + 1);
  out.k.resize(steps + 1);
  out.slope.resize(steps + 1);

  double k = k_end;
  double slope = eval(v_end, k);
  out.v[steps] = v_end;
  out.k[steps] = k;
  out.slope[steps] = slope;
  for (int i = steps; i > 0; --i) {
    const double v = v_end - (steps - i) * h;
    const double v_next = (i == 1) ? v_start : v_end - (steps - i + 1) * h;
    const double step = v_next - v;  // negative
    const double k1 = slope;
    const double k2 = eval(v + 0.5 * step, k + 0.5 * step * k1);
    const double k3 = eval(v + 0.5 * step, k + 0.5 * step * k2);
    const double k4 = eval(v_next, k + step * k3);
    k += step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    slope = eval(v_next, k);
    out.v[i - 1] = v_next;
    out.k[i - 1] = k;
    out.slope[i - 1] = slope;
  }
  return out;
}

InverseResult monotone_inverse(const ScalarFn& fn, double y, const Interval& domain,
                               const Tolerance& tol) {
  const double f_lo = fn(domain.lo());
  const double f_hi = fn(domain.hi());
  if (!(f_lo <= f_hi)) throw InvariantError("monotone_inverse: function is not increasing");
  if (y <= f_lo) return {domain.lo(), y < f_lo};
  if (y >= f_hi) return {domain.hi(), y > f_hi};
  const double x = find_root([&](double t) { return fn(t) - y; }, domain, f_lo - y, f_hi - y, tol);
  return {x, false};
}

// ---------------------------------------------------------------------------

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

namespace {

std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    delta[k] = (y[k + 1] - y[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      d[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(s) != std::signbit(d0)) {
      s = 0.0;
    } else if (std::signbit(d0) != std::signbit(d1) && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  init({});
}

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y,
                             std::vector<double> slopes)
    : x_(std::move(x)), y_(std::move(y)) {
  if (slopes.size() != x_.size()) throw std::invalid_argument("MonotoneCubic: slope count");
  init(std::move(slopes));
}

void MonotoneCubic::init(std::vector<double> slopes) {
  if (x_.size() != y_.size() || x_.size() < 2) {
    throw std::invalid_argument("MonotoneCubic: need at least two (x, y) pairs");
  }
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    if (!(x_[k] < x_[k + 1])) throw std::invalid_argument("MonotoneCubic: x must increase");
  }
  for (double v : y_) {
    if (!std::isfinite(v)) throw std::invalid_argument("MonotoneCubic: non-finite y");
  }
  increasing_ = true;
  for (std::size_t k = 0; k + 1 < y_.size(); ++k) {
    if (!(y_[k] < y_[k + 1])) {
      increasing_ = false;
      break;
    }
  }

  const std::vector<double> pchip = pchip_slopes(x_, y_);
  if (slopes.empty()) {
    d_ = pchip;
    return;
  }
  d_ = std::move(slopes);
  for (std::size_t k = 0; k < d_.size(); ++k) {
    if (!std::isfinite(d_[k])) d_[k] = pchip[k];
  }
  // Fritsch-Carlson limiter on the supplied slopes.
  for (std::size_t k = 0; k + 1 < x_.size(); ++k) {
    const double delta = (y_[k + 1] - y_[k]) / (x_[k + 1] - x_[k]);
    if (delta == 0.0) {
      d_[k] = d_[k + 1] = 0.0;
      continue;
    }
    double alpha = d_[k] / delta;
    double beta = d_[k + 1] / delta;
    if (alpha < 0.0) d_[k] = alpha = 0.0;
    if (beta < 0.0) d_[k + 1] = beta = 0.0;
    const double r2 = alpha * alpha + beta * beta;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      d_[k] = tau * alpha * delta;
      d_[k + 1] = tau * beta * delta;
    }
  }
}

std::size_t MonotoneCubic::segment(double x) const {
  if (x <= x_.front()) return 0;
  if (x >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double MonotoneCubic::eval_segment(std::size_t k, double x) const {
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  return eval_segment(segment(x), x);
}

double MonotoneCubic::derivative(double x) const {
  if (x < x_.front() || x > x_.back()) return 0.0;
  const std::size_t k = segment(x);
  const double h = x_[k + 1] - x_[k];
  const double t = (x - x_[k]) / h;
  const double t2 = t * t;
  const double dy = (6 * t2 - 6 * t) * (y_[k] - y_[k + 1]) / h;
  return dy + (3 * t2 - 4 * t + 1) * d_[k] + (3 * t2 - 2 * t) * d_[k + 1];
}

InverseResult MonotoneCubic::inverse(double y, const Tolerance& tol) const {
  if (!increasing_) throw InvariantError("MonotoneCubic::inverse: table is not strictly increasing");
  if (y <= y_.front()) return {x_.front(), y < y_.front()};
  if (y >= y_.back()) return {x_.back(), y > y_.back()};
  const auto it = std::upper_bound(y_.begin(), y_.end(), y);
  const std::size_t k = static_cast<std::size_t>(it - y_.begin()) - 1;
  if (y == y_[k]) return {x_[k], false};
  const double x = find_root([&](double t) { return eval_segment(k, t) - y; },
                             Interval(x_[k], x_[k + 1]), y_[k] - y, y_[k + 1] - y, tol);
  return {x, false};
}

}  // namespace allpay::numerics
