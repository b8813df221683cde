#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "abram/errors.hpp"
#include "abram/geometry.hpp"
#include "abram/potential.hpp"
#include "abram/rng.hpp"
#include "abram/vec.hpp"

namespace abram {

// What defines an adversarial density pi^{gamma,eps}( . | theta) up to the
// parameter it is conditioned on: density(xi) ~ exp(gamma * Phi(xi, theta))
// restricted to the ball.
struct DensitySpec {
  std::shared_ptr<const Potential> potential;
  double gamma = 1.0;  // inverse temperature, >= 0
  Ball ball;
  int grid_nodes = 4001;
};

namespace detail {

// Composite Simpson weights for n (odd, >= 3) equispaced nodes.
inline std::vector<double> simpson_weights(int n, double step) {
  std::vector<double> w(n, 0.0);
  const double c = step / 3.0;
  w[0] = c;
  w[n - 1] = c;
  for (int i = 1; i < n - 1; ++i) w[i] = (i % 2 == 1) ? 4.0 * c : 2.0 * c;
  return w;
}

inline int make_odd(int n) { return (n % 2 == 0) ? n + 1 : n; }

}  // namespace detail

// Deterministic quadrature representation of the 1-D adversarial density for
// a fixed theta. The normalising constant is computed by composite Simpson
// with a log-sum-exp shift so that gamma * Phi in the hundreds does not
// overflow.
class AdversarialDensity {
 public:
  AdversarialDensity(DensitySpec spec, Vec theta)
      : spec_(std::move(spec)), theta_(std::move(theta)) {
    if (!spec_.potential) throw invalid_input("AdversarialDensity: null potential");
    if (spec_.potential->xi_dim() != 1)
      throw invalid_input("AdversarialDensity: potential must be 1-D in xi");
    if (spec_.ball.dim != 1) throw invalid_input("AdversarialDensity: ball must be 1-D");
    if (spec_.gamma < 0.0) throw invalid_input("AdversarialDensity: gamma must be >= 0");
    if (spec_.grid_nodes < 3) throw invalid_input("AdversarialDensity: grid too small");
    build();
  }

  const DensitySpec& spec() const { return spec_; }
  const Vec& theta() const { return theta_; }
  const std::vector<double>& grid() const { return xs_; }

  // Normalised density value; zero outside the ball.
  double density(double at) const {
    if (std::abs(at) > spec_.ball.radius) return 0.0;
    const double x[1] = {at};
    return std::exp(spec_.gamma * spec_.potential->value(x, theta_) - shift_) / z_;
  }

  // Simpson integral of density() over the ball on a fresh grid; equals 1 up
  // to quadrature error. Used as a self-consistency check.
  double integral(int nodes = 0) const {
    const int n = detail::make_odd(nodes > 0 ? nodes : spec_.grid_nodes);
    const double eps = spec_.ball.radius;
    const double step = 2.0 * eps / (n - 1);
    const std::vector<double> sw = detail::simpson_weights(n, step);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += sw[i] * density(-eps + step * i);
    return s;
  }

  // F(theta) = integral of Phi against the density.
  double f_value() const {
    double s = 0.0;
    for (int i = 0; i < nodes(); ++i) s += sw_[i] * w_[i] * phi_[i];
    return s / z_;
  }

  // grad F = E[grad_theta Phi] + gamma * Cov(Phi, grad_theta Phi).
  Vec f_gradient() const {
    const int td = spec_.potential->theta_dim();
    Vec mean_grad(td, 0.0), mean_phigrad(td, 0.0), g(td);
    double x[1];
    for (int i = 0; i < nodes(); ++i) {
      x[0] = xs_[i];
      spec_.potential->grad_theta(x, theta_, g);
      const double c = sw_[i] * w_[i] / z_;
      for (int k = 0; k < td; ++k) {
        mean_grad[k] += c * g[k];
        mean_phigrad[k] += c * phi_[i] * g[k];
      }
    }
    const double mean_phi = f_value();
    Vec out(td);
    for (int k = 0; k < td; ++k)
      out[k] = mean_grad[k] + spec_.gamma * (mean_phigrad[k] - mean_phi * mean_grad[k]);
    return out;
  }

  double mean() const {
    double s = 0.0;
    for (int i = 0; i < nodes(); ++i) s += sw_[i] * w_[i] * xs_[i];
    return s / z_;
  }

  // Grid argmax of the density.
  double mode() const {
    int best = 0;
    for (int i = 1; i < nodes(); ++i)
      if (w_[i] > w_[best]) best = i;
    return xs_[best];
  }

  double cdf(double x) const {
    const double eps = spec_.ball.radius;
    if (x <= -eps) return 0.0;
    if (x >= eps) return 1.0;
    const double pos = (x + eps) / step_;
    const int i = std::min(static_cast<int>(pos), nodes() - 2);
    const double frac = pos - i;
    return cdf_[i] + frac * (cdf_[i + 1] - cdf_[i]);
  }

  double mass_within(double lo, double hi) const { return cdf(hi) - cdf(lo); }

  double quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.begin()) return xs_.front();
    if (it == cdf_.end()) return xs_.back();
    const int i = static_cast<int>(it - cdf_.begin());
    const double c0 = cdf_[i - 1], c1 = cdf_[i];
    const double frac = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
    return xs_[i - 1] + frac * step_;
  }

  double sample(RngStream& rng) const { return quantile(rng.uniform01()); }

 private:
  int nodes() const { return static_cast<int>(xs_.size()); }

  void build() {
    const int n = detail::make_odd(spec_.grid_nodes);
    const double eps = spec_.ball.radius;
    step_ = 2.0 * eps / (n - 1);
    xs_.resize(n);
    phi_.resize(n);
    w_.resize(n);
    sw_ = detail::simpson_weights(n, step_);
    double x[1];
    double max_logw = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      xs_[i] = -eps + step_ * i;
      x[0] = xs_[i];
      phi_[i] = spec_.potential->value(x, theta_);
      max_logw = std::max(max_logw, spec_.gamma * phi_[i]);
    }
    if (!std::isfinite(max_logw))
      throw invalid_input("AdversarialDensity: potential non-finite on the grid");
    shift_ = max_logw;
    z_ = 0.0;
    for (int i = 0; i < n; ++i) {
      w_[i] = std::exp(spec_.gamma * phi_[i] - shift_);
      z_ += sw_[i] * w_[i];
    }
    // Trapezoid CDF on the same grid, renormalised to end exactly at 1.
    cdf_.assign(n, 0.0);
    for (int i = 1; i < n; ++i) cdf_[i] = cdf_[i - 1] + 0.5 * step_ * (w_[i - 1] + w_[i]);
    const double total = cdf_.back();
    for (double& c : cdf_) c /= total;
  }

  DensitySpec spec_;
  Vec theta_;
  double step_ = 0.0;
  double shift_ = 0.0;
  double z_ = 0.0;
  std::vector<double> xs_, phi_, w_, sw_, cdf_;
};

inline double oracle_f(const DensitySpec& spec, Vec theta) {
  return AdversarialDensity(spec, std::move(theta)).f_value();
}
inline Vec oracle_grad_f(const DensitySpec& spec, Vec theta) {
  return AdversarialDensity(spec, std::move(theta)).f_gradient();
}
inline double oracle_mean(const DensitySpec& spec, Vec theta) {
  return AdversarialDensity(spec, std::move(theta)).mean();
}

// Uniformly weighted point set on the ball; the muhat^N of the particle
// system and the sample clouds of the attacks.
struct EmpiricalMeasure {
  std::vector<Vec> points;

  EmpiricalMeasure() = default;
  explicit EmpiricalMeasure(std::vector<Vec> pts) : points(std::move(pts)) {}

  static EmpiricalMeasure from_scalars(std::span<const double> xs) {
    EmpiricalMeasure m;
    m.points.reserve(xs.size());
    for (double x : xs) m.points.push_back(Vec{x});
    return m;
  }

  std::size_t size() const { return points.size(); }
  int dim() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }

  std::vector<double> scalars() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const Vec& p : points) {
      if (p.size() != 1) throw invalid_input("EmpiricalMeasure: not 1-D");
      out.push_back(p[0]);
    }
    return out;
  }

  bool in_ball(const Ball& ball, double tol = 1e-9) const {
    for (const Vec& p : points)
      if (ball.norm(p) > ball.radius + tol) return false;
    return true;
  }
};

// Exact squared Wasserstein-2 between two 1-D empirical measures with
// uniform weights (sizes may differ): integral of the squared quantile gap,
// evaluated piecewise on the merged quantile breakpoints.
inline double wasserstein2_sq_1d(std::span<const double> a_in, std::span<const double> b_in) {
  if (a_in.empty() || b_in.empty())
    throw invalid_input("wasserstein2_1d: empty measure");
  std::vector<double> a(a_in.begin(), a_in.end());
  std::vector<double> b(b_in.begin(), b_in.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  std::size_t ia = 0, ib = 0;
  double u = 0.0, total = 0.0;
  while (ia < n && ib < m) {
    const double ua = static_cast<double>(ia + 1) / static_cast<double>(n);
    const double ub = static_cast<double>(ib + 1) / static_cast<double>(m);
    // Exact comparison of (ia+1)/n vs (ib+1)/m via cross-multiplication.
    const unsigned long long lhs = static_cast<unsigned long long>(ia + 1) * m;
    const unsigned long long rhs = static_cast<unsigned long long>(ib + 1) * n;
    const double u_next = (lhs <= rhs) ? ua : ub;
    const double gap = a[ia] - b[ib];
    total += (u_next - u) * gap * gap;
    if (lhs <= rhs) ++ia;
    if (rhs <= lhs) ++ib;
    u = u_next;
  }
  return total;
}

inline double wasserstein2_1d(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
  return std::sqrt(wasserstein2_sq_1d(a.scalars(), b.scalars()));
}

// Empirical-vs-density variant: mean squared gap between the sorted samples
// and the density quantiles at midpoint ranks.
inline double wasserstein2_sq_1d(std::span<const double> samples,
                                 const AdversarialDensity& target) {
  if (samples.empty()) throw invalid_input("wasserstein2_1d: empty measure");
  std::vector<double> a(samples.begin(), samples.end());
  std::sort(a.begin(), a.end());
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double u = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    const double gap = a[k] - target.quantile(u);
    total += gap * gap;
  }
  return total / static_cast<double>(n);
}

inline double wasserstein2_1d(const EmpiricalMeasure& a, const AdversarialDensity& b) {
  const std::vector<double> xs = a.scalars();
  return std::sqrt(wasserstein2_sq_1d(std::span<const double>(xs), b));
}

// Normalised bin masses on [lo, hi]; the common-grid representation used for
// total-variation comparisons.
struct Histogram1d {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<double> mass;
};

inline int default_bin_count(std::size_t pooled_samples) {
  const int b = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(pooled_samples))));
  return std::clamp(b, 1, 200);
}

inline Histogram1d histogram_from_samples(std::span<const double> xs, double lo, double hi,
                                          int bins) {
  if (xs.empty()) throw invalid_input("histogram_from_samples: no samples");
  if (!(hi > lo) || bins < 1) throw invalid_input("histogram_from_samples: bad range");
  Histogram1d h{lo, hi, std::vector<double>(bins, 0.0)};
  const double width = (hi - lo) / bins;
  for (double x : xs) {
    int b = static_cast<int>((x - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    h.mass[b] += 1.0;
  }
  for (double& m : h.mass) m /= static_cast<double>(xs.size());
  return h;
}

inline Histogram1d histogram_from_density(const AdversarialDensity& d, double lo, double hi,
                                          int bins) {
  if (!(hi > lo) || bins < 1) throw invalid_input("histogram_from_density: bad range");
  Histogram1d h{lo, hi, std::vector<double>(bins, 0.0)};
  const double width = (hi - lo) / bins;
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    h.mass[b] = d.mass_within(lo + b * width, lo + (b + 1) * width);
    total += h.mass[b];
  }
  if (total <= 0.0) throw invalid_input("histogram_from_density: no mass in range");
  for (double& m : h.mass) m /= total;
  return h;
}

// Half L1 distance of bin masses. Requires identical binning.
inline double tv_distance_1d(const Histogram1d& a, const Histogram1d& b) {
  if (a.mass.size() != b.mass.size() || a.lo != b.lo || a.hi != b.hi)
    throw invalid_input("tv_distance_1d: bin mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.mass.size(); ++i) s += std::abs(a.mass[i] - b.mass[i]);
  return 0.5 * s;
}

// Tensor-product quadrature oracle in two dimensions: Simpson x Simpson on
// the LInf box, Simpson (radius) x uniform trapezoid (angle) on the L2 disc.
// Nodes per axis defaults to 401.
class Density2d {
 public:
  Density2d(DensitySpec spec, Vec theta, int nodes_per_axis = 401)
      : spec_(std::move(spec)), theta_(std::move(theta)) {
    if (!spec_.potential) throw invalid_input("Density2d: null potential");
    if (spec_.potential->xi_dim() != 2) throw invalid_input("Density2d: potential must be 2-D");
    if (spec_.ball.dim != 2) throw invalid_input("Density2d: ball must be 2-D");
    if (nodes_per_axis < 3) throw invalid_input("Density2d: grid too small");
    build(detail::make_odd(nodes_per_axis));
  }

  double density(double x, double y) const {
    const double p[2] = {x, y};
    if (!spec_.ball.contains(p)) return 0.0;
    return std::exp(spec_.gamma * spec_.potential->value(p, theta_) - shift_) / z_;
  }

  double f_value() const {
    double s = 0.0;
    for (std::size_t i = 0; i < qw_.size(); ++i) s += qw_[i] * w_[i] * phi_[i];
    return s / z_;
  }

  Vec f_gradient() const {
    const int td = spec_.potential->theta_dim();
    Vec mean_grad(td, 0.0), mean_phigrad(td, 0.0), g(td);
    for (std::size_t i = 0; i < qw_.size(); ++i) {
      const double p[2] = {px_[i], py_[i]};
      spec_.potential->grad_theta(p, theta_, g);
      const double c = qw_[i] * w_[i] / z_;
      for (int k = 0; k < td; ++k) {
        mean_grad[k] += c * g[k];
        mean_phigrad[k] += c * phi_[i] * g[k];
      }
    }
    const double mean_phi = f_value();
    Vec out(td);
    for (int k = 0; k < td; ++k)
      out[k] = mean_grad[k] + spec_.gamma * (mean_phigrad[k] - mean_phi * mean_grad[k]);
    return out;
  }

  Vec mean() const {
    Vec out(2, 0.0);
    for (std::size_t i = 0; i < qw_.size(); ++i) {
      const double c = qw_[i] * w_[i] / z_;
      out[0] += c * px_[i];
      out[1] += c * py_[i];
    }
    return out;
  }

  // Total mass of the normalised density (1 up to quadrature error).
  double integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i < qw_.size(); ++i) s += qw_[i] * w_[i];
    return s / z_;
  }

 private:
  void build(int n) {
    const double eps = spec_.ball.radius;
    if (spec_.ball.norm_kind == NormKind::LInf) {
      const double step = 2.0 * eps / (n - 1);
      const std::vector<double> sw = detail::simpson_weights(n, step);
      px_.reserve(static_cast<std::size_t>(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          px_.push_back(-eps + step * i);
          py_.push_back(-eps + step * j);
          qw_.push_back(sw[i] * sw[j]);
        }
    } else {
      // Polar grid: integrand r * f(r cos a, r sin a) is smooth, so the
      // ball indicator never enters the quadrature.
      const int nr = n;
      const int na = n;
      const double rstep = eps / (nr - 1);
      const std::vector<double> sw = detail::simpson_weights(nr, rstep);
      const double astep = 2.0 * std::numbers::pi / na;
      for (int i = 0; i < nr; ++i) {
        const double r = rstep * i;
        for (int j = 0; j < na; ++j) {
          const double a = astep * j;
          px_.push_back(r * std::cos(a));
          py_.push_back(r * std::sin(a));
          qw_.push_back(sw[i] * astep * r);
        }
      }
    }
    const std::size_t q = qw_.size();
    phi_.resize(q);
    w_.resize(q);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q; ++i) {
      const double p[2] = {px_[i], py_[i]};
      phi_[i] = spec_.potential->value(p, theta_);
      max_logw = std::max(max_logw, spec_.gamma * phi_[i]);
    }
    shift_ = max_logw;
    z_ = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
      w_[i] = std::exp(spec_.gamma * phi_[i] - shift_);
      z_ += qw_[i] * w_[i];
    }
  }

  DensitySpec spec_;
  Vec theta_;
  double shift_ = 0.0;
  double z_ = 0.0;
  std::vector<double> px_, py_, qw_, phi_, w_;
};

}  // namespace abram
