#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "abram/errors.hpp"
#include "abram/vec.hpp"

namespace abram {

// Energy Phi(xi, theta) with gradients in both arguments. xi is the input
// perturbation, theta the model parameter. Every sampler, estimator and
// attack in this library consumes this interface.
class Potential {
 public:
  virtual ~Potential() = default;

  virtual int xi_dim() const = 0;
  virtual int theta_dim() const = 0;

  virtual double value(std::span<const double> xi, std::span<const double> theta) const = 0;
  virtual void grad_xi(std::span<const double> xi, std::span<const double> theta,
                       std::span<double> out) const = 0;
  virtual void grad_theta(std::span<const double> xi, std::span<const double> theta,
                          std::span<double> out) const = 0;

  Vec grad_xi(std::span<const double> xi, std::span<const double> theta) const {
    Vec out(xi_dim());
    grad_xi(xi, theta, out);
    return out;
  }
  Vec grad_theta(std::span<const double> xi, std::span<const double> theta) const {
    Vec out(theta_dim());
    grad_theta(xi, theta, out);
    return out;
  }
};

// Phi(xi, theta) = (xi - c)^2 / 2, theta ignored.
class ShiftedQuadratic1d final : public Potential {
 public:
  explicit ShiftedQuadratic1d(double c) : c_(c) {}

  int xi_dim() const override { return 1; }
  int theta_dim() const override { return 1; }

  double value(std::span<const double> xi, std::span<const double>) const override {
    const double d = xi[0] - c_;
    return 0.5 * d * d;
  }
  void grad_xi(std::span<const double> xi, std::span<const double>,
               std::span<double> out) const override {
    out[0] = xi[0] - c_;
  }
  void grad_theta(std::span<const double>, std::span<const double>,
                  std::span<double> out) const override {
    out[0] = 0.0;
  }

 private:
  double c_;
};

// Phi(xi, theta) = (xi + theta)^2 / 2.
class CoupledQuadratic1d final : public Potential {
 public:
  int xi_dim() const override { return 1; }
  int theta_dim() const override { return 1; }

  double value(std::span<const double> xi, std::span<const double> theta) const override {
    const double s = xi[0] + theta[0];
    return 0.5 * s * s;
  }
  void grad_xi(std::span<const double> xi, std::span<const double> theta,
               std::span<double> out) const override {
    out[0] = xi[0] + theta[0];
  }
  void grad_theta(std::span<const double> xi, std::span<const double> theta,
                  std::span<double> out) const override {
    out[0] = xi[0] + theta[0];
  }
};

// Phi(xi, theta) = ||xi - theta||^2.
class LinearQuadratic final : public Potential {
 public:
  explicit LinearQuadratic(int dim) : dim_(dim) {
    if (dim < 1) throw invalid_input("LinearQuadratic: dim must be positive");
  }

  int xi_dim() const override { return dim_; }
  int theta_dim() const override { return dim_; }

  double value(std::span<const double> xi, std::span<const double> theta) const override {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
      const double d = xi[i] - theta[i];
      s += d * d;
    }
    return s;
  }
  void grad_xi(std::span<const double> xi, std::span<const double> theta,
               std::span<double> out) const override {
    for (int i = 0; i < dim_; ++i) out[i] = 2.0 * (xi[i] - theta[i]);
  }
  void grad_theta(std::span<const double> xi, std::span<const double> theta,
                  std::span<double> out) const override {
    for (int i = 0; i < dim_; ++i) out[i] = 2.0 * (theta[i] - xi[i]);
  }

 private:
  int dim_;
};

// C^1 cutoff m(xi) = xi * s(||xi||2): identity on the eps-ball, zero from
// 1.9*eps outward, cubic Hermite blend in between. Used to enforce the
// zero-normal-derivative boundary condition on the 2*eps-ball.
class Mollifier {
 public:
  Mollifier(int dim, double eps) : dim_(dim), eps_(eps) {
    if (dim < 1) throw invalid_input("Mollifier: dim must be positive");
    if (!(eps > 0.0)) throw invalid_input("Mollifier: eps must be positive");
  }

  int dim() const { return dim_; }
  double eps() const { return eps_; }

  double bump(double r) const {
    if (r <= eps_) return 1.0;
    if (r >= 1.9 * eps_) return 0.0;
    const double u = (r - eps_) / (0.9 * eps_);
    return 1.0 - u * u * (3.0 - 2.0 * u);
  }

  double bump_derivative(double r) const {
    if (r <= eps_ || r >= 1.9 * eps_) return 0.0;
    const double u = (r - eps_) / (0.9 * eps_);
    return -6.0 * u * (1.0 - u) / (0.9 * eps_);
  }

  Vec eval(std::span<const double> xi) const {
    Vec out(xi.begin(), xi.end());
    scale(bump(norm2(xi)), out);
    return out;
  }

  // Row-major dim x dim: J = s(r) I + (s'(r)/r) xi xi^T.
  std::vector<double> jacobian(std::span<const double> xi) const {
    std::vector<double> jac(static_cast<std::size_t>(dim_) * dim_, 0.0);
    const double r = norm2(xi);
    const double s = bump(r);
    const double ds = bump_derivative(r);
    for (int i = 0; i < dim_; ++i) jac[static_cast<std::size_t>(i) * dim_ + i] = s;
    if (r > 0.0 && ds != 0.0) {
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
          jac[static_cast<std::size_t>(i) * dim_ + j] += ds / r * xi[i] * xi[j];
    }
    return jac;
  }

 private:
  int dim_;
  double eps_;
};

// Phi(xi, theta) = ||m(xi) - theta||^2 with the mollifier above. Its xi-
// gradient 2 J_m(xi)^T (m(xi) - theta) vanishes where m does, so the normal
// derivative is zero on the 2*eps boundary.
class MollifiedQuadratic final : public Potential {
 public:
  MollifiedQuadratic(int dim, double eps) : m_(dim, eps) {}

  const Mollifier& mollifier() const { return m_; }

  int xi_dim() const override { return m_.dim(); }
  int theta_dim() const override { return m_.dim(); }

  double value(std::span<const double> xi, std::span<const double> theta) const override {
    const Vec mx = m_.eval(xi);
    double s = 0.0;
    for (int i = 0; i < m_.dim(); ++i) {
      const double d = mx[i] - theta[i];
      s += d * d;
    }
    return s;
  }

  void grad_xi(std::span<const double> xi, std::span<const double> theta,
               std::span<double> out) const override {
    const int d = m_.dim();
    const Vec mx = m_.eval(xi);
    const std::vector<double> jac = m_.jacobian(xi);
    for (int i = 0; i < d; ++i) {
      double s = 0.0;
      for (int j = 0; j < d; ++j)
        s += jac[static_cast<std::size_t>(j) * d + i] * (mx[j] - theta[j]);
      out[i] = 2.0 * s;
    }
  }

  void grad_theta(std::span<const double> xi, std::span<const double> theta,
                  std::span<double> out) const override {
    const Vec mx = m_.eval(xi);
    for (int i = 0; i < m_.dim(); ++i) out[i] = 2.0 * (theta[i] - mx[i]);
  }

 private:
  Mollifier m_;
};

inline std::shared_ptr<const Potential> shifted_quadratic_1d(double c) {
  return std::make_shared<ShiftedQuadratic1d>(c);
}
inline std::shared_ptr<const Potential> coupled_quadratic_1d() {
  return std::make_shared<CoupledQuadratic1d>();
}
inline std::shared_ptr<const Potential> linear_quadratic(int dim) {
  return std::make_shared<LinearQuadratic>(dim);
}
inline std::shared_ptr<const Potential> mollified_quadratic(int dim, double eps) {
  return std::make_shared<MollifiedQuadratic>(dim, eps);
}

struct GradCheckReport {
  double max_rel_err_xi = 0.0;
  double max_rel_err_theta = 0.0;
};

// Componentwise centered finite differences of value() against both analytic
// gradients. Relative error is measured against max(|analytic|, |fd|, 1e-8)
// per component.
inline GradCheckReport grad_check(const Potential& p, std::span<const double> xi,
                                  std::span<const double> theta, double h_fd = 1e-5) {
  GradCheckReport report;
  Vec x(xi.begin(), xi.end());
  Vec t(theta.begin(), theta.end());

  const Vec gx = p.grad_xi(x, t);
  for (int i = 0; i < p.xi_dim(); ++i) {
    const double keep = x[i];
    x[i] = keep + h_fd;
    const double up = p.value(x, t);
    x[i] = keep - h_fd;
    const double dn = p.value(x, t);
    x[i] = keep;
    const double fd = (up - dn) / (2.0 * h_fd);
    const double scale = std::max({std::abs(gx[i]), std::abs(fd), 1e-8});
    report.max_rel_err_xi = std::max(report.max_rel_err_xi, std::abs(gx[i] - fd) / scale);
  }

  const Vec gt = p.grad_theta(x, t);
  for (int i = 0; i < p.theta_dim(); ++i) {
    const double keep = t[i];
    t[i] = keep + h_fd;
    const double up = p.value(x, t);
    t[i] = keep - h_fd;
    const double dn = p.value(x, t);
    t[i] = keep;
    const double fd = (up - dn) / (2.0 * h_fd);
    const double scale = std::max({std::abs(gt[i]), std::abs(fd), 1e-8});
    report.max_rel_err_theta =
        std::max(report.max_rel_err_theta, std::abs(gt[i] - fd) / scale);
  }
  return report;
}

}  // namespace abram
