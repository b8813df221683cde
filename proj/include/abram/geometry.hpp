#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "abram/errors.hpp"
#include "abram/rng.hpp"
#include "abram/vec.hpp"

namespace abram {

enum class NormKind { L2, LInf };

inline std::string to_string(NormKind k) { return k == NormKind::L2 ? "l2" : "linf"; }

// Norm ball B(eps) = { x : ||x|| <= eps }, the perturbation constraint set.
// The LInf variant is the componentwise box [-eps, eps]^dim.
struct Ball {
  double radius = 1.0;
  NormKind norm_kind = NormKind::L2;
  int dim = 1;

  Ball() = default;
  Ball(double radius_, NormKind norm_kind_, int dim_)
      : radius(radius_), norm_kind(norm_kind_), dim(dim_) {
    if (!(radius > 0.0)) throw invalid_input("Ball: radius must be positive");
    if (dim < 1) throw invalid_input("Ball: dim must be positive");
  }

  double norm(std::span<const double> x) const {
    return norm_kind == NormKind::L2 ? norm2(x) : norm_inf(x);
  }

  bool contains(std::span<const double> x) const { return norm(x) <= radius; }
};

// Nearest point of the ball. L2: radial rescale, LInf: componentwise clamp.
// Identity on interior points, idempotent.
inline void project_to_ball_inplace(std::span<double> x, const Ball& ball) {
  if (!all_finite(x)) throw invalid_input("project_to_ball: non-finite input");
  if (static_cast<int>(x.size()) != ball.dim)
    throw invalid_input("project_to_ball: dimension mismatch");
  if (ball.norm_kind == NormKind::LInf) {
    for (double& v : x) v = std::clamp(v, -ball.radius, ball.radius);
    return;
  }
  const double n = norm2(x);
  if (n <= ball.radius) return;
  scale(ball.radius / n, x);
}

inline Vec project_to_ball(std::span<const double> x, const Ball& ball) {
  Vec out(x.begin(), x.end());
  project_to_ball_inplace(out, ball);
  return out;
}

// Uniform draw from the ball. LInf: componentwise uniform. L2: Gaussian
// direction scaled to radius * U^(1/dim).
inline void sample_uniform_inplace(std::span<double> out, const Ball& ball, RngStream& rng) {
  if (static_cast<int>(out.size()) != ball.dim)
    throw invalid_input("sample_uniform: dimension mismatch");
  if (ball.norm_kind == NormKind::LInf) {
    for (double& v : out) v = rng.uniform(-ball.radius, ball.radius);
    return;
  }
  double n = 0.0;
  do {
    for (double& v : out) v = rng.normal();
    n = norm2(out);
  } while (n == 0.0);
  const double r =
      ball.radius * std::pow(rng.uniform01(), 1.0 / static_cast<double>(ball.dim));
  scale(r / n, out);
}

inline Vec sample_uniform(const Ball& ball, RngStream& rng) {
  Vec out(ball.dim);
  sample_uniform_inplace(out, ball, rng);
  return out;
}

// Inner normal -x/||x|| at a boundary point of the L2 ball. The discrete
// schemes never need LInf normals (they use projection), so those are
// rejected here.
inline Vec inner_normal(std::span<const double> x, const Ball& ball) {
  if (ball.norm_kind != NormKind::L2)
    throw invalid_input("inner_normal: only defined for the L2 ball");
  const double n = norm2(x);
  if (std::abs(n - ball.radius) > 1e-9)
    throw invalid_input("inner_normal: point is not on the boundary");
  Vec out(x.begin(), x.end());
  scale(-1.0 / n, out);
  return out;
}

}  // namespace abram
