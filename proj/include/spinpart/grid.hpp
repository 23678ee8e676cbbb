#pragma once

// Direction grids and derivative-free maximization on the unit sphere:
// a deterministic Fibonacci lattice for coarse scans and a Nelder-Mead
// simplex in (theta, phi) for local refinement.  Direction's constructor
// folds out-of-range angles, so the simplex can roam freely.

#include "spinpart/angular.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace spinpart {
namespace grid {

using angular::Direction;

// n near-uniform points: z descends in equal steps, phi advances by the
// golden angle.  Deterministic, so scan results are reproducible.
inline std::vector<Direction> fibonacci_lattice(int n) {
  if (n < 1) throw std::domain_error("fibonacci_lattice: need n >= 1");
  const double golden_angle = angular::pi * (3.0 - std::sqrt(5.0));
  std::vector<Direction> points;
  points.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / double(n);
    points.emplace_back(std::acos(std::clamp(z, -1.0, 1.0)), golden_angle * i);
  }
  return points;
}

struct SphereOptimum {
  Direction direction{0.0, 0.0};
  double value = 0.0;
};

// Nelder-Mead maximization of f over the sphere starting from `start`;
// stops when the simplex collapses below step_tol in angle and the value
// spread falls below value_tol.
inline SphereOptimum refine_on_sphere(const std::function<double(const Direction&)>& f,
                                      const Direction& start, double step_tol = 1e-10,
                                      double value_tol = 1e-12, int max_iter = 500) {
  struct Point {
    double t, p, neg;  // minimizes neg = -f
  };
  const auto eval = [&](double t, double p) { return -f(Direction(t, p)); };
  const double h = 0.1;
  std::array<Point, 3> s{{{start.theta, start.phi, eval(start.theta, start.phi)},
                          {start.theta + h, start.phi, eval(start.theta + h, start.phi)},
                          {start.theta, start.phi + h, eval(start.theta, start.phi + h)}}};
  for (int it = 0; it < max_iter; ++it) {
    std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.neg < b.neg; });
    const double spread = std::max(std::hypot(s[1].t - s[0].t, s[1].p - s[0].p),
                                   std::hypot(s[2].t - s[0].t, s[2].p - s[0].p));
    if (spread < step_tol && std::abs(s[2].neg - s[0].neg) < value_tol) break;
    const double ct = 0.5 * (s[0].t + s[1].t), cp = 0.5 * (s[0].p + s[1].p);
    const double rt = ct + (ct - s[2].t), rp = cp + (cp - s[2].p);
    const double fr = eval(rt, rp);
    if (fr < s[0].neg) {
      const double et = ct + 2.0 * (ct - s[2].t), ep = cp + 2.0 * (cp - s[2].p);
      const double fe = eval(et, ep);
      s[2] = (fe < fr) ? Point{et, ep, fe} : Point{rt, rp, fr};
    } else if (fr < s[1].neg) {
      s[2] = {rt, rp, fr};
    } else {
      const double kt = ct + 0.5 * (s[2].t - ct), kp = cp + 0.5 * (s[2].p - cp);
      const double fk = eval(kt, kp);
      if (fk < s[2].neg) {
        s[2] = {kt, kp, fk};
      } else {  // shrink toward the best vertex
        for (int i = 1; i < 3; ++i) {
          s[i].t = s[0].t + 0.5 * (s[i].t - s[0].t);
          s[i].p = s[0].p + 0.5 * (s[i].p - s[0].p);
          s[i].neg = eval(s[i].t, s[i].p);
        }
      }
    }
  }
  std::sort(s.begin(), s.end(), [](const Point& a, const Point& b) { return a.neg < b.neg; });
  return {Direction(s[0].t, s[0].p), -s[0].neg};
}

// Coarse lattice scan followed by local refinement from the best node.
inline SphereOptimum maximize_on_sphere(const std::function<double(const Direction&)>& f,
                                        int lattice_nodes = 512) {
  SphereOptimum best{Direction::z_axis(), f(Direction::z_axis())};
  for (const auto& n : fibonacci_lattice(lattice_nodes)) {
    const double v = f(n);
    if (v > best.value) best = {n, v};
  }
  const SphereOptimum refined = refine_on_sphere(f, best.direction);
  return (refined.value > best.value) ? refined : best;
}

// Golden-section maximization of a smooth periodic 1-d function on [a, b].
inline std::pair<double, double> maximize_scalar(const std::function<double(double)>& f, double a,
                                                 double b, double tol = 1e-10) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace grid
}  // namespace spinpart
