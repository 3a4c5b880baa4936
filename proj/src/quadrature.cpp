#include "karst/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace karst {

namespace {
constexpr int kMaxDegree = 19;
}

std::vector<QuadPoint1d> gauss_legendre_01(int n) {
  if (n < 1) throw std::invalid_argument("quadrature: need at least one point");
  // Newton iteration on P_n over [-1,1], then map to [0,1].
  std::vector<QuadPoint1d> pts(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
  }
  return pts;
}

std::vector<QuadPoint1d> edge_rule(int degree) {
  if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("quadrature: unsupported degree");
  return gauss_legendre_01(degree / 2 + 1);
}

QuadratureRule reference_rule(CellShape shape, int degree) {
  if (degree < 0 || degree > kMaxDegree) throw std::invalid_argument("quadrature: unsupported degree");
  QuadratureRule rule;
  if (shape == CellShape::Rectangle) {
    const auto g = gauss_legendre_01(degree / 2 + 1);
    for (const auto& px : g)
      for (const auto& py : g) rule.points.push_back({Vec2(px.x, py.x), px.w * py.w});
  } else {
    // Duffy map (u,v) -> (u*(1-v), v); the Jacobian (1-v) raises the
    // v-degree by one, hence the extra point in that direction.
    const auto gu = gauss_legendre_01(degree / 2 + 1);
    const auto gv = gauss_legendre_01((degree + 1) / 2 + 1);
    for (const auto& pu : gu)
      for (const auto& pv : gv) {
        const double x = pu.x * (1.0 - pv.x);
        rule.points.push_back({Vec2(x, pv.x), pu.w * pv.w * (1.0 - pv.x)});
      }
  }
  return rule;
}

}  // namespace karst
