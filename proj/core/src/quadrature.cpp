#include "polybddc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace polybddc {

double QuadratureRule::total_weight() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

void QuadratureRule::append(const QuadratureRule& other) {
  points.insert(points.end(), other.points.begin(), other.points.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
}

namespace {

struct GaussTable {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Legendre P_n(x) and its derivative by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussTable compute_gauss_legendre(int n) {
  GaussTable g;
  g.nodes.resize(static_cast<std::size_t>(n));
  g.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    g.nodes[lo] = -x;
    g.nodes[hi] = x;
    g.weights[lo] = w;
    g.weights[hi] = w;
  }
  if (n % 2 == 1) g.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return g;
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussTable> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    GaussTable g = n == 1 ? GaussTable{{0.0}, {2.0}} : compute_gauss_legendre(n);
    it = cache.emplace(n, std::move(g)).first;
  }
  nodes = it->second.nodes;
  weights = it->second.weights;
}

QuadratureRule segment_quadrature(const Point& a, const Point& b, int degree) {
  if (degree < 0) throw std::invalid_argument("segment_quadrature: negative degree");
  const int n = degree / 2 + 1;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  const double len = (b - a).norm();
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(x.size());
  rule.weights.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = 0.5 * (x[i] + 1.0);
    rule.points.push_back(a + s * (b - a));
    rule.weights.push_back(0.5 * w[i] * len);
  }
  return rule;
}

QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_quadrature: negative degree");
  // the collapsed direction carries one extra degree from the Jacobian
  const int n = (degree + 1) / 2 + 1;
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre(n, x, w);
  const Point e1 = b - a;
  const Point e2 = c - a;
  const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
  QuadratureRule rule;
  rule.degree = degree;
  rule.points.reserve(x.size() * x.size());
  rule.weights.reserve(x.size() * x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = 0.5 * (x[i] + 1.0);
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = 0.5 * (x[j] + 1.0);
      const double xi = u;
      const double eta = v * (1.0 - u);
      rule.points.push_back(a + xi * e1 + eta * e2);
      rule.weights.push_back(0.25 * w[i] * w[j] * (1.0 - u) * jac);
    }
  }
  return rule;
}

QuadratureRule polygon_quadrature(std::span<const Point> polygon, const Point& center, int degree) {
  const std::size_t n = polygon.size();
  if (n < 3) throw std::invalid_argument("polygon_quadrature: fewer than 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    area2 += p.x() * q.y() - p.y() * q.x();
  }
  if (!(std::abs(area2) > 0.0)) throw std::invalid_argument("polygon_quadrature: degenerate polygon");
  if (!is_simple_polygon(polygon)) throw std::invalid_argument("polygon_quadrature: polygon is not simple");
  const double sign = area2 > 0.0 ? 1.0 : -1.0;
  QuadratureRule rule;
  rule.degree = degree;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& p = polygon[i];
    const Point& q = polygon[(i + 1) % n];
    const Point e1 = p - center;
    const Point e2 = q - center;
    const double fan = sign * (e1.x() * e2.y() - e1.y() * e2.x());
    if (fan < -1e-14 * std::abs(area2)) {
      throw std::invalid_argument("polygon_quadrature: polygon is not star-shaped about its center");
    }
    if (fan <= 1e-14 * std::abs(area2)) continue;  // straight angle at the fan apex side
    rule.append(triangle_quadrature(center, p, q, degree));
  }
  return rule;
}

QuadratureRule cell_quadrature(const PolytopalMesh& mesh, int cell, int degree) {
  const Cell& c = mesh.cell(cell);
  std::vector<Point> poly;
  poly.reserve(c.vertices.size());
  for (int v : c.vertices) poly.push_back(mesh.vertices()[static_cast<std::size_t>(v)]);
  return polygon_quadrature(poly, c.centroid, degree);
}

QuadratureRule face_quadrature(const PolytopalMesh& mesh, int face, int degree) {
  const Face& f = mesh.face(face);
  return segment_quadrature(mesh.vertices()[static_cast<std::size_t>(f.vertices[0])],
                            mesh.vertices()[static_cast<std::size_t>(f.vertices[1])], degree);
}

}  // namespace polybddc
