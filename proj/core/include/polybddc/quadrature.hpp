#pragma once

#include <span>
#include <vector>

#include "polybddc/mesh.hpp"

namespace polybddc {

/// Points and positive weights, exact for polynomials up to `degree`.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return weights.size(); }
  double total_weight() const;
  void append(const QuadratureRule& other);
};

/// Gauss-Legendre nodes and weights on [-1, 1] with n points.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

QuadratureRule segment_quadrature(const Point& a, const Point& b, int degree);

/// Collapsed (Duffy) Gauss rule on a triangle.
QuadratureRule triangle_quadrature(const Point& a, const Point& b, const Point& c, int degree);

/// Fan triangulation from `center`; the polygon must be simple and star-shaped
/// with respect to `center`.
QuadratureRule polygon_quadrature(std::span<const Point> polygon, const Point& center, int degree);

QuadratureRule cell_quadrature(const PolytopalMesh& mesh, int cell, int degree);
QuadratureRule face_quadrature(const PolytopalMesh& mesh, int face, int degree);

}  // namespace polybddc
