#include "polybddc/basis.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace polybddc {

CellBasis::CellBasis(Point center, double scale, int degree)
    : center_(std::move(center)), scale_(scale), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("CellBasis: negative degree");
  if (!(scale > 0.0)) throw std::invalid_argument("CellBasis: non-positive scale");
}

Eigen::VectorXd CellBasis::raw_value(const Point& x) const {
  const double X = (x.x() - center_.x()) / scale_;
  const double Y = (x.y() - center_.y()) / scale_;
  Eigen::VectorXd v(dim());
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = d; i >= 0; --i) {
      v[idx++] = std::pow(X, i) * std::pow(Y, d - i);
    }
  }
  return v;
}

Eigen::MatrixXd CellBasis::raw_gradient(const Point& x) const {
  const double X = (x.x() - center_.x()) / scale_;
  const double Y = (x.y() - center_.y()) / scale_;
  Eigen::MatrixXd g(dim(), 2);
  int idx = 0;
  for (int d = 0; d <= degree_; ++d) {
    for (int i = d; i >= 0; --i) {
      const int j = d - i;
      g(idx, 0) = i > 0 ? i * std::pow(X, i - 1) * std::pow(Y, j) / scale_ : 0.0;
      g(idx, 1) = j > 0 ? j * std::pow(X, i) * std::pow(Y, j - 1) / scale_ : 0.0;
      ++idx;
    }
  }
  return g;
}

Eigen::VectorXd CellBasis::value(const Point& x) const {
  return orthonormalized() ? Eigen::VectorXd(transform_ * raw_value(x)) : raw_value(x);
}

Eigen::MatrixXd CellBasis::gradient(const Point& x) const {
  return orthonormalized() ? Eigen::MatrixXd(transform_ * raw_gradient(x)) : raw_gradient(x);
}

Eigen::MatrixXd CellBasis::values(std::span<const Point> points) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(points.size()), dim());
  for (std::size_t q = 0; q < points.size(); ++q) v.row(static_cast<Eigen::Index>(q)) = value(points[q]).transpose();
  return v;
}

Eigen::MatrixXd CellBasis::values(const QuadratureRule& rule) const { return values(rule.points); }

Eigen::MatrixXd CellBasis::derivatives(const QuadratureRule& rule, int axis) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rule.size()), dim());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    v.row(static_cast<Eigen::Index>(q)) = gradient(rule.points[q]).col(axis).transpose();
  }
  return v;
}

Eigen::VectorXd CellBasis::constant_coefficients() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
  c[0] = orthonormalized() ? 1.0 / transform_(0, 0) : 1.0;
  return c;
}

void CellBasis::orthonormalize(const Eigen::MatrixXd& mass) {
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) throw std::runtime_error("CellBasis: mass matrix is not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
  transform_ = orthonormalized() ? Eigen::MatrixXd(Linv * transform_) : Linv;
}

FaceBasis::FaceBasis(Point center, Point tangent, double scale, int degree)
    : center_(std::move(center)), tangent_(std::move(tangent)), scale_(scale), degree_(degree) {
  if (degree < 0) throw std::invalid_argument("FaceBasis: negative degree");
  if (!(scale > 0.0)) throw std::invalid_argument("FaceBasis: non-positive scale");
}

Eigen::VectorXd FaceBasis::value(const Point& x) const {
  const double s = (x - center_).dot(tangent_) / scale_;
  Eigen::VectorXd v(dim());
  double p = 1.0;
  for (int i = 0; i <= degree_; ++i) {
    v[i] = p;
    p *= s;
  }
  return transform_.size() > 0 ? Eigen::VectorXd(transform_ * v) : v;
}

Eigen::MatrixXd FaceBasis::values(const QuadratureRule& rule) const {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rule.size()), dim());
  for (std::size_t q = 0; q < rule.size(); ++q) v.row(static_cast<Eigen::Index>(q)) = value(rule.points[q]).transpose();
  return v;
}

Eigen::VectorXd FaceBasis::constant_coefficients() const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(dim());
  c[0] = transform_.size() > 0 ? 1.0 / transform_(0, 0) : 1.0;
  return c;
}

void FaceBasis::orthonormalize(const Eigen::MatrixXd& mass) {
  Eigen::LLT<Eigen::MatrixXd> llt(mass);
  if (llt.info() != Eigen::Success) throw std::runtime_error("FaceBasis: mass matrix is not SPD");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd Linv = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(dim(), dim()));
  transform_ = transform_.size() > 0 ? Eigen::MatrixXd(Linv * transform_) : Linv;
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const QuadratureRule& rule) {
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  return a.transpose() * w.asDiagonal() * b;
}

Eigen::MatrixXd mass_matrix(const CellBasis& basis, const QuadratureRule& rule) {
  const Eigen::MatrixXd v = basis.values(rule);
  return weighted_gram(v, v, rule);
}

Eigen::MatrixXd mass_matrix(const FaceBasis& basis, const QuadratureRule& rule) {
  const Eigen::MatrixXd v = basis.values(rule);
  return weighted_gram(v, v, rule);
}

double spd_condition_number(const Eigen::MatrixXd& mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(mass, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  if (!(lmin > 1e-14 * lmax)) throw std::runtime_error("mass matrix is numerically singular");
  return lmax / lmin;
}

CellBasis make_cell_basis(const PolytopalMesh& mesh, int cell, int degree) {
  const Cell& c = mesh.cell(cell);
  CellBasis basis(c.centroid, c.diameter, degree);
  if (degree > 0) {
    const Eigen::MatrixXd m = mass_matrix(basis, cell_quadrature(mesh, cell, 2 * degree));
    if (spd_condition_number(m) > kOrthonormalizeThreshold) basis.orthonormalize(m);
  }
  return basis;
}

FaceBasis make_face_basis(const PolytopalMesh& mesh, int face, int degree) {
  const Face& f = mesh.face(face);
  FaceBasis basis(f.centroid, f.tangent, f.length, degree);
  if (degree > 0) {
    const Eigen::MatrixXd m = mass_matrix(basis, face_quadrature(mesh, face, 2 * degree));
    if (spd_condition_number(m) > kOrthonormalizeThreshold) basis.orthonormalize(m);
  }
  return basis;
}

Eigen::MatrixXd stiffness_matrix(const CellBasis& basis, const QuadratureRule& rule) {
  const Eigen::MatrixXd dx = basis.derivatives(rule, 0);
  const Eigen::MatrixXd dy = basis.derivatives(rule, 1);
  return weighted_gram(dx, dx, rule) + weighted_gram(dy, dy, rule);
}

Eigen::VectorXd l2_project_values(const Eigen::MatrixXd& basis_values, const QuadratureRule& rule,
                                  const Eigen::VectorXd& g_values) {
  const Eigen::MatrixXd m = weighted_gram(basis_values, basis_values, rule);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), static_cast<Eigen::Index>(rule.weights.size()));
  const Eigen::VectorXd b = basis_values.transpose() * w.cwiseProduct(g_values);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("l2_project: mass solve failed");
  return ldlt.solve(b);
}

namespace {

Eigen::VectorXd tabulate(const QuadratureRule& rule, const ScalarFunction& g) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(rule.size()));
  for (std::size_t q = 0; q < rule.size(); ++q) v[static_cast<Eigen::Index>(q)] = g(rule.points[q]);
  return v;
}

}  // namespace

Eigen::VectorXd l2_project(const CellBasis& basis, const QuadratureRule& rule, const ScalarFunction& g) {
  return l2_project_values(basis.values(rule), rule, tabulate(rule, g));
}

Eigen::VectorXd l2_project(const FaceBasis& basis, const QuadratureRule& rule, const ScalarFunction& g) {
  return l2_project_values(basis.values(rule), rule, tabulate(rule, g));
}

}  // namespace polybddc
