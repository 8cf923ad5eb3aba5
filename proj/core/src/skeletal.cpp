#include "polybddc/skeletal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "polybddc/parallel.hpp"

namespace polybddc {

const char* to_string(Method method) {
  switch (method) {
    case Method::hdg:
      return "hdg";
    case Method::hdg_plus:
      return "hdg_plus";
    case Method::hho:
      return "hho";
    case Method::hho_mixed:
      return "hho_mixed";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "hdg") return Method::hdg;
  if (name == "hdg_plus" || name == "hdgplus" || name == "hdg+") return Method::hdg_plus;
  if (name == "hho") return Method::hho;
  if (name == "hho_mixed" || name == "hhomixed") return Method::hho_mixed;
  throw std::invalid_argument("unknown method '" + name + "'");
}

MethodConfig::MethodConfig(Method m, int k) : method(m), face_degree(k) {
  if (k < 0) throw std::invalid_argument("MethodConfig: negative degree");
}

int MethodConfig::cell_degree() const {
  return (method == Method::hdg_plus || method == Method::hho_mixed) ? face_degree + 1 : face_degree;
}

double MethodConfig::penalty(const Cell& cell) const { return method == Method::hdg_plus ? 1.0 / cell.diameter : 1.0; }

namespace {

/// Quantities shared by every method on one face of a cell.
struct FaceTerms {
  int face = -1;
  QuadratureRule rule;
  Eigen::MatrixXd face_values;  ///< face basis at the face quadrature points
  Eigen::MatrixXd mass;         ///< M_ff
  Eigen::MatrixXd face_cell;    ///< M_ft = int_f psi_i phi_j
  Eigen::MatrixXd projection;   ///< P_f = M_ff^{-1} M_ft (trace of u_t projected onto P_k(f))
  Point normal;                 ///< outward from the cell
};

std::vector<FaceTerms> face_terms(const HybridSpace& space, int c, int quad_degree) {
  const auto& mesh = space.mesh();
  const CellBasis& cb = space.cell_basis(c);
  std::vector<FaceTerms> out;
  for (int f : mesh.cell(c).faces) {
    FaceTerms t;
    t.face = f;
    t.rule = face_quadrature(mesh, f, quad_degree);
    t.face_values = space.face_basis(f).values(t.rule);
    t.mass = weighted_gram(t.face_values, t.face_values, t.rule);
    t.face_cell = weighted_gram(t.face_values, cb.values(t.rule), t.rule);
    t.projection = t.mass.ldlt().solve(t.face_cell);
    t.normal = mesh.orientation(c, f) * mesh.face(f).normal;
    out.push_back(std::move(t));
  }
  return out;
}

int quad_degree(const HybridSpace& space) { return 2 * std::max(space.cell_degree(), space.face_degree()) + 2; }

LocalElement hdg_element(const MethodConfig& config, const HybridSpace& space, int c) {
  const auto& mesh = space.mesh();
  const Cell& cell = mesh.cell(c);
  const int k = config.face_degree;
  const int nc = space.cell_block();
  const int nb = space.face_block();
  const int nf = static_cast<int>(cell.faces.size());
  const CellBasis qb = make_cell_basis(mesh, c, k);
  const int nq = qb.dim();
  const double tau = config.penalty(cell);
  const int qdeg = quad_degree(space);

  LocalElement e;
  e.num_flux = 2 * nq;
  e.cell_begin = 2 * nq;
  e.num_cell = nc;
  e.num_internal = 2 * nq + nc;
  e.num_face_dofs = nf * nb;
  const int n = e.num_internal + e.num_face_dofs;
  e.matrix = Eigen::MatrixXd::Zero(n, n);

  const QuadratureRule rule = cell_quadrature(mesh, c, qdeg);
  const Eigen::MatrixXd qv = qb.values(rule);
  const Eigen::MatrixXd uv = space.cell_basis(c).values(rule);
  const Eigen::MatrixXd a = weighted_gram(qv, qv, rule);
  // B[v, q] = (div q, v)
  const Eigen::MatrixXd bx = weighted_gram(uv, qb.derivatives(rule, 0), rule);
  const Eigen::MatrixXd by = weighted_gram(uv, qb.derivatives(rule, 1), rule);

  auto m = [&](int r0, int c0, int rows, int cols) { return e.matrix.block(r0, c0, rows, cols); };
  m(0, 0, nq, nq) = -a;
  m(nq, nq, nq, nq) = -a;
  m(2 * nq, 0, nc, nq) = bx;
  m(2 * nq, nq, nc, nq) = by;
  m(0, 2 * nq, nq, nc) = bx.transpose();
  m(nq, 2 * nq, nq, nc) = by.transpose();

  const auto faces = face_terms(space, c, qdeg);
  for (int i = 0; i < nf; ++i) {
    const FaceTerms& ft = faces[static_cast<std::size_t>(i)];
    const int col = e.num_internal + i * nb;
    const Eigen::MatrixXd qf = qb.values(ft.rule);
    // C[mu, q] = <q . n, mu>
    const Eigen::MatrixXd cx = weighted_gram(ft.face_values, qf, ft.rule) * ft.normal.x();
    const Eigen::MatrixXd cy = weighted_gram(ft.face_values, qf, ft.rule) * ft.normal.y();
    m(col, 0, nb, nq) -= cx;
    m(col, nq, nb, nq) -= cy;
    m(0, col, nq, nb) -= cx.transpose();
    m(nq, col, nq, nb) -= cy.transpose();
    // tau <P u - lambda, P v - mu>
    m(2 * nq, 2 * nq, nc, nc) += tau * ft.face_cell.transpose() * ft.projection;
    m(2 * nq, col, nc, nb) -= tau * ft.face_cell.transpose();
    m(col, 2 * nq, nb, nc) -= tau * ft.face_cell;
    m(col, col, nb, nb) += tau * ft.mass;
  }
  e.flux_operator = Eigen::MatrixXd::Zero(2 * nq, n);
  e.flux_operator.leftCols(2 * nq).setIdentity();
  return e;
}

LocalElement hho_element(const MethodConfig& config, const HybridSpace& space, int c) {
  const HhoReconstruction rec = hho_reconstruction(space, c);
  const Eigen::MatrixXd stab = stabilisation_matrix(config, space, c);
  LocalElement e;
  e.num_cell = space.cell_block();
  e.num_internal = e.num_cell;
  e.cell_begin = 0;
  e.num_face_dofs = static_cast<int>(space.mesh().cell(c).faces.size()) * space.face_block();
  e.matrix = rec.operator_matrix.transpose() * rec.stiffness * rec.operator_matrix + stab;
  e.matrix = 0.5 * (e.matrix + e.matrix.transpose()).eval();
  e.flux_operator = rec.operator_matrix;
  return e;
}

}  // namespace

HhoReconstruction hho_reconstruction(const HybridSpace& space, int c) {
  const auto& mesh = space.mesh();
  const Cell& cell = mesh.cell(c);
  const CellBasis& cb = space.cell_basis(c);
  const int nc = space.cell_block();
  const int nb = space.face_block();
  const int nf = static_cast<int>(cell.faces.size());
  const int n = nc + nf * nb;
  HhoReconstruction rec{make_cell_basis(mesh, c, space.face_degree() + 1), {}, {}};
  const CellBasis& pb = rec.potential_basis;
  const int nr = pb.dim();
  const int qdeg = 2 * std::max(space.cell_degree(), space.face_degree() + 1) + 2;

  const QuadratureRule rule = cell_quadrature(mesh, c, qdeg);
  rec.stiffness = stiffness_matrix(pb, rule);
  const Eigen::MatrixXd pv = pb.values(rule);
  const Eigen::MatrixXd uv = cb.values(rule);

  // (grad r, grad w) = (grad u_t, grad w) + sum_f <u_f - u_t, grad w . n>
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nr, n);
  rhs.leftCols(nc) = weighted_gram(pb.derivatives(rule, 0), cb.derivatives(rule, 0), rule) +
                     weighted_gram(pb.derivatives(rule, 1), cb.derivatives(rule, 1), rule);
  for (int i = 0; i < nf; ++i) {
    const int f = cell.faces[static_cast<std::size_t>(i)];
    const QuadratureRule fr = face_quadrature(mesh, f, qdeg);
    const Point normal = mesh.orientation(c, f) * mesh.face(f).normal;
    const Eigen::MatrixXd dn =
        pb.derivatives(fr, 0) * normal.x() + pb.derivatives(fr, 1) * normal.y();
    rhs.leftCols(nc) -= weighted_gram(dn, cb.values(fr), fr);
    rhs.middleCols(nc + i * nb, nb) += weighted_gram(dn, space.face_basis(f).values(fr), fr);
  }
  // closure int_t r = int_t u_t, imposed through a rank-one augmentation
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(rule.size()));
  const Eigen::VectorXd lr = weighted_gram(pv, ones, rule);
  Eigen::RowVectorXd lu = Eigen::RowVectorXd::Zero(n);
  lu.head(nc) = weighted_gram(ones, uv, rule);
  const double scale = 1.0 / (cell.area * cell.area);
  const Eigen::MatrixXd lhs = rec.stiffness + scale * lr * lr.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw std::runtime_error("hho_reconstruction: singular reconstruction system on cell " + std::to_string(c));
  }
  rec.operator_matrix = ldlt.solve(rhs + scale * lr * lu);
  return rec;
}

Eigen::MatrixXd stabilisation_matrix(const MethodConfig& config, const HybridSpace& space, int c) {
  const auto& mesh = space.mesh();
  const Cell& cell = mesh.cell(c);
  const int nc = space.cell_block();
  const int nb = space.face_block();
  const int nf = static_cast<int>(cell.faces.size());
  const int n = nc + nf * nb;
  const auto faces = face_terms(space, c, quad_degree(space) + 2);
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);

  if (config.method == Method::hho) {
    const HhoReconstruction rec = hho_reconstruction(space, c);
    const QuadratureRule rule = cell_quadrature(mesh, c, 2 * space.face_degree() + 4);
    const Eigen::MatrixXd uv = space.cell_basis(c).values(rule);
    const Eigen::MatrixXd m_tt = weighted_gram(uv, uv, rule);
    const Eigen::MatrixXd m_tr = weighted_gram(uv, rec.potential_basis.values(rule), rule);
    // delta_T = pi_T(r) - u_t
    Eigen::MatrixXd delta_t = m_tt.ldlt().solve(m_tr * rec.operator_matrix);
    delta_t.leftCols(nc) -= Eigen::MatrixXd::Identity(nc, nc);
    for (int i = 0; i < nf; ++i) {
      const FaceTerms& ft = faces[static_cast<std::size_t>(i)];
      // delta_TF = pi_F(r) - u_f
      const Eigen::MatrixXd m_fr = weighted_gram(ft.face_values, rec.potential_basis.values(ft.rule), ft.rule);
      Eigen::MatrixXd diff = ft.mass.ldlt().solve(m_fr * rec.operator_matrix);
      diff.middleCols(nc + i * nb, nb) -= Eigen::MatrixXd::Identity(nb, nb);
      diff -= ft.projection * delta_t;
      s += diff.transpose() * ft.mass * diff / mesh.face(ft.face).length;
    }
  } else {
    // projected jump P_f u_t - u_f with weight tau_t (HDG family) or 1/h_t (mixed-order HHO)
    const double weight = config.method == Method::hho_mixed ? 1.0 / cell.diameter : config.penalty(cell);
    for (int i = 0; i < nf; ++i) {
      const FaceTerms& ft = faces[static_cast<std::size_t>(i)];
      Eigen::MatrixXd jump = Eigen::MatrixXd::Zero(nb, n);
      jump.leftCols(nc) = ft.projection;
      jump.middleCols(nc + i * nb, nb) = -Eigen::MatrixXd::Identity(nb, nb);
      s += weight * jump.transpose() * ft.mass * jump;
    }
  }
  return 0.5 * (s + s.transpose());
}

LocalElement local_element(const MethodConfig& config, const HybridSpace& space, int c) {
  if (space.cell_degree() != config.cell_degree() || space.face_degree() != config.face_degree) {
    throw std::invalid_argument("local_element: space degrees do not match the method");
  }
  return config.is_hdg_family() ? hdg_element(config, space, c) : hho_element(config, space, c);
}

LocalCondensation condense(const LocalElement& e) {
  const int ni = e.num_internal;
  const int nf = e.num_face_dofs;
  const Eigen::MatrixXd kii = e.matrix.topLeftCorner(ni, ni);
  const Eigen::MatrixXd kif = e.matrix.topRightCorner(ni, nf);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(kii);
  if (!lu.isInvertible()) throw std::runtime_error("condense: singular internal block");
  const Eigen::MatrixXd x = -lu.solve(kif);
  Eigen::MatrixXd load = Eigen::MatrixXd::Zero(ni, e.num_cell);
  load.middleRows(e.cell_begin, e.num_cell).setIdentity();
  const Eigen::MatrixXd v = lu.solve(load);

  LocalCondensation out;
  const Eigen::MatrixXd a = e.matrix.bottomRightCorner(nf, nf) + e.matrix.bottomLeftCorner(nf, ni) * x;
  out.face_matrix = 0.5 * (a + a.transpose());
  out.face_to_cell = x.middleRows(e.cell_begin, e.num_cell);
  out.load_to_cell = v.middleRows(e.cell_begin, e.num_cell);
  Eigen::MatrixXd lift(ni + nf, nf);
  lift << x, Eigen::MatrixXd::Identity(nf, nf);
  Eigen::MatrixXd lift_load = Eigen::MatrixXd::Zero(ni + nf, e.num_cell);
  lift_load.topRows(ni) = v;
  out.face_to_flux = e.flux_operator * lift;
  out.load_to_flux = e.flux_operator * lift_load;
  return out;
}

Eigen::VectorXd cell_load(const HybridSpace& space, int c, const ScalarFunction& f) {
  const QuadratureRule rule = cell_quadrature(space.mesh(), c, 2 * space.cell_degree() + 6);
  const Eigen::MatrixXd values = space.cell_basis(c).values(rule);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(values.cols());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    load += rule.weights[q] * f(rule.points[q]) * values.row(static_cast<Eigen::Index>(q)).transpose();
  }
  return load;
}

SkeletalDiscretization::SkeletalDiscretization(const PolytopalMesh& mesh, const MethodConfig& config)
    : config_(config), space_(mesh, config.cell_degree(), config.face_degree) {
  local_.resize(static_cast<std::size_t>(mesh.num_cells()));
  parallel_for(mesh.num_cells(),
               [&](int c) { local_[static_cast<std::size_t>(c)] = condense(local_element(config_, space_, c)); });
  face_offset_.assign(static_cast<std::size_t>(mesh.num_faces()), -1);
  int offset = 0;
  for (int f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.face(f).is_boundary()) continue;
    face_offset_[static_cast<std::size_t>(f)] = offset;
    offset += space_.face_block();
  }
  num_skeleton_dofs_ = offset;
}

CondensedSystem SkeletalDiscretization::assemble_matrix() const {
  const auto& mesh = space_.mesh();
  const int nb = space_.face_block();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& faces = mesh.cell(c).faces;
    const Eigen::MatrixXd& a = local(c).face_matrix;
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const int oi = face_offset_[static_cast<std::size_t>(faces[i])];
      if (oi < 0) continue;
      for (std::size_t j = 0; j < faces.size(); ++j) {
        const int oj = face_offset_[static_cast<std::size_t>(faces[j])];
        if (oj < 0) continue;
        for (int a_i = 0; a_i < nb; ++a_i) {
          for (int a_j = 0; a_j < nb; ++a_j) {
            triplets.emplace_back(oi + a_i, oj + a_j,
                                  a(static_cast<Eigen::Index>(i) * nb + a_i, static_cast<Eigen::Index>(j) * nb + a_j));
          }
        }
      }
    }
  }
  CondensedSystem sys;
  sys.matrix.resize(num_skeleton_dofs_, num_skeleton_dofs_);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  sys.matrix.makeCompressed();
  sys.rhs = Eigen::VectorXd::Zero(num_skeleton_dofs_);
  sys.face_offset = face_offset_;
  sys.face_block = nb;

  const Eigen::SparseMatrix<double> t = sys.matrix.transpose();
  const double asym = (sys.matrix - t).norm();
  if (asym > 1e-12 * std::max(sys.matrix.norm(), 1e-300)) {
    throw std::runtime_error("assemble: condensed matrix is not symmetric");
  }
  return sys;
}

CondensedSystem SkeletalDiscretization::assemble(const ScalarFunction& f) const {
  CondensedSystem sys = assemble_matrix();
  const auto& mesh = space_.mesh();
  const int nb = space_.face_block();
  std::vector<Eigen::VectorXd> contributions(static_cast<std::size_t>(mesh.num_cells()));
  parallel_for(mesh.num_cells(), [&](int c) {
    contributions[static_cast<std::size_t>(c)] = local(c).face_to_cell.transpose() * cell_load(space_, c, f);
  });
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& faces = mesh.cell(c).faces;
    const Eigen::VectorXd& r = contributions[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < faces.size(); ++i) {
      const int o = face_offset_[static_cast<std::size_t>(faces[i])];
      if (o >= 0) sys.rhs.segment(o, nb) += r.segment(static_cast<Eigen::Index>(i) * nb, nb);
    }
  }
  return sys;
}

namespace {

Eigen::VectorXd gather_faces(const SkeletalDiscretization& disc, int c, const Eigen::VectorXd& skeleton) {
  const auto& faces = disc.mesh().cell(c).faces;
  const int nb = disc.space().face_block();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(faces.size()) * nb);
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const int o = disc.face_offset()[static_cast<std::size_t>(faces[i])];
    if (o >= 0) out.segment(static_cast<Eigen::Index>(i) * nb, nb) = skeleton.segment(o, nb);
  }
  return out;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> SkeletalDiscretization::local_solve(int c, const Eigen::VectorXd& face_data,
                                                                                const ScalarFunction& f) const {
  const LocalCondensation& lc = local(c);
  if (face_data.size() != lc.face_to_cell.cols()) throw std::invalid_argument("local_solve: wrong face data length");
  const Eigen::VectorXd load = cell_load(space_, c, f);
  return {lc.face_to_cell * face_data + lc.load_to_cell * load, lc.face_to_flux * face_data + lc.load_to_flux * load};
}

HybridVector SkeletalDiscretization::recover(const Eigen::VectorXd& skeleton, const ScalarFunction& f) const {
  if (skeleton.size() != num_skeleton_dofs_) throw std::invalid_argument("recover: wrong skeleton length");
  const auto& mesh = space_.mesh();
  HybridVector v(space_);
  parallel_for(mesh.num_cells(), [&](int c) {
    const LocalCondensation& lc = local(c);
    v.cell(c) = lc.face_to_cell * gather_faces(*this, c, skeleton) + lc.load_to_cell * cell_load(space_, c, f);
  });
  for (int f = 0; f < mesh.num_faces(); ++f) {
    const int o = face_offset_[static_cast<std::size_t>(f)];
    if (o >= 0) v.face(f) = skeleton.segment(o, space_.face_block());
  }
  return v;
}

CondensedSystem assemble_condensed(const SkeletalDiscretization& disc, const ScalarFunction& f) {
  return disc.assemble(f);
}

HybridVector recover_bulk(const SkeletalDiscretization& disc, const Eigen::VectorXd& skeleton,
                          const ScalarFunction& f) {
  return disc.recover(skeleton, f);
}

Eigen::VectorXd solve_direct(const CondensedSystem& system) {
  if (system.size() == 0) return Eigen::VectorXd();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(system.matrix);
  if (ldlt.info() != Eigen::Success) throw std::runtime_error("solve_direct: factorization failed");
  if (ldlt.vectorD().minCoeff() <= 0.0) throw std::runtime_error("solve_direct: matrix is not positive definite");
  return ldlt.solve(system.rhs);
}

double l2_error(const HybridVector& v, const ScalarFunction& exact) {
  const HybridSpace& space = *v.space;
  const auto& mesh = space.mesh();
  double sum = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const QuadratureRule rule = cell_quadrature(mesh, c, 2 * space.cell_degree() + 6);
    const Eigen::VectorXd uh = space.cell_basis(c).values(rule) * v.cell(c);
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double d = uh[static_cast<Eigen::Index>(q)] - exact(rule.points[q]);
      sum += rule.weights[q] * d * d;
    }
  }
  return std::sqrt(sum);
}

double manufactured_solution(const Point& x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return std::sin(two_pi * x.x()) * std::sin(two_pi * x.y()) * x.x() * (x.x() - 1.0) * x.y() * (x.y() - 1.0);
}

double manufactured_source(const Point& x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // u = a(x) a(y) with a(s) = sin(2 pi s) s (s - 1)
  auto a = [&](double s) { return std::sin(two_pi * s) * s * (s - 1.0); };
  auto a2 = [&](double s) {
    return -two_pi * two_pi * std::sin(two_pi * s) * s * (s - 1.0) +
           2.0 * two_pi * std::cos(two_pi * s) * (2.0 * s - 1.0) + 2.0 * std::sin(two_pi * s);
  };
  return -(a2(x.x()) * a(x.y()) + a(x.x()) * a2(x.y()));
}

}  // namespace polybddc
