#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "polybddc/polybddc.hpp"

using namespace polybddc;

namespace {

const Method kAll[] = {Method::hdg, Method::hdg_plus, Method::hho, Method::hho_mixed};

std::string name_of(Method m) { return to_string(m); }

Eigen::VectorXd gather(const HybridSpace& s, int c, const HybridVector& v) {
  const std::vector<int> dofs = s.local_dofs(c);
  Eigen::VectorXd out(static_cast<Eigen::Index>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i) out[static_cast<Eigen::Index>(i)] = v.values[dofs[i]];
  return out;
}

Eigen::VectorXd face_data(const HybridSpace& s, int c, const HybridVector& v) {
  const Eigen::VectorXd local = gather(s, c, v);
  return local.tail(local.size() - s.cell_block());
}

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  return Eigen::VectorXd::NullaryExpr(n, [&] { return nd(gen); });
}

double integrate(const QuadratureRule& rule, const std::function<double(std::size_t)>& g) {
  double s = 0.0;
  for (std::size_t q = 0; q < rule.size(); ++q) s += rule.weights[q] * g(q);
  return s;
}

// Mixed HDG problem on one cell for q = -grad u with flux trace
// q.n + tau (u - lambda), assembled in the integrated-by-parts form:
//   (q, r) - (u, div r) + <lambda, r.n> = 0
//   -(q, grad v) + <q.n + tau (u - lambda), v> = (f, v)
// Returns [q_x, q_y, u] in the cell basis of degree k.
Eigen::VectorXd hdg_mixed_oracle(const PolytopalMesh& m, int c, int k, double tau, const Eigen::VectorXd& lambda,
                                 const ScalarFunction& f) {
  const CellBasis b = make_cell_basis(m, c, k);
  const int n = b.dim();
  const QuadratureRule rule = cell_quadrature(m, c, 2 * k + 4);
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3 * n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Point& x = rule.points[q];
    const double w = rule.weights[q];
    const Eigen::VectorXd phi = b.value(x);
    const Eigen::MatrixXd grad = b.gradient(x);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int d = 0; d < 2; ++d) {
          sys(d * n + i, d * n + j) += w * phi[j] * phi[i];
          sys(d * n + i, 2 * n + j) -= w * phi[j] * grad(i, d);
          sys(2 * n + i, d * n + j) -= w * phi[j] * grad(i, d);
        }
      }
      rhs[2 * n + i] += w * f(x) * phi[i];
    }
  }
  const Cell& cell = m.cell(c);
  const int nb = face_dim(k);
  for (std::size_t fi = 0; fi < cell.faces.size(); ++fi) {
    const int f = cell.faces[fi];
    const FaceBasis fb = make_face_basis(m, f, k);
    const Point nrm = m.orientation(c, f) * m.face(f).normal;
    const QuadratureRule fr = face_quadrature(m, f, 2 * k + 2);
    const Eigen::VectorXd lam = lambda.segment(static_cast<Eigen::Index>(fi) * nb, nb);
    for (std::size_t q = 0; q < fr.size(); ++q) {
      const Point& x = fr.points[q];
      const double w = fr.weights[q];
      const Eigen::VectorXd phi = b.value(x);
      const double lx = fb.value(x).dot(lam);
      for (int i = 0; i < n; ++i) {
        for (int d = 0; d < 2; ++d) rhs[d * n + i] -= w * lx * phi[i] * nrm[d];
        for (int j = 0; j < n; ++j) {
          for (int d = 0; d < 2; ++d) sys(2 * n + i, d * n + j) += w * phi[j] * nrm[d] * phi[i];
          sys(2 * n + i, 2 * n + j) += w * tau * phi[j] * phi[i];
        }
        rhs[2 * n + i] += w * tau * lx * phi[i];
      }
    }
  }
  return sys.fullPivLu().solve(rhs);
}

}  // namespace

TEST(MethodConfig, DegreesAndPenalties) {
  const PolytopalMesh m = build_cartesian(2, 2);
  const Cell& cell = m.cell(0);
  EXPECT_EQ(MethodConfig(Method::hdg, 2).cell_degree(), 2);
  EXPECT_EQ(MethodConfig(Method::hho, 2).cell_degree(), 2);
  EXPECT_EQ(MethodConfig(Method::hdg_plus, 2).cell_degree(), 3);
  EXPECT_EQ(MethodConfig(Method::hho_mixed, 0).cell_degree(), 1);
  EXPECT_EQ(MethodConfig(Method::hdg, 1).penalty(cell), 1.0);
  EXPECT_NEAR(MethodConfig(Method::hdg_plus, 1).penalty(cell), 1.0 / cell.diameter, 1e-15);
  EXPECT_THROW(MethodConfig(Method::hho, -1), std::invalid_argument);
  for (Method mt : kAll) EXPECT_EQ(method_from_string(to_string(mt)), mt);
  EXPECT_EQ(method_from_string("hdg+"), Method::hdg_plus);
  EXPECT_THROW(method_from_string("dg"), std::invalid_argument);
}

TEST(HdgLocal, ConstantDataGivesConstantSolution) {
  const PolytopalMesh m = voronoi_polygonal(3, 3);
  for (Method mt : {Method::hdg, Method::hdg_plus}) {
    const SkeletalDiscretization disc(m, MethodConfig(mt, 1));
    const HybridSpace& s = disc.space();
    const HybridVector v = interpolate(s, [](const Point&) { return 2.0; });
    for (int c : {0, 7}) {
      const auto [u, q] = disc.local_solve(c, face_data(s, c, v), [](const Point&) { return 0.0; });
      EXPECT_LT((u - v.cell(c)).cwiseAbs().maxCoeff(), 1e-11);
      EXPECT_LT(q.cwiseAbs().maxCoeff(), 1e-11);
    }
  }
}

TEST(HdgLocal, LinearDataIsReproduced) {
  const PolytopalMesh m = simplexify(build_cartesian(2, 2));
  const auto g = [](const Point& x) { return 1.0 + 2.0 * x.x() - 3.0 * x.y(); };
  const SkeletalDiscretization disc(m, MethodConfig(Method::hdg, 1));
  const HybridSpace& s = disc.space();
  const HybridVector v = interpolate(s, g);
  for (int c = 0; c < m.num_cells(); ++c) {
    const auto [u, q] = disc.local_solve(c, face_data(s, c, v), [](const Point&) { return 0.0; });
    EXPECT_LT((u - v.cell(c)).cwiseAbs().maxCoeff(), 1e-11);
    // q = -grad g = (-2, 3), stored in the flux basis of degree k
    const CellBasis qb = make_cell_basis(m, c, 1);
    const int nq = qb.dim();
    const Point x = m.cell(c).centroid;
    EXPECT_NEAR(qb.value(x).dot(q.head(nq)), -2.0, 1e-11);
    EXPECT_NEAR(qb.value(x).dot(q.tail(nq)), 3.0, 1e-11);
  }
}

TEST(HdgLocal, MatchesMixedSystemOracleOnUnitTriangle) {
  const PolytopalMesh m = simplexify(build_cartesian(1, 1));
  const auto f = [](const Point& x) { return 1.0 + x.x() - 2.0 * x.y() * x.y(); };
  for (int k : {0, 1, 2}) {
    const SkeletalDiscretization disc(m, MethodConfig(Method::hdg, k));
    for (int c = 0; c < m.num_cells(); ++c) {
      const int nface = static_cast<int>(m.cell(c).faces.size()) * face_dim(k);
      const Eigen::VectorXd lambda = random_vector(nface, 40 + k);
      const auto [u, q] = disc.local_solve(c, lambda, f);
      const Eigen::VectorXd ref = hdg_mixed_oracle(m, c, k, 1.0, lambda, f);
      const int n = cell_dim(k);
      EXPECT_LT((u - ref.tail(n)).cwiseAbs().maxCoeff(), 1e-12) << "k=" << k;
      EXPECT_LT((q - ref.head(2 * n)).cwiseAbs().maxCoeff(), 1e-12) << "k=" << k;
    }
  }
}

TEST(HdgLocal, GlobalSolutionIsLocallyConservative) {
  const PolytopalMesh m = simplexify(build_cartesian(6, 6));
  for (Method mt : {Method::hdg, Method::hdg_plus}) {
    const SkeletalDiscretization disc(m, MethodConfig(mt, 1));
    const HybridSpace& s = disc.space();
    const auto src = [](const Point& x) { return 1.0 + 4.0 * x.x() * x.y() - x.y() * x.y(); };
    const HybridVector uh = disc.recover(solve_direct(disc.assemble(src)), src);
    const int nq = cell_dim(1);
    for (int c = 0; c < m.num_cells(); ++c) {
      const auto [u, q] = disc.local_solve(c, face_data(s, c, uh), src);
      const CellBasis qb = make_cell_basis(m, c, 1);
      const CellBasis& ub = s.cell_basis(c);
      const double tau = disc.config().penalty(m.cell(c));
      double outflow = 0.0;
      for (int f : m.cell(c).faces) {
        const Point n = m.orientation(c, f) * m.face(f).normal;
        const QuadratureRule fr = face_quadrature(m, f, 6);
        // the trace is compared through its L2 projection onto the face space
        const Eigen::VectorXd pu = l2_project(s.face_basis(f), fr, [&](const Point& x) { return ub.value(x).dot(u); });
        outflow += integrate(fr, [&](std::size_t i) {
          const Point& x = fr.points[i];
          const double qn = qb.value(x).dot(q.head(nq)) * n.x() + qb.value(x).dot(q.tail(nq)) * n.y();
          return qn + tau * s.face_basis(f).value(x).dot(pu - uh.face(f));
        });
      }
      const QuadratureRule cr = cell_quadrature(m, c, 8);
      const double source = integrate(cr, [&](std::size_t i) { return src(cr.points[i]); });
      EXPECT_NEAR(outflow, source, 1e-10) << name_of(mt) << " cell " << c;
    }
  }
}

TEST(HhoReconstruction, ReproducesPolynomialsUpToKPlusOne) {
  const PolytopalMesh m = voronoi_polygonal(3, 3);
  for (int k : {0, 1, 2}) {
    const HybridSpace s(m, k, k);
    const auto g = [k](const Point& x) { return std::pow(x.x() + 0.3, k + 1) - std::pow(x.y(), k + 1) + 0.7 * x.x(); };
    const auto grad = [k](const Point& x) {
      return Point((k + 1) * std::pow(x.x() + 0.3, k) + 0.7, -(k + 1) * std::pow(x.y(), k));
    };
    const HybridVector v = interpolate(s, g);
    for (int c = 0; c < m.num_cells(); ++c) {
      const HhoReconstruction rec = hho_reconstruction(s, c);
      const Eigen::VectorXd p = rec.operator_matrix * gather(s, c, v);
      const Point mid = 0.5 * (m.cell(c).centroid + m.face(m.cell(c).faces[0]).centroid);
      for (const Point& x : {m.cell(c).centroid, mid}) {
        const Point gp = rec.potential_basis.gradient(x).transpose() * p;
        EXPECT_LT((gp - grad(x)).norm(), 1e-10) << "k=" << k;
      }
    }
  }
}

TEST(HhoReconstruction, ConstantsHaveZeroGradient) {
  const PolytopalMesh m = voronoi_polygonal(2, 3);
  const HybridSpace s(m, 1, 1);
  const HybridVector v = interpolate(s, [](const Point&) { return -4.0; });
  for (int c = 0; c < m.num_cells(); ++c) {
    const HhoReconstruction rec = hho_reconstruction(s, c);
    const Eigen::VectorXd p = rec.operator_matrix * gather(s, c, v);
    EXPECT_LT((rec.stiffness * p).norm(), 1e-12);
  }
}

TEST(HhoReconstruction, MatchesNormalEquationsOnPentagon) {
  const PolytopalMesh m = voronoi_polygonal(3, 3);
  int pentagon = -1;
  for (int c = 0; c < m.num_cells(); ++c)
    if (m.cell(c).vertices.size() == 5) pentagon = c;
  ASSERT_GE(pentagon, 0);
  const int k = 0;
  const HybridSpace s(m, k, k);
  const Cell& cell = m.cell(pentagon);
  const Eigen::VectorXd data = random_vector(1 + static_cast<Eigen::Index>(cell.faces.size()), 3);

  // (grad p, grad w) = (grad u_t, grad w) + sum_F <u_F - u_t, grad w . n>; with
  // k = 0 the first term vanishes. Solve by least squares in P_1 and fix the
  // mean to the cell value.
  const CellBasis pb = make_cell_basis(m, pentagon, k + 1);
  const QuadratureRule rule = cell_quadrature(m, pentagon, 2 * k + 2);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(pb.dim(), pb.dim());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::MatrixXd g = pb.gradient(rule.points[q]);
    stiff += rule.weights[q] * g * g.transpose();
  }
  const double ut = data[0] * s.cell_basis(pentagon).value(cell.centroid)[0];
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(pb.dim());
  for (std::size_t i = 0; i < cell.faces.size(); ++i) {
    const int f = cell.faces[i];
    const Point n = m.orientation(pentagon, f) * m.face(f).normal;
    const QuadratureRule fr = face_quadrature(m, f, 2 * k + 2);
    for (std::size_t q = 0; q < fr.size(); ++q) {
      const double uf = s.face_basis(f).value(fr.points[q]).dot(data.segment(1 + static_cast<Eigen::Index>(i), 1));
      rhs += fr.weights[q] * (uf - ut) * (pb.gradient(fr.points[q]) * n);
    }
  }
  Eigen::VectorXd p = stiff.completeOrthogonalDecomposition().solve(rhs);
  const QuadratureRule mr = cell_quadrature(m, pentagon, 2);
  double mean = 0.0;
  for (std::size_t q = 0; q < mr.size(); ++q) mean += mr.weights[q] * pb.value(mr.points[q]).dot(p);
  p += (ut - mean / cell.area) * pb.constant_coefficients();

  const HhoReconstruction rec = hho_reconstruction(s, pentagon);
  const Eigen::VectorXd got = rec.operator_matrix * data;
  const Point corner = m.vertices()[static_cast<std::size_t>(cell.vertices[2])];
  for (const Point& x : {cell.centroid, corner}) {
    EXPECT_NEAR(rec.potential_basis.value(x).dot(got), pb.value(x).dot(p), 1e-12);
  }
}

class Stabilisers : public ::testing::TestWithParam<Method> {};

TEST_P(Stabilisers, PolynomialConsistentSymmetricPsd) {
  const PolytopalMesh m = voronoi_polygonal(3, 3);
  for (int k : {0, 1, 2}) {
    const MethodConfig cfg(GetParam(), k);
    const HybridSpace s(m, cfg.cell_degree(), k);
    const int d = cfg.cell_degree();
    const auto g = [d](const Point& x) { return std::pow(x.x() - 0.2, d) + 0.5 * std::pow(x.y(), d); };
    const HybridVector v = interpolate(s, g);
    for (int c = 0; c < m.num_cells(); c += 3) {
      const Eigen::MatrixXd st = stabilisation_matrix(cfg, s, c);
      EXPECT_LE((st - st.transpose()).cwiseAbs().maxCoeff(), 1e-13 * std::max(1.0, st.cwiseAbs().maxCoeff()));
      const Eigen::VectorXd local = gather(s, c, v);
      EXPECT_LT(std::abs(local.dot(st * local)), 1e-12 * std::max(1.0, st.norm()));
      for (unsigned trial = 0; trial < 100; ++trial) {
        const Eigen::VectorXd r = random_vector(st.rows(), 1000 * c + trial);
        EXPECT_GE(r.dot(st * r), -1e-12 * st.norm());
      }
    }
  }
}

TEST_P(Stabilisers, LocalMatricesAreConsistentAndCondensedKernelIsConstants) {
  const PolytopalMesh m = voronoi_polygonal(3, 3);
  for (int k : {0, 1}) {
    const SkeletalDiscretization disc(m, MethodConfig(GetParam(), k));
    const HybridSpace& s = disc.space();
    const HybridVector one = interpolate(s, [](const Point&) { return 1.0; });
    for (int c = 0; c < m.num_cells(); ++c) {
      const Eigen::MatrixXd& a = disc.local(c).face_matrix;
      EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (a + a.transpose()));
      const Eigen::VectorXd ev = eig.eigenvalues();
      EXPECT_GT(ev[0], -1e-10 * ev.maxCoeff());
      EXPECT_EQ((ev.array() < 1e-10 * ev.maxCoeff()).count(), 1);
      EXPECT_LT((a * face_data(s, c, one)).norm(), 1e-10 * a.norm());
    }
  }
}

INSTANTIATE_TEST_SUITE_P(All, Stabilisers, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return name_of(info.param); });

class Condensed : public ::testing::TestWithParam<Method> {};

TEST_P(Condensed, SymmetricPositiveDefinite) {
  const PolytopalMesh m = simplexify(build_cartesian(4, 4));
  for (int k : {0, 1}) {
    const SkeletalDiscretization disc(m, MethodConfig(GetParam(), k));
    const CondensedSystem sys = disc.assemble_matrix();
    const Eigen::MatrixXd a(sys.matrix);
    EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 1e-13 * a.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
    for (int f = 0; f < m.num_faces(); ++f) EXPECT_EQ(sys.face_offset[static_cast<std::size_t>(f)] < 0, m.face(f).is_boundary());
  }
}

TEST_P(Condensed, ZeroSourceGivesZeroSolution) {
  const PolytopalMesh m = voronoi_polygonal(4, 4);
  const SkeletalDiscretization disc(m, MethodConfig(GetParam(), 1));
  const auto zero = [](const Point&) { return 0.0; };
  const CondensedSystem sys = disc.assemble(zero);
  EXPECT_EQ(sys.rhs.norm(), 0.0);
  const HybridVector uh = disc.recover(solve_direct(sys), zero);
  EXPECT_EQ(uh.values.norm(), 0.0);
  EXPECT_EQ(l2_error(uh, zero), 0.0);
}

TEST_P(Condensed, MatchesMonolithicSolve) {
  const PolytopalMesh m = simplexify(build_cartesian(2, 2));
  const auto f = [](const Point& x) { return 1.0 + x.x() * std::exp(x.y()); };
  for (int k : {0, 1, 2}) {
    const SkeletalDiscretization disc(m, MethodConfig(GetParam(), k));
    EXPECT_LT(polybddc::testing::condensation_discrepancy(disc, f), 1e-10) << "k=" << k;
  }
}

TEST_P(Condensed, RecoveryOfRandomSkeletonMatchesLocalSystem) {
  const PolytopalMesh m = voronoi_polygonal(2, 2);
  const auto f = [](const Point& x) { return x.x() - x.y() * x.y(); };
  const SkeletalDiscretization disc(m, MethodConfig(GetParam(), 1));
  const HybridSpace& s = disc.space();
  const Eigen::VectorXd skeleton = random_vector(disc.num_skeleton_dofs(), 77);
  const HybridVector uh = disc.recover(skeleton, f);
  for (int c = 0; c < m.num_cells(); ++c) {
    // internal unknowns from the uncondensed element: K_ii x = load - K_if lambda
    const LocalElement e = local_element(disc.config(), s, c);
    const Eigen::VectorXd lambda = face_data(s, c, uh);
    Eigen::VectorXd load = Eigen::VectorXd::Zero(e.num_internal);
    load.segment(e.cell_begin, e.num_cell) = cell_load(s, c, f);
    const Eigen::VectorXd x = e.matrix.topLeftCorner(e.num_internal, e.num_internal).fullPivLu().solve(
        load - e.matrix.topRightCorner(e.num_internal, e.num_face_dofs) * lambda);
    EXPECT_LT((x.segment(e.cell_begin, e.num_cell) - uh.cell(c)).cwiseAbs().maxCoeff(), 1e-11);
  }
  // Dirichlet faces carry zero
  for (int f2 : m.boundary_faces()) EXPECT_EQ(uh.face(f2).norm(), 0.0);
}

TEST_P(Condensed, AssemblyIsDeterministic) {
  const PolytopalMesh m = voronoi_polygonal(5, 5);
  const SkeletalDiscretization a(m, MethodConfig(GetParam(), 1));
  const SkeletalDiscretization b(m, MethodConfig(GetParam(), 1));
  const CondensedSystem sa = a.assemble(manufactured_source);
  const CondensedSystem sb = b.assemble(manufactured_source);
  EXPECT_EQ((Eigen::MatrixXd(sa.matrix) - Eigen::MatrixXd(sb.matrix)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((sa.rhs - sb.rhs).cwiseAbs().maxCoeff(), 0.0);
}

TEST_P(Condensed, NormEquivalenceBracketIsStable) {
  // Generalized eigenvalues of (A, G) on mean-free face data, where A is the
  // condensed energy and G the H^1 seminorm of the cell-condensed
  // representative, over the whole unit square (no Dirichlet faces).
  std::vector<double> lo;
  std::vector<double> hi;
  for (int n : {8, 16, 32}) {
    const PolytopalMesh m = simplexify(build_cartesian(n, n));
    const SkeletalDiscretization disc(m, MethodConfig(GetParam(), 0));
    const HybridSpace& s = disc.space();
    const int nb = s.face_block();
    const int nf = m.num_faces() * nb;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nf, nf);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nf, nf);
    for (int c = 0; c < m.num_cells(); ++c) {
      const LocalCondensation& lc = disc.local(c);
      const auto& faces = m.cell(c).faces;
      const auto nl = static_cast<Eigen::Index>(faces.size()) * nb;
      Eigen::MatrixXd ext(s.cell_block() + nl, nl);
      ext.topRows(s.cell_block()) = lc.face_to_cell;
      ext.bottomRows(nl).setIdentity();
      const Eigen::MatrixXd gl = ext.transpose() * h1_local_matrix(s, c) * ext;
      for (std::size_t i = 0; i < faces.size(); ++i)
        for (std::size_t j = 0; j < faces.size(); ++j) {
          const auto bi = static_cast<Eigen::Index>(i) * nb;
          const auto bj = static_cast<Eigen::Index>(j) * nb;
          a.block(faces[i] * nb, faces[j] * nb, nb, nb) += lc.face_matrix.block(bi, bj, nb, nb);
          g.block(faces[i] * nb, faces[j] * nb, nb, nb) += gl.block(bi, bj, nb, nb);
        }
    }
    // basis of the complement of the constant face function
    Eigen::VectorXd one = Eigen::VectorXd::Zero(nf);
    for (int f = 0; f < m.num_faces(); ++f) one.segment(f * nb, nb) = s.face_basis(f).constant_coefficients();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(one);
    const Eigen::MatrixXd q = Eigen::MatrixXd(qr.householderQ()).rightCols(nf - 1);
    const Eigen::MatrixXd ar = q.transpose() * a * q;
    const Eigen::MatrixXd gr = q.transpose() * g * q;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (ar + ar.transpose()),
                                                                  0.5 * (gr + gr.transpose()), Eigen::EigenvaluesOnly);
    lo.push_back(eig.eigenvalues().minCoeff());
    hi.push_back(eig.eigenvalues().maxCoeff());
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    EXPECT_GT(lo[i], 0.0);
    EXPECT_LE(std::max(lo[i], lo[0]) / std::min(lo[i], lo[0]), 2.0) << name_of(GetParam());
    EXPECT_LE(std::max(hi[i], hi[0]) / std::min(hi[i], hi[0]), 2.0) << name_of(GetParam());
  }
}

INSTANTIATE_TEST_SUITE_P(All, Condensed, ::testing::ValuesIn(kAll),
                         [](const auto& info) { return name_of(info.param); });

TEST(Convergence, HdgLinearSimplicialL2Rate) {
  const StudyResult r = convergence_study(Method::hdg, MeshFamily::simplicial, 1, {8, 16, 32});
  EXPECT_GE(*r.rows.back().rate_l2, 1.8);
}

TEST(Convergence, HhoLowestOrderPolygonalEnergyRate) {
  const StudyResult r = convergence_study(Method::hho, MeshFamily::voronoi, 0, {8, 16, 32});
  EXPECT_GE(*r.rows.back().rate_energy, 0.8);
}
