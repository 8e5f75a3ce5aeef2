#include <gtest/gtest.h>

#include "netinv/elastic.hpp"
#include "testing.hpp"

using namespace netinv;
using namespace netinv::testing;

namespace {

const Complex kJ(0, 1);

RVector xy(double x, double y) { return (RVector(2) << x, y).finished(); }

ElasticNetwork single_spring(RVector a, RVector b, double k) {
  ElasticNetwork net = make_network(single_edge(), {std::move(a), std::move(b)});
  net.k(0) = k;
  return net;
}

ElasticNetwork random_dynamic(Random& rng, double omega) {
  auto pos = framed_square_positions();
  for (auto& p : pos) p += 0.2 * rng.rvector(2);
  ElasticNetwork net = make_network(framed_square(), pos);
  net.k = rng.rvector(11, 0.5, 2.0);
  net.c_e = rng.rvector(11, 0.0, 0.5);
  net.mass = rng.rvector(8, 0.5, 2.0);
  net.c_v = rng.rvector(8, 0.05, 0.5);
  net.omega = omega;
  return net;
}

// Schur complement of -w^2 M + jw C + K, straight from dense blocks.
CMatrix unscaled_dtn(const ElasticNetwork& net) {
  const double w = net.omega;
  const MatrixEdgeField cond = spring_conductivity(net) + (kJ * w) * damper_conductivity(net);
  const CVector q = -w * w * net.mass.cast<Complex>() + kJ * w * net.c_v.cast<Complex>();
  const int d = net.dim();
  const BlockOperator op = assemble_schrodinger(
      net.graph, cond, MatrixNodeField::scaled_identity(d, q));
  const CMatrix ii = op.ii();
  return CMatrix(op.bb()) - CMatrix(op.bi()) * ii.fullPivLu().solve(CMatrix(op.ib()));
}

void expect_identity(const ProblemSpec& spec, const CVector& p1, const CVector& p2) {
  const CVector lhs = vec(CMatrix(spec.forward(p1) - spec.forward(p2)));
  const CVector rhs = product_matrix(spec, p1, p2).w.transpose() * (p1 - p2);
  EXPECT_LT((lhs - rhs).norm(), 1e-9 * (1 + lhs.norm())) << spec.name();
}

void expect_fd_jacobian(const ProblemSpec& spec, const CVector& p) {
  EXPECT_LT(relative_error(fd_jacobian(spec, p, 1e-5), jacobian(spec, p)), 1e-6) << spec.name();
}

CVector random_edge_rho(Random& rng, int ne, double omega) {
  CVector r(ne);
  for (int e = 0; e < ne; ++e) r(e) = Complex(rng.uniform(0.5, 2.0), omega * rng.uniform(0.1, 0.5));
  return r;
}

CVector random_node_rho(Random& rng, int nv, double omega) {
  CVector r(nv);
  for (int v = 0; v < nv; ++v)
    r(v) = Complex(-omega * omega * rng.uniform(0.5, 2.0), omega * rng.uniform(0.05, 0.5));
  return r;
}

}  // namespace

TEST(SpringConductivity, Examples) {
  const auto horizontal = spring_conductivity(single_spring(xy(0, 0), xy(1, 0), 5));
  EXPECT_LT(max_abs(horizontal[0] - (CMatrix(2, 2) << 5, 0, 0, 0).finished()), 1e-15);
  const auto diagonal = spring_conductivity(single_spring(xy(0, 0), xy(1, 1), 2));
  EXPECT_LT(max_abs(diagonal[0] - (CMatrix(2, 2) << 1, 1, 1, 1).finished()), 1e-15);
}

TEST(SpringConductivity, RankOneAlongTheSpring) {
  Random rng(70);
  const ElasticNetwork net = random_dynamic(rng, 1.0);
  const auto sigma = spring_conductivity(net);
  for (int e = 0; e < net.graph.num_edges(); ++e) {
    const Edge& ed = net.graph.edges()[e];
    const RVector dir = (net.positions[ed.tail] - net.positions[ed.head]).normalized();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(sigma[e].real());
    EXPECT_NEAR(es.eigenvalues()(1), net.k(e), 1e-12);
    EXPECT_NEAR(es.eigenvalues()(0), 0.0, 1e-12);
    EXPECT_GE(std::abs(es.eigenvectors().col(1).dot(dir)), 1 - 1e-12);
    EXPECT_NEAR(sigma[e].trace().real(), net.k(e), 1e-12);
  }
}

TEST(SpringConductivity, RejectsCoincidentEndpoints) {
  EXPECT_THROW(spring_conductivity(single_spring(xy(1, 1), xy(1, 1), 1)), InvalidArgument);
}

TEST(DamperConductivity, Examples) {
  Random rng(71);
  ElasticNetwork net = random_dynamic(rng, 1.0);
  net.c_e.setZero();
  EXPECT_EQ(max_abs(CMatrix(vec(damper_conductivity(net)))), 0.0);
  net.c_e = net.k;
  const auto sigma = spring_conductivity(net);
  const auto mu = damper_conductivity(net);
  net.c_e = rng.rvector(11, 0.1, 1.0);
  const auto mu2 = damper_conductivity(net);
  for (int e = 0; e < 11; ++e) {
    EXPECT_LT(max_abs(mu[e] - sigma[e]), 1e-15);
    EXPECT_LT(max_abs(mu2[e] * sigma[e] - sigma[e] * mu2[e]), 1e-14);
  }
}

TEST(FrequencyOperator, SingleSpring) {
  const FrequencyOperator fo = frequency_operator(single_spring(xy(0, 0), xy(1, 0), 1));
  EXPECT_LT(max_abs(fo.conductivity[0] - (CMatrix(2, 2) << -kJ, 0, 0, 0).finished()), 1e-15);
  EXPECT_LT(max_abs(fo.potential[0] - Complex(0.1, 1.0) * CMatrix::Identity(2, 2)), 1e-15);
}

TEST(FrequencyOperator, ScaledIdentity) {
  Random rng(72);
  for (double w : {0.5, 1.0, -2.0}) {
    const ElasticNetwork net = random_dynamic(rng, w);
    const FrequencyOperator fo = frequency_operator(net);
    const CMatrix original = -w * w * fo.mass + kJ * w * fo.damping + fo.stiffness;
    EXPECT_LT(max_abs(kJ * w * fo.op.matrix() - original), 1e-12);
    EXPECT_LT(max_abs(fo.op.matrix() - fo.op.matrix().transpose()), 1e-14);
    for (int v = 0; v < 8; ++v) EXPECT_NEAR(fo.potential[v](0, 0).real(), net.c_v(v), 1e-15);
    EXPECT_EQ(classify_regime(net.graph, fo.conductivity, fo.potential).tag, Regime::PdQ);
  }
}

TEST(FrequencyOperator, Errors) {
  ElasticNetwork net = collinear_springs();
  net.omega = 0;
  EXPECT_THROW(frequency_operator(net), InvalidArgument);
  net.omega = 1;
  net.c_v(1) = 0;
  EXPECT_THROW(frequency_operator(net), InvalidArgument);
}

TEST(DisplacementToForces, CollinearStatic) {
  const DtnMap dtn = displacement_to_forces(collinear_springs(), ElasticRegime::Static);
  CMatrix e = CMatrix::Zero(2, 2);
  e(0, 0) = 1;
  CMatrix expected(4, 4);
  expected << e, -e, -e, e;
  EXPECT_LT(max_abs(dtn.matrix - 0.5 * expected), 1e-12);
}

TEST(DisplacementToForces, StaticAnnihilatesTranslations) {
  Random rng(73);
  const ElasticNetwork net = random_dynamic(rng, 1.0);
  const CMatrix lam = displacement_to_forces(net, ElasticRegime::Static).matrix;
  CVector c(8);
  const RVector shift = rng.rvector(2);
  for (int k = 0; k < 4; ++k) c.segment(2 * k, 2) = shift.cast<Complex>();
  EXPECT_LT((lam * c).norm(), 1e-12);
}

TEST(DisplacementToForces, DynamicIsSymmetric) {
  Random rng(74);
  ElasticNetwork net = random_dynamic(rng, 1.5);
  net.c_e.setZero();
  net.c_v.setConstant(1e-3);
  const CMatrix lam = displacement_to_forces(net, ElasticRegime::Dynamic).matrix;
  EXPECT_LT(max_abs(lam - lam.transpose()), 1e-12);
}

TEST(DisplacementToForces, HomogeneityBridge) {
  Random rng(75);
  for (double w : {0.5, 1.0, 2.0}) {
    const ElasticNetwork net = random_dynamic(rng, w);
    const CMatrix lam = displacement_to_forces(net, ElasticRegime::Dynamic).matrix;
    EXPECT_LT(max_abs(lam - unscaled_dtn(net)), 1e-10);
  }
}

TEST(StaticSprings, SingleSpringStates) {
  const ElasticNetwork net = single_spring(xy(0, 0), xy(1, 0), 1);
  const SpecPtr spec = make_spec_static_springs(net);
  EXPECT_TRUE(spec->is_real());
  const CMatrix s = spec->state_map(CVector::Ones(1));
  EXPECT_EQ(s.rows(), 1);
  EXPECT_NEAR(s(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(s(0, 2).real(), -1.0, 1e-15);
  EXPECT_NEAR(std::abs(s(0, 1)), 0.0, 1e-15);
}

TEST(StaticSprings, IdentityAndAdmissibility) {
  Random rng(76);
  const ElasticNetwork net = collinear_springs();
  const SpecPtr spec = make_spec_static_springs(net);
  for (int t = 0; t < 5; ++t)
    expect_identity(*spec, rng.rvector(2, 0.5, 2.0).cast<Complex>(),
                    rng.rvector(2, 0.5, 2.0).cast<Complex>());
  EXPECT_FALSE(spec->admissible((CVector(2) << 1.0, 0.0).finished()));
  EXPECT_FALSE(spec->admissible((CVector(2) << 1.0, Complex(1.0, 0.1)).finished()));
  EXPECT_TRUE(spec->admissible((CVector(2) << 1.0, 2.0).finished()));
}

TEST(StaticSprings, StatesIgnoreFloppyRepresentative) {
  const ElasticNetwork net = collinear_springs();
  const SpecPtr spec = make_spec_static_springs(net);
  const CMatrix s = spec->state_map(CVector::Ones(2));
  // a perpendicular interior displacement does not stretch either spring
  const CMatrix grad = gradient_matrix(net.graph, 2);
  CVector z = CVector::Zero(6);
  z(3) = 1;
  const CVector gz = grad * z;
  const EigenData dirs = spring_directions(net);
  for (int e = 0; e < 2; ++e)
    EXPECT_LT(std::abs((dirs.x[e].transpose().cast<Complex>() * gz.segment(2 * e, 2))(0)), 1e-15);
  EXPECT_EQ(s.rows(), 2);
}

TEST(Eigenvalues, MatchesStaticSpringsForRealValues) {
  Random rng(77);
  auto pos = framed_square_positions();
  ElasticNetwork net = make_network(framed_square(), pos);
  const SpecPtr springs = make_spec_static_springs(net);
  const SpecPtr eig = make_spec_eigenvalues(net.graph, spring_directions(net));
  const CVector k = rng.rvector(11, 0.5, 2.0).cast<Complex>();
  EXPECT_LT(max_abs(springs->forward(k) - eig->forward(k)), 1e-12);
  EXPECT_LT(max_abs(springs->state_map(k) - eig->state_map(k)), 1e-12);
}

TEST(Eigenvalues, IdentityAndAdmissibility) {
  Random rng(78);
  const Graph g = framed_square();
  const EigenData data = rng.eigen_data(g.num_edges(), 3, 2);
  const SpecPtr spec = make_spec_eigenvalues(g, data);
  EXPECT_EQ(spec->parameter_dim(), 22);
  for (int t = 0; t < 5; ++t) {
    const CVector l1 = rng.eigen_data(g.num_edges(), 3, 2).stacked_lambda();
    const CVector l2 = rng.eigen_data(g.num_edges(), 3, 2).stacked_lambda();
    expect_identity(*spec, l1, l2);
  }
  CVector bad = data.stacked_lambda();
  bad(3) = Complex(0.0, 1.0);
  EXPECT_FALSE(spec->admissible(bad));
  expect_fd_jacobian(*spec, data.stacked_lambda());
}

TEST(SpringsKnownMasses, IdentityJacobianAndAdmissibility) {
  Random rng(79);
  const ElasticNetwork net = make_network(star3(), {xy(0.2, 0.1), xy(1, 0), xy(-0.5, 1), xy(-0.4, -0.9)});
  const SpecPtr spec = make_spec_springs_known_masses(net);
  for (int t = 0; t < 5; ++t)
    expect_identity(*spec, random_edge_rho(rng, 3, 1.0), random_edge_rho(rng, 3, 1.0));
  expect_fd_jacobian(*spec, random_edge_rho(rng, 3, 1.0));
  EXPECT_FALSE(spec->admissible(CVector::Ones(3)));
  EXPECT_TRUE(spec->admissible(CVector::Constant(3, Complex(1, 0.1))));

  ElasticNetwork negative = net;
  negative.omega = -1;
  const SpecPtr neg = make_spec_springs_known_masses(negative);
  EXPECT_FALSE(neg->admissible(CVector::Constant(3, Complex(1, 0.1))));
  EXPECT_TRUE(neg->admissible(CVector::Constant(3, Complex(1, -0.1))));
}

TEST(SpringsKnownMasses, ForwardMatchesDisplacementToForces) {
  Random rng(80);
  const ElasticNetwork net = random_dynamic(rng, 1.3);
  const SpecPtr spec = make_spec_springs_known_masses(net);
  const CMatrix lam = displacement_to_forces(net, ElasticRegime::Dynamic).matrix;
  EXPECT_LT(max_abs(spec->forward(edge_parameters(net)) - lam), 1e-10);
}

TEST(SpringsKnownMasses, NewtonRecoversOnPathGeometry) {
  Random rng(81);
  ElasticNetwork net = make_network(path3(), {xy(0, 0), xy(1, 0.3), xy(2, 0)});
  const SpecPtr spec = make_spec_springs_known_masses(net);
  const CVector truth = random_edge_rho(rng, 2, 1.0);
  const CVector p0 = CVector::Constant(2, Complex(1.0, 0.3));
  const NewtonResult r = newton_invert(*spec, spec->forward(truth), p0);
  EXPECT_EQ(r.trace.status, NewtonStatus::Converged);
  EXPECT_LT((r.parameter - truth).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(MassesKnownSprings, IdentityJacobianAndAdmissibility) {
  Random rng(82);
  const ElasticNetwork net = random_dynamic(rng, 0.8);
  const SpecPtr spec = make_spec_masses_known_springs(net);
  EXPECT_EQ(spec->parameter_dim(), 8);
  for (int t = 0; t < 5; ++t)
    expect_identity(*spec, random_node_rho(rng, 8, 0.8), random_node_rho(rng, 8, 0.8));
  expect_fd_jacobian(*spec, random_node_rho(rng, 8, 0.8));
  EXPECT_FALSE(spec->admissible(CVector::Constant(8, Complex(0.0, 0.1))));
  EXPECT_TRUE(spec->admissible(CVector::Constant(8, Complex(-1.0, 0.1))));
  EXPECT_LT(max_abs(spec->forward(node_parameters(net)) -
                    displacement_to_forces(net, ElasticRegime::Dynamic).matrix),
            1e-10);
}

TEST(MassesKnownSprings, NewtonRecoversOnChain) {
  Random rng(83);
  const ElasticNetwork net = collinear_springs();
  const SpecPtr spec = make_spec_masses_known_springs(net);
  const CVector truth = random_node_rho(rng, 3, 1.0);
  const CVector p0 = CVector::Constant(3, Complex(-1.0, 0.2));
  const NewtonResult r = newton_invert(*spec, spec->forward(truth), p0);
  EXPECT_EQ(r.trace.status, NewtonStatus::Converged);
  EXPECT_LT((r.parameter - truth).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Floppy, UnbracedSquareMatchesDenseNullspace) {
  const Graph square = build_graph(4, {0, 1}, {{0, 1}, {1, 2}, {2, 3}, {0, 3}});
  const ElasticNetwork net = make_network(square, {xy(0, 0), xy(1, 0), xy(1, 1), xy(0, 1)});
  const MatrixEdgeField sigma = spring_conductivity(net);
  const CMatrix ii = assemble_laplacian(square, sigma).ii();
  const Eigen::FullPivLU<RMatrix> lu(ii.real());
  const int dense_null = static_cast<int>(ii.cols() - lu.rank());
  EXPECT_EQ(floppy_basis(square, sigma).dimension(), dense_null);
  EXPECT_EQ(dense_null, 1);
}

TEST(Validation, Errors) {
  ElasticNetwork net = collinear_springs();
  net.k(0) = 0;
  EXPECT_THROW(net.validate_static(), InvalidArgument);
  net = collinear_springs();
  net.c_e(1) = -1;
  EXPECT_THROW(net.validate_static(), InvalidArgument);
  net = collinear_springs();
  net.mass(0) = 0;
  EXPECT_NO_THROW(net.validate_static());
  EXPECT_THROW(net.validate_dynamic(), InvalidArgument);
  net = collinear_springs();
  net.positions.pop_back();
  EXPECT_THROW(make_spec_static_springs(net), InvalidArgument);
}
