#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "netinv/inversion.hpp"
#include "testing.hpp"

using namespace netinv;
using namespace netinv::testing;

namespace {

CVector scalar(double x) { return CVector::Constant(1, x); }

// K4 with a single boundary vertex.
Graph complete4() {
  return build_graph(4, {0}, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
}

double jacobian_error(const ProblemSpec& spec, const CVector& p, double h) {
  const CMatrix analytic = jacobian(spec, p);
  return relative_error(fd_jacobian(spec, p, h), analytic);
}

}  // namespace

TEST(ProductMatrix, SingleEdge) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  const ProductMatrix pm = product_matrix(*spec, scalar(1.0), scalar(1.0));
  ASSERT_EQ(pm.w.rows(), 1);
  EXPECT_EQ(pm.w, (CMatrix(1, 4) << 1, -1, -1, 1).finished());
}

TEST(ProductMatrix, ReconstructsDataDifferences) {
  Random rng(50);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_conductivity(g, 2);
  for (int t = 0; t < 5; ++t) {
    const CVector p1 = symmetric_field_parameters(rng, 2, g.num_edges(), true);
    const CVector p2 = symmetric_field_parameters(rng, 2, g.num_edges(), true);
    const ProductMatrix pm = product_matrix(*spec, p1, p2);
    const CVector lhs = vec(CMatrix(spec->forward(p1) - spec->forward(p2)));
    const CVector rhs = pm.w.transpose() * (p1 - p2);
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * (1 + lhs.norm()));
  }
}

TEST(ProductMatrix, ColumnsAreStatePairings) {
  Random rng(51);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_conductivity(g, 2);
  const CVector p1 = symmetric_field_parameters(rng, 2, g.num_edges(), true);
  const CVector p2 = symmetric_field_parameters(rng, 2, g.num_edges(), true);
  const CMatrix s1 = spec->state_map(p1);
  const CMatrix s2 = spec->state_map(p2);
  const CMatrix w = product_matrix(*spec, p1, p2).w;
  const Index n = spec->data_dim();
  for (Index a = 0; a < n; ++a)
    for (Index b = 0; b < n; ++b) {
      EXPECT_LT((w.col(a + b * n) - spec->pair(s1.col(a), s2.col(b))).norm(), 1e-14);
      // bilinearity
      const Complex c(0.7, -0.2);
      EXPECT_LT((spec->pair(c * s1.col(a), s2.col(b)) - c * w.col(a + b * n)).norm(),
                1e-12 * (1 + w.col(a + b * n).norm()));
    }
}

TEST(ProductMatrix, ThreadCountDoesNotChangeResult) {
  Random rng(52);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_conductivity(g, 2);
  const CVector p = symmetric_field_parameters(rng, 2, g.num_edges(), true);
  EXPECT_EQ(product_matrix(*spec, p, p, 1).w, product_matrix(*spec, p, p, 3).w);
  EXPECT_EQ(fd_jacobian(*spec, p, 1e-5, FdDirection::Real, 1),
            fd_jacobian(*spec, p, 1e-5, FdDirection::Real, 4));
}

TEST(ProductMatrix, RejectsInadmissible) {
  const SpecPtr spec = make_spec_conductivity(path3(), 1);
  const CVector bad = (CVector(2) << 1.0, -1.0).finished();
  EXPECT_THROW(product_matrix(*spec, bad, bad), InadmissibleParameter);
  EXPECT_THROW(product_matrix(*spec, scalar(1.0), scalar(1.0)), InvalidArgument);
}

TEST(Jacobian, SingleEdge) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  EXPECT_EQ(jacobian(*spec, scalar(3.0)), (CMatrix(4, 1) << 1, -1, -1, 1).finished());
  EXPECT_LT(max_abs(fd_jacobian(*spec, scalar(3.0), 0.1) - jacobian(*spec, scalar(3.0))), 1e-14);
}

TEST(Jacobian, MatchesFiniteDifferences) {
  Random rng(53);
  const Graph g = framed_square();
  const SpecPtr cond = make_spec_conductivity(g, 2);
  const CVector p = symmetric_field_parameters(rng, 2, g.num_edges(), true);
  EXPECT_LT(jacobian_error(*cond, p, 1e-5), 1e-6);

  const SpecPtr schr = make_spec_schrodinger(g, rng.pd_conductivity(g, 2));
  const CVector q = symmetric_field_parameters(rng, 2, g.num_vertices(), false);
  EXPECT_LT(jacobian_error(*schr, q, 1e-5), 1e-6);
}

TEST(Jacobian, ImaginaryDirectionEstimatesTheSameDerivative) {
  Random rng(54);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_conductivity(g, 1);
  const CVector p = symmetric_field_parameters(rng, 1, g.num_edges(), true);
  const CMatrix re = fd_jacobian(*spec, p, 1e-5, FdDirection::Real);
  const CMatrix im = fd_jacobian(*spec, p, 1e-5, FdDirection::Imaginary);
  EXPECT_LT(relative_error(re, im), 1e-8);
}

TEST(Jacobian, SecondOrderConvergence) {
  const SpecPtr spec = make_spec_conductivity(path3(), 1);
  const CVector p = (CVector(2) << 1.3, 0.7).finished();
  const double coarse = jacobian_error(*spec, p, 1e-2);
  const double fine = jacobian_error(*spec, p, 5e-3);
  EXPECT_NEAR(coarse / fine, 4.0, 0.2);
}

TEST(Jacobian, SchrodingerColumnsUseProductStates) {
  Random rng(55);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_schrodinger(g, rng.pd_conductivity(g, 1));
  const CVector q = symmetric_field_parameters(rng, 1, g.num_vertices(), false);
  const CMatrix s = spec->state_map(q);
  const CMatrix jac = jacobian(*spec, q);
  for (Index a = 0; a < 4; ++a)
    for (Index b = 0; b < 4; ++b)
      EXPECT_LT((jac.row(a + 4 * b).transpose() - hadamard(s.col(a), s.col(b))).norm(), 1e-14);
}

TEST(FdJacobian, Errors) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  EXPECT_THROW(fd_jacobian(*spec, scalar(0.5), 1.0), InadmissibleParameter);
}

TEST(Forward, DataIsSymmetric) {
  Random rng(56);
  const Graph g = framed_square();
  const SpecPtr cond = make_spec_conductivity(g, 3);
  const CMatrix lam = cond->forward(symmetric_field_parameters(rng, 3, g.num_edges(), true));
  EXPECT_LT(max_abs(lam - lam.transpose()), 1e-12);
}

TEST(Uniqueness, SingleEdge) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  const UniquenessVerdict v = uniqueness_test(*spec, scalar(1.0));
  EXPECT_NEAR(v.sigma_max, 2.0, 1e-14);
  EXPECT_NEAR(v.sigma_min, 2.0, 1e-14);
  EXPECT_EQ(v.epsilon, 1e-8);
  EXPECT_TRUE(v.holds);
}

TEST(Uniqueness, OverparameterizedIsInconclusive) {
  const SpecPtr spec = make_spec_conductivity(complete4(), 1);
  const UniquenessVerdict v = uniqueness_test(*spec, CVector::Ones(6));
  EXPECT_EQ(v.sigma_min, 0.0);
  EXPECT_FALSE(v.holds);
}

TEST(Uniqueness, ColumnOrderDoesNotMatter) {
  Random rng(57);
  const SpecPtr spec = make_spec_conductivity(star3(), 1);
  const CVector p = rng.rvector(3, 0.5, 2.0).cast<Complex>();
  const CMatrix w = product_matrix(*spec, p, p).w;
  std::vector<Index> perm(w.cols());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  CMatrix shuffled(w.rows(), w.cols());
  for (Index c = 0; c < w.cols(); ++c) shuffled.col(c) = w.col(perm[c]);
  const auto a = uniqueness_from_matrix(w);
  const auto b = uniqueness_from_matrix(shuffled);
  EXPECT_EQ(a.holds, b.holds);
  EXPECT_NEAR(a.sigma_min, b.sigma_min, 1e-12);
  EXPECT_NEAR(a.sigma_max, b.sigma_max, 1e-12);
}

TEST(Uniqueness, VerdictThreshold) {
  CMatrix w = CMatrix::Zero(2, 4);
  w(0, 0) = 1;
  w(1, 1) = 1e-9;
  EXPECT_FALSE(uniqueness_from_matrix(w).holds);
  EXPECT_TRUE(uniqueness_from_matrix(w, 1e-10).holds);
}

TEST(Uniqueness, PathIsInconclusiveStarHolds) {
  const SpecPtr p3 = make_spec_conductivity(path3(), 1);
  EXPECT_FALSE(uniqueness_test(*p3, CVector::Ones(2)).holds);
  const SpecPtr star = make_spec_conductivity(star3(), 1);
  EXPECT_TRUE(uniqueness_test(*star, CVector::Ones(3)).holds);
}

TEST(Uniqueness, ScalarVerdictTransfersToMatrices) {
  Random rng(58);
  const Graph g = star3();
  const RVector s = rng.rvector(3, 0.5, 2.0);
  ASSERT_TRUE(uniqueness_test(*make_spec_conductivity(g, 1), s.cast<Complex>()).holds);
  const auto sigma = MatrixEdgeField::scaled_identity(2, s.cast<Complex>());
  EXPECT_TRUE(uniqueness_test(*make_spec_conductivity(g, 2), field_parameters(sigma)).holds);
}

TEST(Newton, SingleEdgeOneStep) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  const CMatrix target = spec->forward(scalar(2.0));
  const NewtonResult r = newton_invert(*spec, target, scalar(1.0));
  EXPECT_EQ(r.trace.status, NewtonStatus::Converged);
  EXPECT_LT(std::abs(r.parameter(0) - 2.0), 1e-14);
  EXPECT_EQ(r.trace.step_lengths.size(), 1u);
  EXPECT_EQ(r.trace.iterates.size(), r.trace.residuals.size());
}

TEST(Newton, StarRecoversConductivities) {
  Random rng(59);
  const SpecPtr spec = make_spec_conductivity(star3(), 1);
  for (int t = 0; t < 5; ++t) {
    const CVector truth = rng.rvector(3, 0.5, 2.0).cast<Complex>();
    const NewtonResult r = newton_invert(*spec, spec->forward(truth), CVector::Ones(3));
    EXPECT_EQ(r.trace.status, NewtonStatus::Converged);
    EXPECT_LT((r.parameter - truth).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(r.trace.residuals.size(), 21u);
  }
}

// Two resistors in series only determine their series conductance, so the
// data are matched without recovering the individual values.
TEST(Newton, PathMatchesDataButCannotSeparateResistors) {
  const SpecPtr spec = make_spec_conductivity(path3(), 1);
  const CVector truth = (CVector(2) << 1.3, 0.7).finished();
  const CMatrix target = spec->forward(truth);
  const NewtonResult r = newton_invert(*spec, target, CVector::Ones(2));
  EXPECT_TRUE(r.succeeded());
  EXPECT_LT(r.trace.residuals.back(), 1e-9);
  const Complex series = 1.0 / (1.0 / r.parameter(0) + 1.0 / r.parameter(1));
  EXPECT_LT(std::abs(series - 1.3 * 0.7 / 2.0), 1e-9);
  EXPECT_FALSE(uniqueness_test(*spec, r.parameter).holds);
}

TEST(Newton, ResidualsNeverIncreaseAndIteratesStayAdmissible) {
  Random rng(60);
  const Graph g = framed_square();
  const SpecPtr spec = make_spec_conductivity(g, 1);
  const CVector truth = symmetric_field_parameters(rng, 1, g.num_edges(), true);
  const CVector p0 = CVector::Ones(g.num_edges());
  const NewtonResult r = newton_invert(*spec, spec->forward(truth), p0);
  for (std::size_t k = 1; k < r.trace.residuals.size(); ++k)
    EXPECT_LE(r.trace.residuals[k], r.trace.residuals[k - 1]);
  for (const CVector& p : r.trace.iterates) EXPECT_TRUE(spec->admissible(p));
}

TEST(Newton, NoisyTargetStopsAtStationaryPoint) {
  Random rng(61);
  const SpecPtr spec = make_spec_conductivity(star3(), 1);
  const CVector truth = rng.rvector(3, 0.5, 2.0).cast<Complex>();
  CMatrix target = spec->forward(truth);
  const CMatrix noise = rng.rmatrix(3, 3).cast<Complex>();
  target += 1e-3 * (noise + noise.transpose());
  const NewtonResult r = newton_invert(*spec, target, CVector::Ones(3));
  EXPECT_TRUE(r.succeeded());
  EXPECT_GT(r.trace.residuals.back(), 1e-6);
  // gradient of the squared residual vanishes
  const CMatrix jac = jacobian(*spec, r.parameter);
  const CVector res = vec(CMatrix(spec->forward(r.parameter) - target));
  EXPECT_LT((jac.adjoint() * res).norm(), 1e-8);
}

TEST(Newton, Errors) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  EXPECT_THROW(newton_invert(*spec, CMatrix::Zero(2, 2), scalar(-1.0)), InadmissibleParameter);
  EXPECT_THROW(newton_invert(*spec, CMatrix::Zero(3, 3), scalar(1.0)), InvalidArgument);
  NewtonOptions opts;
  opts.max_iterations = 0;
  const NewtonResult r = newton_invert(*spec, spec->forward(scalar(2.0)), scalar(1.0), opts);
  EXPECT_EQ(r.trace.status, NewtonStatus::IterationLimit);
  EXPECT_EQ(to_string(NewtonStatus::StepCollapse), "step_collapse");
}

TEST(LineScan, SingleEdgeIsAlwaysInjective) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  ScanOptions opts;
  opts.samples = 200;
  const ScanResult r = line_rank_scan(*spec, scalar(1.0), scalar(0.5), opts);
  EXPECT_NEAR(r.t_min, -2.0, 1e-12);
  EXPECT_NEAR(r.t_max, 10.0, 1e-12);
  ASSERT_EQ(r.samples.size(), 200u);
  for (const auto& s : r.samples) {
    EXPECT_NEAR(s.ratio, 1.0, 1e-12);
    EXPECT_GE(s.t, r.t_min);
    EXPECT_LE(s.t, r.t_max);
  }
  EXPECT_EQ(r.singular_fraction(), 0.0);
}

TEST(LineScan, InjectiveSpecHasFewSingularSamples) {
  Random rng(62);
  const SpecPtr spec = make_spec_conductivity(star3(), 1);
  const CVector p = rng.rvector(3, 0.5, 2.0).cast<Complex>();
  const CVector dp = rng.rvector(3).cast<Complex>();
  ScanOptions opts;
  opts.seed = 7;
  const ScanResult r = line_rank_scan(*spec, p, dp, opts);
  EXPECT_LE(r.singular_fraction(), 0.01);
  const ScanResult again = line_rank_scan(*spec, p, dp, opts);
  EXPECT_EQ(again.samples.front().t, r.samples.front().t);
}

TEST(LineScan, Errors) {
  const SpecPtr spec = make_spec_conductivity(single_edge(), 1);
  EXPECT_THROW(line_rank_scan(*spec, scalar(1.0), scalar(0.0)), InvalidArgument);
  EXPECT_THROW(line_rank_scan(*spec, scalar(-1.0), scalar(1.0)), InadmissibleParameter);
}
