#include "netinv/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netinv {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::PdSigma: return "PD_sigma";
    case Regime::PdQ: return "PD_q";
    case Regime::PsdReal: return "PSD_real";
    case Regime::PsdCommuting: return "PSD_commuting";
    case Regime::Unsupported: return "Unsupported";
  }
  return "?";
}

std::string to_string(DtnFormula f) {
  return f == DtnFormula::SchurComplement ? "schur_complement"
                                          : "projected_schur_complement";
}

namespace {

double pd_tol(const CMatrix& a) { return 1e-10 * (1.0 + inf_norm(a)); }

bool negligible(const CMatrix& a, double scale) {
  return a.size() == 0 || a.cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + scale);
}

CMatrix reduced_interior(const BlockOperator& op,
                         const std::optional<RMatrix>& q_basis) {
  if (!q_basis) return op.ii();
  const CMatrix q = q_basis->cast<Complex>();
  return q.transpose() * op.ii() * q;
}

}  // namespace

DirichletRegime classify_regime(const Graph& g, const MatrixEdgeField& sigma,
                                const MatrixNodeField& q) {
  DirichletRegime out;
  if (sigma.size() != g.num_edges() || q.size() != g.num_vertices() ||
      sigma.dim() != q.dim())
    throw InvalidArgument("classify_regime: fields do not match graph");

  out.sigma_real_min = std::numeric_limits<double>::infinity();
  bool sigma_pd = true;
  bool sigma_psd = true;
  bool sigma_nonzero = true;
  bool sigma_real = true;
  for (int e = 0; e < sigma.size(); ++e) {
    const CMatrix re = sigma[e].real().cast<Complex>();
    const double lmin = min_eigenvalue(re);
    out.sigma_real_min = std::min(out.sigma_real_min, lmin);
    sigma_pd = sigma_pd && lmin > pd_tol(re);
    sigma_psd = sigma_psd && lmin > -pd_tol(re);
    sigma_nonzero = sigma_nonzero && !negligible(sigma[e], 0.0);
    sigma_real = sigma_real &&
                 negligible(sigma[e].imag().cast<Complex>(), inf_norm(sigma[e]));
  }

  const BlockOperator lap_real = assemble_laplacian(g, sigma.real_part());
  const CMatrix lii = lap_real.ii();
  out.interior_laplacian_min = min_eigenvalue(lii);

  out.potential_min = std::numeric_limits<double>::infinity();
  bool q_interior_pd = true;
  bool q_shifted_pd = true;  // q'(i) + lambda_min(L'_II) > 0
  for (VertexId v : g.interior()) {
    const CMatrix qr = q[v].real().cast<Complex>();
    const double lmin = min_eigenvalue(qr);
    out.potential_min = std::min(out.potential_min, lmin);
    q_interior_pd = q_interior_pd && lmin > pd_tol(qr);
    q_shifted_pd = q_shifted_pd && lmin + out.interior_laplacian_min > pd_tol(qr);
  }
  bool q_zero = true;
  for (int v = 0; v < q.size(); ++v) q_zero = q_zero && negligible(q[v], 0.0);

  if (!is_connected(g)) {
    out.reason = "graph is not connected";
    return out;
  }
  if (!is_interior_connected(g)) {
    out.reason = "interior subgraph is not connected";
    return out;
  }

  if (sigma_pd && q_shifted_pd) {
    out.tag = Regime::PdSigma;
    return out;
  }
  if (q_interior_pd &&
      out.interior_laplacian_min + out.potential_min > pd_tol(lii)) {
    out.tag = Regime::PdQ;
    return out;
  }
  if (!q_zero) {
    out.reason = "potential is nonzero and neither definiteness condition holds";
    return out;
  }
  if (!sigma_nonzero) {
    out.reason = "conductivity vanishes on some edge";
    return out;
  }
  if (!sigma_psd) {
    out.reason = "real part of the conductivity is not positive semidefinite";
    return out;
  }
  if (sigma_real) {
    out.tag = Regime::PsdReal;
    return out;
  }
  try {
    EigenOptions opts;
    opts.allow_mixed_rank = true;
    eigen_decompose(sigma, opts);
    out.tag = Regime::PsdCommuting;
  } catch (const InvalidArgument& err) {
    out.reason = err.what();
  }
  return out;
}

DirichletSolver::DirichletSolver(const Graph& g, BlockOperator op,
                                 std::optional<RMatrix> q_basis)
    : graph_(g),
      op_(std::move(op)),
      q_basis_(std::move(q_basis)),
      factor_(reduced_interior(op_, q_basis_)) {}

DirichletSolver DirichletSolver::positive_definite(const Graph& g,
                                                   const MatrixEdgeField& sigma,
                                                   const MatrixNodeField& q) {
  return DirichletSolver(g, assemble_schrodinger(g, sigma, q), std::nullopt);
}

DirichletSolver DirichletSolver::projected(const Graph& g,
                                           const MatrixEdgeField& sigma,
                                           const RMatrix& q_basis) {
  BlockOperator op = assemble_laplacian(g, sigma);
  if (q_basis.rows() != op.interior_size())
    throw InvalidArgument("Q basis does not match the interior size");
  return DirichletSolver(g, std::move(op), q_basis);
}

CMatrix DirichletSolver::interior_map() const {
  if (!q_basis_) return -factor_.solve(CMatrix(op_.ib()));
  const CMatrix q = q_basis_->cast<Complex>();
  return -q * factor_.solve(CMatrix(q.transpose() * op_.ib()));
}

CMatrix DirichletSolver::solution_operator() const {
  const Index nb = op_.boundary_size();
  const Index ni = op_.interior_size();
  const int d = op_.block_dim();
  CMatrix partitioned(nb + ni, nb);
  partitioned.topRows(nb).setIdentity();
  partitioned.bottomRows(ni) = interior_map();
  CMatrix natural(nb + ni, nb);
  for (int k = 0; k < graph_.num_vertices(); ++k)
    natural.middleRows(static_cast<Index>(graph_.vertex_at(k)) * d, d) =
        partitioned.middleRows(static_cast<Index>(k) * d, d);
  return natural;
}

CVector DirichletSolver::solve(const CVector& boundary_values) const {
  if (boundary_values.size() != op_.boundary_size())
    throw InvalidArgument("boundary data has wrong length");
  return solution_operator() * boundary_values;
}

DtnMap DirichletSolver::dtn() const {
  return {op_.bb() + op_.bi() * interior_map(), formula()};
}

double interior_residual(const Graph& g, const BlockOperator& op,
                         const CVector& u_natural) {
  const CVector u = to_partitioned(g, op.block_dim(), u_natural);
  return (op.matrix() * u).tail(op.interior_size()).norm();
}

VectorNodeField solve_dirichlet_pd(const Graph& g, const MatrixEdgeField& sigma,
                                   const MatrixNodeField& q,
                                   const CVector& boundary_values) {
  const auto solver = DirichletSolver::positive_definite(g, sigma, q);
  return VectorNodeField(sigma.dim(), solver.solve(boundary_values));
}

DtnMap dtn_pd(const Graph& g, const MatrixEdgeField& sigma,
              const MatrixNodeField& q) {
  return DirichletSolver::positive_definite(g, sigma, q).dtn();
}

FloppyBasis floppy_basis(const Graph& g, const MatrixEdgeField& sigma) {
  const int d = sigma.dim();
  const BlockOperator lap = assemble_laplacian(g, sigma.real_part());
  const RMatrix lii = lap.ii().real();
  const RangeSplit split = split_range_null(lii, 1e-10);
  FloppyBasis out{d, RMatrix::Zero(static_cast<Index>(d) * g.num_vertices(),
                                   split.null.cols())};
  for (int k = 0; k < g.num_interior(); ++k) {
    const VertexId v = g.interior()[k];
    out.modes.middleRows(static_cast<Index>(v) * d, d) =
        split.null.middleRows(static_cast<Index>(k) * d, d);
  }
  return out;
}

QBasis q_basis(const Graph& g, const EigenData& eig) {
  if (eig.num_edges() != g.num_edges())
    throw InvalidArgument("eigen data does not match graph");
  std::vector<CMatrix> projectors;
  projectors.reserve(eig.x.size());
  for (const auto& x : eig.x)
    projectors.push_back((x * x.transpose()).cast<Complex>());
  const BlockOperator lap =
      assemble_laplacian(g, MatrixEdgeField(eig.d, std::move(projectors)));
  return {split_range_null(lap.ii().real(), 1e-10).range};
}

VectorNodeField solve_dirichlet_psd(const Graph& g, const MatrixEdgeField& sigma,
                                    const CVector& boundary_values) {
  EigenOptions opts;
  opts.allow_mixed_rank = true;
  const EigenData eig = eigen_decompose(sigma, opts);
  const auto solver = DirichletSolver::projected(g, sigma, q_basis(g, eig).q);
  CVector u = solver.solve(boundary_values);
  const double residual = interior_residual(g, solver.op(), u);
  const double scale = std::max(1.0, inf_norm(solver.op().matrix()));
  if (residual > 1e-9 * (1.0 + boundary_values.norm()) * scale)
    throw SingularSystem("Dirichlet system is inconsistent (residual " +
                         std::to_string(residual) + ")");
  return VectorNodeField(sigma.dim(), std::move(u));
}

DtnMap dtn_psd(const Graph& g, const MatrixEdgeField& sigma, const EigenData& eig) {
  return DirichletSolver::projected(g, sigma, q_basis(g, eig).q).dtn();
}

}  // namespace netinv
