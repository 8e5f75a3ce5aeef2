#include "netinv/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netinv/dense.hpp"

namespace netinv {

CVector to_partitioned(const Graph& g, int d, const CVector& natural) {
  if (natural.size() != static_cast<Index>(d) * g.num_vertices())
    throw InvalidArgument("vertex vector has wrong length");
  CVector out(natural.size());
  for (int k = 0; k < g.num_vertices(); ++k)
    out.segment(k * d, d) = natural.segment(g.vertex_at(k) * d, d);
  return out;
}

CVector to_natural(const Graph& g, int d, const CVector& partitioned) {
  if (partitioned.size() != static_cast<Index>(d) * g.num_vertices())
    throw InvalidArgument("vertex vector has wrong length");
  CVector out(partitioned.size());
  for (int k = 0; k < g.num_vertices(); ++k)
    out.segment(g.vertex_at(k) * d, d) = partitioned.segment(k * d, d);
  return out;
}

BlockOperator::BlockOperator(const Graph& g, int d, CMatrix partitioned)
    : d_(d),
      nb_(static_cast<Index>(d) * g.num_boundary()),
      ni_(static_cast<Index>(d) * g.num_interior()),
      m_(std::move(partitioned)) {
  const Index n = static_cast<Index>(d) * g.num_vertices();
  if (m_.rows() != n || m_.cols() != n)
    throw InvalidArgument("block operator has wrong size");
  order_.reserve(g.num_vertices());
  for (int k = 0; k < g.num_vertices(); ++k) order_.push_back(g.vertex_at(k));
}

CMatrix BlockOperator::natural_order() const {
  CMatrix out(m_.rows(), m_.cols());
  const auto nv = static_cast<int>(order_.size());
  for (int a = 0; a < nv; ++a)
    for (int b = 0; b < nv; ++b)
      out.block(order_[a] * d_, order_[b] * d_, d_, d_) =
          m_.block(a * d_, b * d_, d_, d_);
  return out;
}

VectorEdgeField gradient_apply(const Graph& g, const VectorNodeField& u) {
  if (u.size() != g.num_vertices())
    throw InvalidArgument("gradient: field does not match graph");
  const int d = u.dim();
  CVector out(static_cast<Index>(d) * g.num_edges());
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    out.segment(k * d, d) = u.at(e.tail) - u.at(e.head);
  }
  return VectorEdgeField(d, std::move(out));
}

CMatrix gradient_matrix(const Graph& g, int d) {
  CMatrix grad = CMatrix::Zero(static_cast<Index>(d) * g.num_edges(),
                               static_cast<Index>(d) * g.num_vertices());
  const CMatrix id = CMatrix::Identity(d, d);
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    grad.block(k * d, e.tail * d, d, d) = id;
    grad.block(k * d, e.head * d, d, d) = -id;
  }
  return grad;
}

BlockOperator assemble_laplacian(const Graph& g, const MatrixEdgeField& sigma) {
  if (sigma.size() != g.num_edges())
    throw InvalidArgument("conductivity has " + std::to_string(sigma.size()) +
                          " blocks for " + std::to_string(g.num_edges()) +
                          " edges");
  const int d = sigma.dim();
  CMatrix m = CMatrix::Zero(static_cast<Index>(d) * g.num_vertices(),
                            static_cast<Index>(d) * g.num_vertices());
  for (int k = 0; k < g.num_edges(); ++k) {
    const Edge& e = g.edges()[k];
    const Index a = static_cast<Index>(g.position(e.tail)) * d;
    const Index b = static_cast<Index>(g.position(e.head)) * d;
    m.block(a, a, d, d) += sigma[k];
    m.block(b, b, d, d) += sigma[k];
    m.block(a, b, d, d) -= sigma[k];
    m.block(b, a, d, d) -= sigma[k];
  }
  return BlockOperator(g, d, std::move(m));
}

BlockOperator assemble_schrodinger(const Graph& g, const MatrixEdgeField& sigma,
                                   const MatrixNodeField& q) {
  if (q.size() != g.num_vertices())
    throw InvalidArgument("potential does not match graph");
  if (q.dim() != sigma.dim())
    throw InvalidArgument("potential and conductivity block sizes differ");
  const int d = sigma.dim();
  CMatrix m = assemble_laplacian(g, sigma).matrix();
  for (int k = 0; k < g.num_vertices(); ++k)
    m.block(k * d, k * d, d, d) += q[g.vertex_at(k)];
  return BlockOperator(g, d, std::move(m));
}

namespace {

void check_cylinder_weights(int k, const Graph& base,
                            const std::vector<RVector>& layer_weights,
                            const std::vector<RVector>& coupling_weights) {
  if (k < 1) throw InvalidArgument("cylinder needs at least one layer");
  if (static_cast<int>(layer_weights.size()) != k)
    throw InvalidArgument("expected one layer weight vector per layer");
  if (static_cast<int>(coupling_weights.size()) != k - 1)
    throw InvalidArgument("expected k-1 coupling weight vectors");
  for (const auto& s : layer_weights)
    if (s.size() != base.num_edges())
      throw InvalidArgument("layer weights must have |E(G)| entries");
  for (const auto& s : coupling_weights)
    if (s.size() != base.num_vertices())
      throw InvalidArgument("coupling weights must have |V(G)| entries");
}

Graph path_graph(int k) {
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (int j = 0; j + 1 < k; ++j) edges.emplace_back(j, j + 1);
  std::vector<VertexId> boundary{0};
  if (k > 1) boundary.push_back(k - 1);
  return Graph(k, boundary, edges);
}

}  // namespace

CylinderEmbedding cylinder_embed(int k, const Graph& base,
                                 const std::vector<RVector>& layer_weights,
                                 const std::vector<RVector>& coupling_weights) {
  check_cylinder_weights(k, base, layer_weights, coupling_weights);
  const int n = base.num_vertices();
  std::vector<CMatrix> sigma;
  for (const auto& s : coupling_weights)
    sigma.push_back(s.cast<Complex>().asDiagonal().toDenseMatrix());
  std::vector<CMatrix> q;
  for (const auto& s : layer_weights) {
    std::vector<CMatrix> blocks;
    for (Index e = 0; e < s.size(); ++e)
      blocks.push_back(CMatrix::Constant(1, 1, s(e)));
    q.push_back(assemble_laplacian(base, MatrixEdgeField(1, blocks)).natural_order());
  }
  return {path_graph(k), MatrixEdgeField(n, std::move(sigma)),
          MatrixNodeField(n, std::move(q))};
}

CylinderGraph cylinder_graph(int k, const Graph& base,
                             const std::vector<RVector>& layer_weights,
                             const std::vector<RVector>& coupling_weights) {
  check_cylinder_weights(k, base, layer_weights, coupling_weights);
  const int n = base.num_vertices();
  std::vector<std::pair<VertexId, VertexId>> edges;
  std::vector<double> w;
  for (int j = 0; j < k; ++j) {
    for (int e = 0; e < base.num_edges(); ++e) {
      const Edge& be = base.edges()[e];
      edges.emplace_back(cylinder_vertex(j, be.tail, n),
                         cylinder_vertex(j, be.head, n));
      w.push_back(layer_weights[j](e));
    }
  }
  for (int j = 0; j + 1 < k; ++j) {
    for (VertexId v = 0; v < n; ++v) {
      edges.emplace_back(cylinder_vertex(j, v, n), cylinder_vertex(j + 1, v, n));
      w.push_back(coupling_weights[j](v));
    }
  }
  std::vector<VertexId> boundary;
  for (VertexId v = 0; v < n; ++v) boundary.push_back(cylinder_vertex(0, v, n));
  if (k > 1)
    for (VertexId v = 0; v < n; ++v)
      boundary.push_back(cylinder_vertex(k - 1, v, n));
  return {Graph(k * n, boundary, edges),
          Eigen::Map<RVector>(w.data(), static_cast<Index>(w.size()))};
}

int EigenData::uniform_rank() const {
  if (x.empty()) return 0;
  const Index r = x.front().cols();
  for (const auto& xe : x)
    if (xe.cols() != r) return -1;
  return static_cast<int>(r);
}

Index EigenData::parameter_count() const {
  Index total = 0;
  for (const auto& xe : x) total += xe.cols();
  return total;
}

MatrixEdgeField EigenData::reconstruct() const {
  return conductivity(stacked_lambda());
}

CVector EigenData::stacked_lambda() const {
  CVector out(parameter_count());
  Index k = 0;
  for (const auto& l : lambda) {
    out.segment(k, l.size()) = l;
    k += l.size();
  }
  return out;
}

MatrixEdgeField EigenData::conductivity(const CVector& stacked) const {
  if (stacked.size() != parameter_count())
    throw InvalidArgument("eigenvalue vector has wrong length");
  std::vector<CMatrix> blocks;
  blocks.reserve(x.size());
  Index k = 0;
  for (const auto& xe : x) {
    const CMatrix xc = xe.cast<Complex>();
    blocks.push_back(xc * stacked.segment(k, xe.cols()).asDiagonal() *
                     xc.transpose());
    k += xe.cols();
  }
  return MatrixEdgeField(d, std::move(blocks));
}

EigenData eigen_decompose(const MatrixEdgeField& sigma,
                          const EigenOptions& options) {
  EigenData out;
  out.d = sigma.dim();
  for (int e = 0; e < sigma.size(); ++e) {
    const RMatrix re = sigma[e].real();
    const RMatrix im = sigma[e].imag();
    const std::string where = " on edge " + std::to_string(e);

    const double commutator = (re * im - im * re).norm();
    if (commutator > options.commute_tol * re.norm() * im.norm())
      throw InvalidArgument("real and imaginary parts do not commute" + where);

    Eigen::SelfAdjointEigenSolver<RMatrix> es(re);
    const RVector& vals = es.eigenvalues();
    const double top = vals.cwiseAbs().maxCoeff();
    if (top == 0.0) throw InvalidArgument("zero real part" + where);
    if (vals(0) < -options.rank_tol * top)
      throw InvalidArgument("real part is not positive semidefinite" + where);

    std::vector<Index> keep;
    for (Index k = 0; k < vals.size(); ++k)
      if (vals(k) > options.rank_tol * top) keep.push_back(k);
    RMatrix x(re.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      x.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);

    // Within clusters of equal eigenvalues of sigma', rotate so that the
    // imaginary part is diagonal too.
    const double cluster_tol = 1e-8 * top;
    for (Index start = 0; start < x.cols();) {
      Index stop = start + 1;
      while (stop < x.cols() &&
             vals(keep[stop]) - vals(keep[start]) <= cluster_tol)
        ++stop;
      if (stop - start > 1) {
        const RMatrix block = x.middleCols(start, stop - start);
        Eigen::SelfAdjointEigenSolver<RMatrix> inner(block.transpose() * im * block);
        x.middleCols(start, stop - start) = block * inner.eigenvectors();
      }
      start = stop;
    }
    fix_column_signs(x);

    const RMatrix projector = x * x.transpose();
    const RMatrix leak = im - im * projector;
    if (leak.norm() > options.commute_tol * (1.0 + im.norm()))
      throw InvalidArgument(
          "nullspace of the real part is not inside the nullspace of the "
          "imaginary part" + where);

    CVector lambda(x.cols());
    for (Index k = 0; k < x.cols(); ++k)
      lambda(k) = Complex(x.col(k).dot(re * x.col(k)), x.col(k).dot(im * x.col(k)));

    out.x.push_back(std::move(x));
    out.lambda.push_back(std::move(lambda));
  }
  if (!options.allow_mixed_rank && out.uniform_rank() < 0)
    throw InvalidArgument("conductivity blocks have different ranks");
  return out;
}

KornConstants korn_constants(const MatrixEdgeField& sigma) {
  KornConstants k{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (int e = 0; e < sigma.size(); ++e) {
    const CMatrix& s = sigma[e];
    if (s.imag().cwiseAbs().maxCoeff() > 1e-10 * (1.0 + inf_norm(s)))
      throw InvalidArgument("Korn constants need a real conductivity");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(RMatrix(s.real()),
                                              Eigen::EigenvaluesOnly);
    const RVector& vals = es.eigenvalues();
    const double top = vals.cwiseAbs().maxCoeff();
    k.lambda_min = std::min(k.lambda_min, vals(0));
    k.lambda_max = std::max(k.lambda_max, vals(vals.size() - 1));
    for (Index i = 0; i < vals.size(); ++i) {
      if (vals(i) > 1e-10 * top) {
        k.lambda_min_positive = std::min(k.lambda_min_positive, vals(i));
        break;
      }
    }
  }
  return k;
}

}  // namespace netinv
