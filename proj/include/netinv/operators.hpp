#pragma once

#include <vector>

#include "netinv/fields.hpp"
#include "netinv/graph.hpp"

namespace netinv {

/// Reorder a vertex-major vector from natural (id) order to the graph's
/// partitioned order (boundary first), and back.
CVector to_partitioned(const Graph& g, int d, const CVector& natural);
CVector to_natural(const Graph& g, int d, const CVector& partitioned);

/// Square d|V| x d|V| operator stored in partitioned vertex order so that
/// the boundary/interior sub-blocks are contiguous.
class BlockOperator {
 public:
  BlockOperator(const Graph& g, int d, CMatrix partitioned);

  int block_dim() const { return d_; }
  Index boundary_size() const { return nb_; }
  Index interior_size() const { return ni_; }
  const CMatrix& matrix() const { return m_; }

  auto bb() const { return m_.topLeftCorner(nb_, nb_); }
  auto bi() const { return m_.topRightCorner(nb_, ni_); }
  auto ib() const { return m_.bottomLeftCorner(ni_, nb_); }
  auto ii() const { return m_.bottomRightCorner(ni_, ni_); }

  /// The same operator with rows/columns in natural vertex order.
  CMatrix natural_order() const;

 private:
  int d_;
  Index nb_;
  Index ni_;
  std::vector<VertexId> order_;
  CMatrix m_;
};

/// (grad u)({i,j}) = u(i) - u(j), with i < j.
VectorEdgeField gradient_apply(const Graph& g, const VectorNodeField& u);

/// Matrix of the gradient, d|E| x d|V|, natural vertex order.
CMatrix gradient_matrix(const Graph& g, int d);

/// L_sigma = grad^T diag(sigma) grad.
BlockOperator assemble_laplacian(const Graph& g, const MatrixEdgeField& sigma);

/// L_sigma + diag(q).
BlockOperator assemble_schrodinger(const Graph& g, const MatrixEdgeField& sigma,
                                   const MatrixNodeField& q);

// ---------------------------------------------------------------------------
// Cylinder graphs P_k x G seen as a matrix Schrodinger operator on P_k.
//
// Cylinder vertex (layer j, base vertex v) has id j*|V(G)| + v. With that
// numbering the natural-order matrix of L_sigma + diag(q) on P_k (block j,
// component v) coincides entry for entry with the natural-order scalar
// Laplacian on the cylinder, i.e. the permutation between the two is the
// identity on natural orders.

struct CylinderEmbedding {
  Graph path;
  MatrixEdgeField sigma;
  MatrixNodeField q;
};

/// `layer_weights` holds k vectors of |E(G)| weights (one per copy of G),
/// `coupling_weights` holds k-1 vectors of |V(G)| weights linking layer j
/// to layer j+1.
CylinderEmbedding cylinder_embed(int k, const Graph& base,
                                 const std::vector<RVector>& layer_weights,
                                 const std::vector<RVector>& coupling_weights);

struct CylinderGraph {
  Graph graph;
  RVector weights;  // scalar conductivity, in graph edge order
};

/// The scalar cylinder graph itself (boundary: first and last layers).
CylinderGraph cylinder_graph(int k, const Graph& base,
                             const std::vector<RVector>& layer_weights,
                             const std::vector<RVector>& coupling_weights);

inline VertexId cylinder_vertex(int layer, VertexId v, int base_size) {
  return layer * base_size + v;
}

// ---------------------------------------------------------------------------
// Eigendecomposition sigma(e) = x(e) diag(lambda(e)) x(e)^T.

struct EigenData {
  int d = 1;
  std::vector<RMatrix> x;       // d x r(e), orthonormal columns
  std::vector<CVector> lambda;  // r(e) eigenvalues, real part > 0

  int num_edges() const { return static_cast<int>(x.size()); }
  /// Common rank of all edges, or -1 when ranks differ.
  int uniform_rank() const;
  /// Total number of eigenvalues, sum of r(e).
  Index parameter_count() const;
  MatrixEdgeField reconstruct() const;
  /// Eigenvalues stacked edge by edge.
  CVector stacked_lambda() const;
  /// Same eigenvectors, new stacked eigenvalues.
  MatrixEdgeField conductivity(const CVector& stacked_lambda) const;
};

struct EigenOptions {
  double rank_tol = 1e-10;     // relative to the largest eigenvalue of sigma'
  double commute_tol = 1e-10;  // ||s's'' - s''s'|| <= tol ||s'|| ||s''||
  bool allow_mixed_rank = false;
};

/// Requires sigma' >= 0 and, per edge, sigma'' commuting with sigma' with
/// N(sigma') inside N(sigma''). Eigenvalues of sigma' ascend; each
/// eigenvector's first nonzero entry is positive.
EigenData eigen_decompose(const MatrixEdgeField& sigma,
                          const EigenOptions& options = {});

struct KornConstants {
  double lambda_min;           // min over edges of the smallest eigenvalue
  double lambda_min_positive;  // smallest positive eigenvalue over edges
  double lambda_max;           // largest eigenvalue over edges
};

/// Extremal eigenvalues of a real conductivity.
KornConstants korn_constants(const MatrixEdgeField& sigma);

}  // namespace netinv
