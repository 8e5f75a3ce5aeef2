#pragma once

#include <optional>
#include <string>

#include "netinv/dense.hpp"
#include "netinv/operators.hpp"

namespace netinv {

/// Which well-posedness result covers a (graph, sigma, q) triple.
enum class Regime {
  PdSigma,       // sigma' > 0 and q_I' > -lambda_min((L_sigma')_II)
  PdQ,           // q_I' > 0 and (L_sigma')_II > -lambda_min(diag(q_I'))
  PsdReal,       // q = 0, sigma' >= 0, sigma'' = 0
  PsdCommuting,  // q = 0, sigma' >= 0, sigma'' commutes, N(sigma') in N(sigma'')
  Unsupported,
};

std::string to_string(Regime r);

inline bool is_positive_definite(Regime r) {
  return r == Regime::PdSigma || r == Regime::PdQ;
}
inline bool is_semidefinite(Regime r) {
  return r == Regime::PsdReal || r == Regime::PsdCommuting;
}

struct DirichletRegime {
  Regime tag = Regime::Unsupported;
  double sigma_real_min = 0;          // min over edges of lambda_min(sigma'(e))
  double interior_laplacian_min = 0;  // lambda_min((L_sigma')_II)
  double potential_min = 0;           // min over interior of lambda_min(q'(i))
  std::string reason;                 // set when Unsupported
};

/// First matching regime in the order PdSigma, PdQ, PsdReal, PsdCommuting.
/// Positive (semi)definiteness uses lambda_min > +/- 1e-10 (1 + ||A||).
DirichletRegime classify_regime(const Graph& g, const MatrixEdgeField& sigma,
                                const MatrixNodeField& q);

enum class DtnFormula {
  SchurComplement,           // L_BB + q_B - L_BI (L_II + q_I)^-1 L_IB
  ProjectedSchurComplement,  // L_BB - L_BI Q (Q^T L_II Q)^-1 Q^T L_IB
};

std::string to_string(DtnFormula f);

struct DtnMap {
  CMatrix matrix;
  DtnFormula provenance = DtnFormula::SchurComplement;

  /// max |Lambda - Lambda^T|.
  double symmetry_residual() const {
    return matrix.size() == 0 ? 0.0
                              : (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  }
};

/// Factored Dirichlet problem for a fixed (sigma, q). Boundary data is a
/// d|B| vector in boundary order; solutions are d|V| vectors in natural
/// vertex order. Immutable, so one instance can serve concurrent solves.
class DirichletSolver {
 public:
  /// Unique-solution regimes: factors L_II + diag(q_I).
  static DirichletSolver positive_definite(const Graph& g,
                                           const MatrixEdgeField& sigma,
                                           const MatrixNodeField& q);
  /// q = 0 with rank-deficient sigma: factors Q^T L_II Q, where Q has
  /// orthonormal columns spanning the range of L_II. Returns the
  /// representative with no floppy-mode component.
  static DirichletSolver projected(const Graph& g, const MatrixEdgeField& sigma,
                                   const RMatrix& q_basis);

  const BlockOperator& op() const { return op_; }
  DtnFormula formula() const {
    return q_basis_ ? DtnFormula::ProjectedSchurComplement
                    : DtnFormula::SchurComplement;
  }

  /// d|V| x d|B| map from boundary data to the full solution.
  CMatrix solution_operator() const;
  CVector solve(const CVector& boundary_values) const;
  DtnMap dtn() const;

 private:
  DirichletSolver(const Graph& g, BlockOperator op,
                  std::optional<RMatrix> q_basis);

  // u_I = interior_map() * g (partitioned interior order).
  CMatrix interior_map() const;

  Graph graph_;
  BlockOperator op_;
  std::optional<RMatrix> q_basis_;
  SymmetricSolver factor_;
};

/// ||((L_sigma + diag q) u)_I||_2 for u in natural order.
double interior_residual(const Graph& g, const BlockOperator& op,
                         const CVector& u_natural);

VectorNodeField solve_dirichlet_pd(const Graph& g, const MatrixEdgeField& sigma,
                                   const MatrixNodeField& q,
                                   const CVector& boundary_values);

DtnMap dtn_pd(const Graph& g, const MatrixEdgeField& sigma,
              const MatrixNodeField& q);

/// Orthonormal real basis of the floppy modes (z_B = 0, z_I in the
/// nullspace of (L_sigma)_II), as columns of a d|V| x f matrix in natural
/// vertex order.
struct FloppyBasis {
  int d = 1;
  RMatrix modes;

  int dimension() const { return static_cast<int>(modes.cols()); }
  VectorNodeField mode(int k) const {
    return VectorNodeField(d, modes.col(k).cast<Complex>());
  }
};

FloppyBasis floppy_basis(const Graph& g, const MatrixEdgeField& sigma);

/// Real Q with orthonormal columns, R(Q) = R((L_sigma)_II); rows follow the
/// partitioned interior order. Built from the eigenvectors only.
struct QBasis {
  RMatrix q;
};

QBasis q_basis(const Graph& g, const EigenData& eig);

/// Minimal-norm solution of the rank-deficient Dirichlet problem.
VectorNodeField solve_dirichlet_psd(const Graph& g, const MatrixEdgeField& sigma,
                                    const CVector& boundary_values);

DtnMap dtn_psd(const Graph& g, const MatrixEdgeField& sigma, const EigenData& eig);

}  // namespace netinv
