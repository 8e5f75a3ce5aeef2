#pragma once

#include <vector>

#include "netinv/types.hpp"

namespace netinv {

/// Factorization of a square complex matrix for repeated solves.
///
/// Complex symmetric input (A^T = A, not Hermitian) is factored with
/// Bunch-Kaufman pivoting (LAPACK zsytrf), which keeps the symmetric
/// structure. Anything else falls back to partial-pivot LU. The object is
/// immutable after construction and may be shared across threads.
class SymmetricSolver {
 public:
  explicit SymmetricSolver(const CMatrix& a);

  Index size() const { return n_; }
  bool used_symmetric_path() const { return symmetric_; }
  /// Estimate of the reciprocal 1-norm condition number.
  double rcond() const { return rcond_; }

  CMatrix solve(const CMatrix& rhs) const;
  CVector solve(const CVector& rhs) const;

 private:
  Index n_ = 0;
  bool symmetric_ = true;
  double rcond_ = 1.0;
  CMatrix factor_;
  std::vector<int> pivots_;
  Eigen::PartialPivLU<CMatrix> lu_;
};

/// (A + A^*)/2.
inline CMatrix hermitian_part(const CMatrix& a) {
  return 0.5 * (a + a.adjoint());
}

/// Smallest eigenvalue of a Hermitian matrix (+inf for an empty matrix).
double min_eigenvalue(const CMatrix& hermitian);
/// Largest eigenvalue of a Hermitian matrix (-inf for an empty matrix).
double max_eigenvalue(const CMatrix& hermitian);

/// Orthonormal bases of the range and nullspace of a real symmetric
/// positive semidefinite matrix. Eigenvalues at or below
/// rel_tol * max(|eigenvalue|) count as zero.
struct RangeSplit {
  RMatrix range;
  RMatrix null;
};
RangeSplit split_range_null(const RMatrix& psd, double rel_tol);

/// Make each column's first entry with |x| > 1e-12 positive.
void fix_column_signs(RMatrix& columns);

}  // namespace netinv
