#include "netinv/dense.hpp"

#include <cmath>
#include <limits>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "netinv/fields.hpp"

namespace netinv {

namespace {

constexpr double kSingularRcond = 64 * std::numeric_limits<double>::epsilon();

double one_norm(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

}  // namespace

SymmetricSolver::SymmetricSolver(const CMatrix& a) : n_(a.rows()) {
  if (a.rows() != a.cols())
    throw InvalidArgument("SymmetricSolver: matrix is not square");
  if (n_ == 0) return;
  const double anorm = one_norm(a);
  symmetric_ = (a - a.transpose()).cwiseAbs().maxCoeff() <=
               16 * std::numeric_limits<double>::epsilon() * (1.0 + anorm);

  if (symmetric_) {
    factor_ = a;
    pivots_.assign(static_cast<std::size_t>(n_), 0);
    const auto n = static_cast<lapack_int>(n_);
    lapack_int info = LAPACKE_zsytrf(LAPACK_COL_MAJOR, 'L', n, factor_.data(),
                                     n, pivots_.data());
    if (info < 0) throw Error("zsytrf: invalid argument");
    if (info > 0)
      throw SingularSystem("complex symmetric matrix is exactly singular");
    info = LAPACKE_zsycon(LAPACK_COL_MAJOR, 'L', n, factor_.data(), n,
                          pivots_.data(), anorm, &rcond_);
    if (info != 0) throw Error("zsycon failed");
  } else {
    lu_.compute(a);
    rcond_ = lu_.rcond();
  }
  if (!(rcond_ > kSingularRcond))
    throw SingularSystem("matrix is numerically singular (rcond = " +
                         std::to_string(rcond_) + ")");
}

CMatrix SymmetricSolver::solve(const CMatrix& rhs) const {
  if (rhs.rows() != n_) throw InvalidArgument("solve: rhs has wrong length");
  if (n_ == 0 || rhs.cols() == 0) return CMatrix::Zero(n_, rhs.cols());
  if (!symmetric_) return lu_.solve(rhs);
  CMatrix x = rhs;
  const auto n = static_cast<lapack_int>(n_);
  const lapack_int info = LAPACKE_zsytrs(
      LAPACK_COL_MAJOR, 'L', n, static_cast<lapack_int>(x.cols()),
      factor_.data(), n, pivots_.data(), x.data(), n);
  if (info != 0) throw Error("zsytrs failed");
  return x;
}

CVector SymmetricSolver::solve(const CVector& rhs) const {
  return solve(CMatrix(rhs)).col(0);
}

double min_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigenvalue(const CMatrix& hermitian) {
  if (hermitian.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

RangeSplit split_range_null(const RMatrix& psd, double rel_tol) {
  const Index n = psd.rows();
  if (n == 0) return {RMatrix(0, 0), RMatrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<RMatrix> es(psd);
  const RVector& vals = es.eigenvalues();
  const double scale = vals.cwiseAbs().maxCoeff();
  const double cut = rel_tol * scale;
  std::vector<Index> keep;
  std::vector<Index> drop;
  for (Index k = 0; k < n; ++k) (vals(k) > cut ? keep : drop).push_back(k);
  RangeSplit out{RMatrix(n, static_cast<Index>(keep.size())),
                 RMatrix(n, static_cast<Index>(drop.size()))};
  for (std::size_t k = 0; k < keep.size(); ++k)
    out.range.col(static_cast<Index>(k)) = es.eigenvectors().col(keep[k]);
  for (std::size_t k = 0; k < drop.size(); ++k)
    out.null.col(static_cast<Index>(k)) = es.eigenvectors().col(drop[k]);
  fix_column_signs(out.range);
  fix_column_signs(out.null);
  return out;
}

void fix_column_signs(RMatrix& columns) {
  for (Index c = 0; c < columns.cols(); ++c) {
    for (Index r = 0; r < columns.rows(); ++r) {
      if (std::abs(columns(r, c)) > 1e-12) {
        if (columns(r, c) < 0) columns.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace netinv
