#include "netinv/tensor.hpp"

namespace netinv {

CVector vec(const CMatrix& a) {
  return Eigen::Map<const CVector>(a.data(), a.size());
}

CMatrix unvec(const CVector& v, Index rows, Index cols) {
  if (v.size() != rows * cols)
    throw InvalidArgument("unvec: length does not match shape");
  return Eigen::Map<const CMatrix>(v.data(), rows, cols);
}

CVector hadamard(const CVector& a, const CVector& b) {
  if (a.size() != b.size())
    throw InvalidArgument("hadamard: length mismatch");
  return a.cwiseProduct(b);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace netinv
