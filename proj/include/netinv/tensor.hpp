#pragma once

#include "netinv/fields.hpp"

namespace netinv {

/// Column-major stacking of a matrix.
CVector vec(const CMatrix& a);

/// Concatenation of the per-site vecs, in site order.
template <class Site>
CVector vec(const MatrixField<Site>& f) {
  const Index block = static_cast<Index>(f.dim()) * f.dim();
  CVector out(block * f.size());
  for (int k = 0; k < f.size(); ++k)
    out.segment(k * block, block) = vec(f[k]);
  return out;
}

/// Inverse of vec for an m x n matrix.
CMatrix unvec(const CVector& v, Index rows, Index cols);

/// Inverse of vec for a field of d x d blocks.
template <class Site>
MatrixField<Site> unvec_field(const CVector& v, int d) {
  const Index block = static_cast<Index>(d) * d;
  if (v.size() % block != 0)
    throw InvalidArgument("vector length is not a multiple of d*d");
  std::vector<CMatrix> blocks;
  blocks.reserve(v.size() / block);
  for (Index k = 0; k < v.size() / block; ++k)
    blocks.push_back(unvec(v.segment(k * block, block), d, d));
  return MatrixField<Site>(d, std::move(blocks));
}

/// Site-wise outer product (u o v)(x) = u(x) v(x)^T.
template <class Site>
MatrixField<Site> outer(const VectorField<Site>& u, const VectorField<Site>& v) {
  if (u.dim() != v.dim() || u.size() != v.size())
    throw InvalidArgument("outer: dimension mismatch");
  std::vector<CMatrix> blocks;
  blocks.reserve(u.size());
  for (int k = 0; k < u.size(); ++k)
    blocks.push_back(u.at(k) * v.at(k).transpose());
  return MatrixField<Site>(u.dim(), std::move(blocks));
}

/// Componentwise product.
CVector hadamard(const CVector& a, const CVector& b);

/// Kronecker product, (A kron B) = [A_ij B].
CMatrix kron(const CMatrix& a, const CMatrix& b);

}  // namespace netinv
