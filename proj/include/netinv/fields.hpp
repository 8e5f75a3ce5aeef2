#pragma once

#include <string>
#include <utility>
#include <vector>

#include "netinv/types.hpp"

namespace netinv {

struct EdgeSite {
  static constexpr const char* name = "edge";
};
struct NodeSite {
  static constexpr const char* name = "node";
};

/// Infinity norm (maximum absolute row sum).
inline double inf_norm(const CMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// True when ||A - A^T||_inf <= tol * (1 + ||A||_inf). Plain transpose.
inline bool nearly_symmetric(const CMatrix& a, double tol = 1e-10) {
  return a.rows() == a.cols() &&
         inf_norm(a - a.transpose()) <= tol * (1.0 + inf_norm(a));
}

/// One d x d complex block per site (edge or vertex), in site order.
template <class Site>
class MatrixField {
 public:
  MatrixField() = default;

  MatrixField(int d, std::vector<CMatrix> blocks)
      : d_(d), blocks_(std::move(blocks)) {
    if (d_ <= 0) throw InvalidArgument("block dimension must be positive");
    for (const auto& b : blocks_)
      if (b.rows() != d_ || b.cols() != d_)
        throw InvalidArgument(std::string(Site::name) +
                              " block has wrong shape");
  }

  /// Field of symmetric blocks (A^T = A). Blocks within rounding of
  /// symmetric are accepted and replaced by (A + A^T)/2.
  static MatrixField symmetric(int d, std::vector<CMatrix> blocks) {
    MatrixField f(d, std::move(blocks));
    for (std::size_t k = 0; k < f.blocks_.size(); ++k) {
      CMatrix& a = f.blocks_[k];
      if (!nearly_symmetric(a))
        throw InvalidArgument(std::string(Site::name) + " block " +
                              std::to_string(k) + " is not symmetric");
      a = (0.5 * (a + a.transpose())).eval();
    }
    return f;
  }

  static MatrixField zeros(int d, int count) {
    return MatrixField(d, std::vector<CMatrix>(count, CMatrix::Zero(d, d)));
  }

  static MatrixField scaled_identity(int d, const CVector& scale) {
    std::vector<CMatrix> blocks;
    blocks.reserve(scale.size());
    for (Index k = 0; k < scale.size(); ++k)
      blocks.push_back(scale(k) * CMatrix::Identity(d, d));
    return MatrixField(d, std::move(blocks));
  }

  int dim() const { return d_; }
  int size() const { return static_cast<int>(blocks_.size()); }
  const CMatrix& operator[](int k) const { return blocks_[k]; }
  const std::vector<CMatrix>& blocks() const { return blocks_; }

  MatrixField real_part() const {
    return map([](const CMatrix& a) { return CMatrix(a.real().cast<Complex>()); });
  }
  MatrixField imag_part() const {
    return map([](const CMatrix& a) { return CMatrix(a.imag().cast<Complex>()); });
  }

  bool is_symmetric(double tol = 1e-10) const {
    for (const auto& b : blocks_)
      if (!nearly_symmetric(b, tol)) return false;
    return true;
  }

  template <class F>
  MatrixField map(F&& f) const {
    std::vector<CMatrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(f(b));
    return MatrixField(d_, std::move(out));
  }

  friend MatrixField operator+(const MatrixField& a, const MatrixField& b) {
    return zip(a, b, [](const CMatrix& x, const CMatrix& y) { return CMatrix(x + y); });
  }
  friend MatrixField operator-(const MatrixField& a, const MatrixField& b) {
    return zip(a, b, [](const CMatrix& x, const CMatrix& y) { return CMatrix(x - y); });
  }
  friend MatrixField operator*(Complex s, const MatrixField& a) {
    return a.map([s](const CMatrix& x) { return CMatrix(s * x); });
  }

 private:
  template <class F>
  static MatrixField zip(const MatrixField& a, const MatrixField& b, F&& f) {
    if (a.d_ != b.d_ || a.size() != b.size())
      throw InvalidArgument("field dimension mismatch");
    std::vector<CMatrix> out;
    out.reserve(a.blocks_.size());
    for (std::size_t k = 0; k < a.blocks_.size(); ++k)
      out.push_back(f(a.blocks_[k], b.blocks_[k]));
    return MatrixField(a.d_, std::move(out));
  }

  int d_ = 1;
  std::vector<CMatrix> blocks_;
};

/// One complex d-vector per site, stored contiguously (site-major).
template <class Site>
class VectorField {
 public:
  VectorField() = default;

  VectorField(int d, CVector values) : d_(d), values_(std::move(values)) {
    if (d_ <= 0) throw InvalidArgument("block dimension must be positive");
    if (values_.size() % d_ != 0)
      throw InvalidArgument(std::string(Site::name) +
                            " field length is not a multiple of d");
  }

  static VectorField zeros(int d, int count) {
    return VectorField(d, CVector::Zero(static_cast<Index>(d) * count));
  }

  int dim() const { return d_; }
  int size() const { return static_cast<int>(values_.size() / d_); }
  const CVector& values() const { return values_; }

  auto at(int k) const { return values_.segment(static_cast<Index>(k) * d_, d_); }

 private:
  int d_ = 1;
  CVector values_;
};

using MatrixEdgeField = MatrixField<EdgeSite>;
using MatrixNodeField = MatrixField<NodeSite>;
using VectorEdgeField = VectorField<EdgeSite>;
using VectorNodeField = VectorField<NodeSite>;

}  // namespace netinv
