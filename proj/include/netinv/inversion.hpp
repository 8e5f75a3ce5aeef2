#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "netinv/dirichlet.hpp"
#include "netinv/tensor.hpp"

namespace netinv {

/// An inverse problem p -> Lambda_p written in the form the uniqueness and
/// Newton machinery needs: a state map S_p (l x n, one column per boundary
/// basis vector) and a bilinear pairing b with
///   f^T (Lambda_p1 - Lambda_p2) g = b(S_p2 g, S_p1 f)^T (p1 - p2).
/// Implementations are stateless after construction and safe to call from
/// several threads at once.
class ProblemSpec {
 public:
  virtual ~ProblemSpec() = default;

  virtual std::string name() const = 0;
  virtual Index parameter_dim() const = 0;  // m
  virtual Index data_dim() const = 0;       // n = d|B|
  virtual Index state_dim() const = 0;      // l
  /// Parameters restricted to R^m.
  virtual bool is_real() const { return false; }

  virtual bool admissible(const CVector& p) const = 0;
  virtual CMatrix state_map(const CVector& p) const = 0;
  virtual CVector pair(const CVector& x, const CVector& y) const = 0;
  virtual CMatrix forward(const CVector& p) const = 0;

  /// Throws InadmissibleParameter unless p has the right length and is
  /// admissible.
  void require_admissible(const CVector& p, const char* what = "parameter") const;
};

using SpecPtr = std::shared_ptr<const ProblemSpec>;

/// sigma(e) in C^{dxd}, parameters vec(sigma(e)) stacked by edge, q = 0.
/// Admissible: (sigma(e) + sigma(e)^*)/2 > 0 on every edge.
SpecPtr make_spec_conductivity(const Graph& g, int d);

/// q(i) in C^{dxd} with sigma known, parameters vec(q(i)) stacked by vertex.
/// Admissible: lambda_min((q(i) + q(i)^*)/2) > -lambda_min of the Hermitian
/// part of (L_sigma)_II for every interior i.
SpecPtr make_spec_schrodinger(const Graph& g, const MatrixEdgeField& sigma);

/// Parameter vector of a conductivity or potential field.
template <class Site>
CVector field_parameters(const MatrixField<Site>& f) {
  return vec(f);
}

struct ProductMatrix {
  CMatrix w;  // m x n^2
  CVector p1;
  CVector p2;
};

/// Column a + b*n (0-based) is b(S_p1 e_a, S_p2 e_b).
ProductMatrix product_matrix(const ProblemSpec& spec, const CVector& p1,
                             const CVector& p2, int threads = 1);

/// W(p,p)^T: the derivative of vec(Lambda) (column stacking), n^2 x m.
CMatrix jacobian(const ProblemSpec& spec, const CVector& p, int threads = 1);

enum class FdDirection { Real, Imaginary };

/// Central differences (F(p + h e_k) - F(p - h e_k)) / 2h. With the
/// imaginary direction the step is i*h and the quotient is divided by i, so
/// both directions estimate the same complex derivative.
CMatrix fd_jacobian(const ProblemSpec& spec, const CVector& p, double h,
                    FdDirection direction = FdDirection::Real, int threads = 1);

struct UniquenessVerdict {
  double sigma_max = 0;
  double sigma_min = 0;  // 0 when m > n^2
  double epsilon = 1e-8;
  bool holds = false;
};

UniquenessVerdict uniqueness_from_matrix(const CMatrix& w, double epsilon = 1e-8);
UniquenessVerdict uniqueness_test(const ProblemSpec& spec, const CVector& p,
                                  double epsilon = 1e-8, int threads = 1);

enum class NewtonStatus {
  Converged,       // residual <= residual_tol (1 + ||target||)
  Stationary,      // step or predicted decrease negligible
  IterationLimit,
  StepCollapse,    // line search went below min_step_length
};

std::string to_string(NewtonStatus s);

struct NewtonOptions {
  int max_iterations = 100;
  double residual_tol = 1e-10;
  double step_tol = 1e-12;
  double armijo = 1e-4;
  double min_step_length = 1e-12;
  double svd_cutoff = 1e-12;
  int threads = 1;
};

struct NewtonTrace {
  std::vector<CVector> iterates;
  std::vector<double> residuals;     // ||vec(Lambda_p - Lambda_target)||_2
  std::vector<double> step_lengths;  // t_k of each accepted step
  NewtonStatus status = NewtonStatus::IterationLimit;
};

struct NewtonResult {
  CVector parameter;
  NewtonTrace trace;

  bool succeeded() const {
    return trace.status == NewtonStatus::Converged ||
           trace.status == NewtonStatus::Stationary;
  }
};

/// Gauss-Newton with minimal-norm least-squares steps
///   J dp = vec(Lambda_target - Lambda_p),
/// backtracking on ||residual||^2 and halving until p + t dp is admissible.
NewtonResult newton_invert(const ProblemSpec& spec, const CMatrix& target,
                           const CVector& p0, const NewtonOptions& options = {});

struct ScanOptions {
  int samples = 1000;
  double epsilon = 1e-8;
  double t_limit = 10.0;  // the segment is clipped to [-t_limit, t_limit]
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ScanSample {
  double t;
  double ratio;  // sigma_min / sigma_max of W(p + t dp, p + t dp)
};

struct ScanResult {
  double t_min = 0;
  double t_max = 0;
  std::vector<ScanSample> samples;

  double singular_fraction(double epsilon = 1e-8) const;
};

/// Samples t uniformly on the admissible part of p + t dp (found by
/// bisection, using convexity of the admissible set).
ScanResult line_rank_scan(const ProblemSpec& spec, const CVector& p,
                          const CVector& dp, const ScanOptions& options = {});

}  // namespace netinv
