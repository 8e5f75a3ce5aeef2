#include "netinv/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include <Eigen/SVD>

namespace netinv {

namespace {

// Runs body(k) for k in [0, n). Each worker owns a contiguous range, so the
// result never depends on the thread count as long as body(k) only writes
// slot k.
template <class F>
void parallel_for(Index n, int threads, F&& body) {
  const Index workers = std::clamp<Index>(threads, 1, std::max<Index>(n, 1));
  if (workers == 1) {
    for (Index k = 0; k < n; ++k) body(k);
    return;
  }
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Index w = 0; w < workers; ++w) {
    const Index lo = n * w / workers;
    const Index hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index k = lo; k < hi; ++k) body(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool all_finite(const CVector& p) { return p.allFinite(); }

// Per-site vec(x y^T) for stacked d-vectors.
CVector blockwise_outer(const CVector& x, const CVector& y, int d) {
  if (x.size() != y.size() || x.size() % d != 0)
    throw InvalidArgument("pair: state length mismatch");
  const Index sites = x.size() / d;
  CVector out(sites * d * d);
  for (Index s = 0; s < sites; ++s)
    for (int b = 0; b < d; ++b)
      for (int a = 0; a < d; ++a)
        out(s * d * d + a + static_cast<Index>(b) * d) = x(s * d + a) * y(s * d + b);
  return out;
}

bool hermitian_part_pd(const CMatrix& a) {
  return min_eigenvalue(hermitian_part(a)) > 0.0;
}

class ConductivitySpec final : public ProblemSpec {
 public:
  ConductivitySpec(const Graph& g, int d)
      : g_(g), d_(d), grad_(gradient_matrix(g, d)) {
    if (!is_connected(g)) throw InvalidArgument("conductivity problem needs a connected graph");
  }

  std::string name() const override { return "conductivity"; }
  Index parameter_dim() const override {
    return static_cast<Index>(d_) * d_ * g_.num_edges();
  }
  Index data_dim() const override { return static_cast<Index>(d_) * g_.num_boundary(); }
  Index state_dim() const override { return static_cast<Index>(d_) * g_.num_edges(); }

  bool admissible(const CVector& p) const override {
    if (p.size() != parameter_dim() || !all_finite(p)) return false;
    const auto sigma = unvec_field<EdgeSite>(p, d_);
    for (int e = 0; e < sigma.size(); ++e)
      if (!hermitian_part_pd(sigma[e])) return false;
    return true;
  }

  CMatrix state_map(const CVector& p) const override {
    return grad_ * solver(p).solution_operator();
  }
  CVector pair(const CVector& x, const CVector& y) const override {
    return blockwise_outer(x, y, d_);
  }
  CMatrix forward(const CVector& p) const override { return solver(p).dtn().matrix; }

 private:
  DirichletSolver solver(const CVector& p) const {
    return DirichletSolver::positive_definite(
        g_, unvec_field<EdgeSite>(p, d_),
        MatrixNodeField::zeros(d_, g_.num_vertices()));
  }

  Graph g_;
  int d_;
  CMatrix grad_;
};

class SchrodingerSpec final : public ProblemSpec {
 public:
  SchrodingerSpec(const Graph& g, const MatrixEdgeField& sigma)
      : g_(g), sigma_(sigma) {
    if (sigma.size() != g.num_edges())
      throw InvalidArgument("conductivity does not match graph");
    if (!is_connected(g)) throw InvalidArgument("Schrodinger problem needs a connected graph");
    shift_ = min_eigenvalue(hermitian_part(CMatrix(assemble_laplacian(g, sigma).ii())));
  }

  std::string name() const override { return "schrodinger"; }
  Index parameter_dim() const override {
    return static_cast<Index>(d()) * d() * g_.num_vertices();
  }
  Index data_dim() const override { return static_cast<Index>(d()) * g_.num_boundary(); }
  Index state_dim() const override { return static_cast<Index>(d()) * g_.num_vertices(); }

  bool admissible(const CVector& p) const override {
    if (p.size() != parameter_dim() || !all_finite(p)) return false;
    const auto q = unvec_field<NodeSite>(p, d());
    for (VertexId v : g_.interior())
      if (!(min_eigenvalue(hermitian_part(q[v])) > -shift_)) return false;
    return true;
  }

  CMatrix state_map(const CVector& p) const override {
    return solver(p).solution_operator();
  }
  CVector pair(const CVector& x, const CVector& y) const override {
    return blockwise_outer(x, y, d());
  }
  CMatrix forward(const CVector& p) const override { return solver(p).dtn().matrix; }

 private:
  int d() const { return sigma_.dim(); }
  DirichletSolver solver(const CVector& p) const {
    return DirichletSolver::positive_definite(g_, sigma_, unvec_field<NodeSite>(p, d()));
  }

  Graph g_;
  MatrixEdgeField sigma_;
  double shift_ = 0;
};

CVector min_norm_solve(const CMatrix& j, const CVector& r, double cutoff, bool real) {
  if (real) {
    const Index rows = j.rows();
    RMatrix a(2 * rows, j.cols());
    a.topRows(rows) = j.real();
    a.bottomRows(rows) = j.imag();
    RVector b(2 * rows);
    b.head(rows) = r.real();
    b.tail(rows) = r.imag();
    Eigen::BDCSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(cutoff);
    return RVector(svd.solve(b)).cast<Complex>();
  }
  Eigen::BDCSVD<CMatrix> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(cutoff);
  return svd.solve(r);
}

}  // namespace

void ProblemSpec::require_admissible(const CVector& p, const char* what) const {
  if (p.size() != parameter_dim())
    throw InvalidArgument(std::string(what) + " has length " + std::to_string(p.size()) +
                          ", expected " + std::to_string(parameter_dim()));
  if (is_real() && p.imag().cwiseAbs().maxCoeff() != 0.0)
    throw InadmissibleParameter(std::string(what) + " must be real for the " + name() +
                                " problem");
  if (!admissible(p))
    throw InadmissibleParameter(std::string(what) + " is not admissible for the " +
                                name() + " problem");
}

SpecPtr make_spec_conductivity(const Graph& g, int d) {
  return std::make_shared<ConductivitySpec>(g, d);
}

SpecPtr make_spec_schrodinger(const Graph& g, const MatrixEdgeField& sigma) {
  return std::make_shared<SchrodingerSpec>(g, sigma);
}

ProductMatrix product_matrix(const ProblemSpec& spec, const CVector& p1,
                             const CVector& p2, int threads) {
  spec.require_admissible(p1, "p1");
  spec.require_admissible(p2, "p2");
  const CMatrix s1 = spec.state_map(p1);
  const CMatrix s2 = p1 == p2 ? s1 : spec.state_map(p2);
  const Index n = spec.data_dim();
  const Index m = spec.parameter_dim();
  if (s1.cols() != n || s2.cols() != n)
    throw Error("state map has the wrong number of columns");
  ProductMatrix out{CMatrix(m, n * n), p1, p2};
  parallel_for(n * n, threads, [&](Index col) {
    const CVector b = spec.pair(s1.col(col % n), s2.col(col / n));
    if (b.size() != m) throw Error("pairing has the wrong length");
    out.w.col(col) = b;
  });
  return out;
}

CMatrix jacobian(const ProblemSpec& spec, const CVector& p, int threads) {
  return product_matrix(spec, p, p, threads).w.transpose();
}

CMatrix fd_jacobian(const ProblemSpec& spec, const CVector& p, double h,
                    FdDirection direction, int threads) {
  if (!(h > 0)) throw InvalidArgument("finite-difference step must be positive");
  if (direction == FdDirection::Imaginary && spec.is_real())
    throw InvalidArgument("imaginary perturbations are not allowed for a real problem");
  spec.require_admissible(p);
  const Complex step = direction == FdDirection::Real ? Complex(h, 0) : Complex(0, h);
  const Index n = spec.data_dim();
  CMatrix out(n * n, spec.parameter_dim());
  parallel_for(spec.parameter_dim(), threads, [&](Index k) {
    CVector plus = p;
    CVector minus = p;
    plus(k) += step;
    minus(k) -= step;
    if (!spec.admissible(plus) || !spec.admissible(minus))
      throw InadmissibleParameter("finite-difference step leaves the admissible set");
    out.col(k) = vec(CMatrix(spec.forward(plus) - spec.forward(minus))) / (2.0 * step);
  });
  return out;
}

UniquenessVerdict uniqueness_from_matrix(const CMatrix& w, double epsilon) {
  UniquenessVerdict v;
  v.epsilon = epsilon;
  if (w.size() == 0) return v;
  Eigen::BDCSVD<CMatrix> svd(w);
  const RVector& s = svd.singularValues();
  v.sigma_max = s(0);
  v.sigma_min = w.rows() > w.cols() ? 0.0 : s(w.rows() - 1);
  v.holds = v.sigma_min > epsilon * v.sigma_max;
  return v;
}

UniquenessVerdict uniqueness_test(const ProblemSpec& spec, const CVector& p,
                                  double epsilon, int threads) {
  return uniqueness_from_matrix(product_matrix(spec, p, p, threads).w, epsilon);
}

std::string to_string(NewtonStatus s) {
  switch (s) {
    case NewtonStatus::Converged: return "converged";
    case NewtonStatus::Stationary: return "stationary";
    case NewtonStatus::IterationLimit: return "iteration_limit";
    case NewtonStatus::StepCollapse: return "step_collapse";
  }
  return "?";
}

NewtonResult newton_invert(const ProblemSpec& spec, const CMatrix& target,
                           const CVector& p0, const NewtonOptions& options) {
  spec.require_admissible(p0, "initial parameter");
  const Index n = spec.data_dim();
  if (target.rows() != n || target.cols() != n)
    throw InvalidArgument("target must be " + std::to_string(n) + " x " + std::to_string(n));

  NewtonResult out{p0, {}};
  auto& trace = out.trace;
  CVector r = vec(CMatrix(target - spec.forward(p0)));
  double res = r.norm();
  trace.iterates.push_back(p0);
  trace.residuals.push_back(res);
  const double tol = options.residual_tol * (1.0 + target.norm());

  for (int iter = 0;; ++iter) {
    if (res <= tol) {
      trace.status = NewtonStatus::Converged;
      break;
    }
    if (iter >= options.max_iterations) {
      trace.status = NewtonStatus::IterationLimit;
      break;
    }
    const CMatrix j = jacobian(spec, out.parameter, options.threads);
    const CVector dp = min_norm_solve(j, r, options.svd_cutoff, spec.is_real());
    const double predicted = (j * dp).squaredNorm();
    if (dp.norm() <= options.step_tol * (1.0 + out.parameter.norm()) ||
        std::sqrt(predicted) <= 1e-10 * res) {
      trace.status = NewtonStatus::Stationary;
      break;
    }

    bool accepted = false;
    double t = 1.0;
    CVector next;
    CVector next_r;
    for (; t >= options.min_step_length; t *= 0.5) {
      next = out.parameter + t * dp;
      if (!spec.admissible(next)) continue;
      try {
        next_r = vec(CMatrix(target - spec.forward(next)));
      } catch (const SingularSystem&) {
        continue;
      }
      if (next_r.squaredNorm() <= res * res - 2.0 * options.armijo * t * predicted) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      trace.status = NewtonStatus::StepCollapse;
      break;
    }
    out.parameter = next;
    r = next_r;
    res = r.norm();
    trace.iterates.push_back(next);
    trace.residuals.push_back(res);
    trace.step_lengths.push_back(t);
  }
  return out;
}

double ScanResult::singular_fraction(double epsilon) const {
  if (samples.empty()) return 0.0;
  const auto bad = std::count_if(samples.begin(), samples.end(),
                                 [&](const ScanSample& s) { return s.ratio <= epsilon; });
  return static_cast<double>(bad) / static_cast<double>(samples.size());
}

ScanResult line_rank_scan(const ProblemSpec& spec, const CVector& p, const CVector& dp,
                          const ScanOptions& options) {
  spec.require_admissible(p);
  if (dp.size() != p.size()) throw InvalidArgument("direction has the wrong length");
  if (dp.norm() == 0.0) throw InvalidArgument("direction is zero");
  if (spec.is_real() && dp.imag().cwiseAbs().maxCoeff() != 0.0)
    throw InvalidArgument("direction must be real for the " + spec.name() + " problem");
  if (options.samples <= 0) throw InvalidArgument("number of samples must be positive");

  auto reach = [&](double sign) {
    if (spec.admissible(p + sign * options.t_limit * dp)) return options.t_limit;
    double lo = 0.0;
    double hi = options.t_limit;
    for (int k = 0; k < 60; ++k) {
      const double mid = 0.5 * (lo + hi);
      (spec.admissible(p + sign * mid * dp) ? lo : hi) = mid;
    }
    return lo;
  };
  ScanResult out;
  out.t_max = reach(1.0);
  out.t_min = -reach(-1.0);
  if (!(out.t_max > out.t_min)) throw InvalidArgument("admissible segment is empty");

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> uniform(out.t_min, out.t_max);
  out.samples.resize(static_cast<std::size_t>(options.samples));
  for (auto& s : out.samples) s.t = uniform(rng);
  parallel_for(options.samples, options.threads, [&](Index k) {
    auto& s = out.samples[static_cast<std::size_t>(k)];
    const CVector pt = p + s.t * dp;
    const auto v = uniqueness_from_matrix(product_matrix(spec, pt, pt).w, options.epsilon);
    s.ratio = v.sigma_max > 0 ? v.sigma_min / v.sigma_max : 0.0;
  });
  return out;
}

}  // namespace netinv
