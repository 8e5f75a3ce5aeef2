#include "netinv/elastic.hpp"

#include <cmath>

namespace netinv {

namespace {

const Complex kJ(0.0, 1.0);

void check_geometry(const ElasticNetwork& net) {
  const Graph& g = net.graph;
  if (static_cast<int>(net.positions.size()) != g.num_vertices())
    throw InvalidArgument("need one position per vertex");
  const int d = net.dim();
  if (d <= 0) throw InvalidArgument("positions must be nonempty vectors");
  for (const auto& p : net.positions) {
    if (p.size() != d) throw InvalidArgument("positions have mixed dimensions");
    if (!p.allFinite()) throw InvalidArgument("position is not finite");
  }
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges()[e];
    if ((net.positions[ed.tail] - net.positions[ed.head]).norm() == 0.0)
      throw InvalidArgument("edge " + std::to_string(e) + " joins coincident positions");
  }
}

void check_edge_data(const ElasticNetwork& net) {
  const int ne = net.graph.num_edges();
  if (net.k.size() != ne) throw InvalidArgument("need one spring constant per edge");
  if (net.c_e.size() != ne) throw InvalidArgument("need one edge damper per edge");
  if (ne > 0 && !(net.k.minCoeff() > 0)) throw InvalidArgument("spring constants must be positive");
  if (ne > 0 && !(net.c_e.minCoeff() >= 0)) throw InvalidArgument("edge dampers must be nonnegative");
}

void check_node_data(const ElasticNetwork& net) {
  const int nv = net.graph.num_vertices();
  if (net.mass.size() != nv) throw InvalidArgument("need one mass per vertex");
  if (net.c_v.size() != nv) throw InvalidArgument("need one node damper per vertex");
  if (!(net.mass.minCoeff() > 0)) throw InvalidArgument("masses must be positive");
  if (!(net.c_v.minCoeff() > 0)) throw InvalidArgument("node dampers must be positive");
  if (!(net.omega != 0.0) || !std::isfinite(net.omega))
    throw InvalidArgument("frequency must be nonzero (use the static regime for omega = 0)");
}

MatrixEdgeField rank_one_field(const EigenData& dirs, const RVector& weights) {
  std::vector<CMatrix> blocks;
  blocks.reserve(dirs.x.size());
  for (std::size_t e = 0; e < dirs.x.size(); ++e)
    blocks.push_back((weights(static_cast<Index>(e)) * dirs.x[e] * dirs.x[e].transpose())
                         .cast<Complex>());
  return MatrixEdgeField(dirs.d, std::move(blocks));
}

MatrixNodeField node_scalars(int d, const CVector& values) {
  return MatrixNodeField::scaled_identity(d, values);
}

// Block-diagonal x(e)^T applied to the gradient: (sum r) x d|V|.
CMatrix projected_gradient(const Graph& g, const EigenData& eig) {
  const CMatrix grad = gradient_matrix(g, eig.d);
  CMatrix out(eig.parameter_count(), grad.cols());
  Index row = 0;
  for (int e = 0; e < eig.num_edges(); ++e) {
    const Index r = eig.x[e].cols();
    out.middleRows(row, r) =
        eig.x[e].transpose().cast<Complex>() * grad.middleRows(static_cast<Index>(e) * eig.d, eig.d);
    row += r;
  }
  return out;
}

enum class EdgeSpecKind { Eigenvalues, StaticSprings, DynamicSprings };

// States x(e)^T grad u, Hadamard pairing, sigma(p) = x diag(p) x^T.
class ProjectedSpec final : public ProblemSpec {
 public:
  ProjectedSpec(const Graph& g, EigenData eig, EdgeSpecKind kind, double omega = 0,
                CVector node_potential = {})
      : g_(g), eig_(std::move(eig)), kind_(kind), omega_(omega),
        node_potential_(std::move(node_potential)),
        pgrad_(projected_gradient(g, eig_)) {
    if (eig_.num_edges() != g.num_edges())
      throw InvalidArgument("eigen data does not match graph");
    if (!is_connected(g)) throw InvalidArgument("network graph must be connected");
    if (kind_ == EdgeSpecKind::DynamicSprings) {
      potential_ = node_scalars(eig_.d, node_potential_ / (kJ * omega_));
    } else {
      q_ = q_basis(g, eig_).q;
    }
  }

  std::string name() const override {
    switch (kind_) {
      case EdgeSpecKind::Eigenvalues: return "eigenvalues";
      case EdgeSpecKind::StaticSprings: return "static_springs";
      case EdgeSpecKind::DynamicSprings: return "springs_known_masses";
    }
    return "?";
  }
  Index parameter_dim() const override { return eig_.parameter_count(); }
  Index data_dim() const override { return static_cast<Index>(eig_.d) * g_.num_boundary(); }
  Index state_dim() const override { return eig_.parameter_count(); }
  bool is_real() const override { return kind_ == EdgeSpecKind::StaticSprings; }

  bool admissible(const CVector& p) const override {
    if (p.size() != parameter_dim() || !p.allFinite()) return false;
    for (Index k = 0; k < p.size(); ++k) {
      if (!(p(k).real() > 0)) return false;
      if (kind_ == EdgeSpecKind::StaticSprings && p(k).imag() != 0) return false;
      if (kind_ == EdgeSpecKind::DynamicSprings &&
          !(std::copysign(1.0, omega_) * p(k).imag() > 0))
        return false;
    }
    return true;
  }

  CMatrix state_map(const CVector& p) const override {
    return pgrad_ * solver(p).solution_operator();
  }
  CVector pair(const CVector& x, const CVector& y) const override { return hadamard(x, y); }
  CMatrix forward(const CVector& p) const override {
    const CMatrix lambda = solver(p).dtn().matrix;
    return kind_ == EdgeSpecKind::DynamicSprings ? CMatrix(kJ * omega_ * lambda) : lambda;
  }

 private:
  DirichletSolver solver(const CVector& p) const {
    const MatrixEdgeField sigma = eig_.conductivity(p);
    if (kind_ == EdgeSpecKind::DynamicSprings)
      return DirichletSolver::positive_definite(g_, (1.0 / (kJ * omega_)) * sigma, potential_);
    return DirichletSolver::projected(g_, sigma, q_);
  }

  Graph g_;
  EigenData eig_;
  EdgeSpecKind kind_;
  double omega_;
  CVector node_potential_;
  CMatrix pgrad_;
  RMatrix q_;
  MatrixNodeField potential_;
};

// rho(i) I on the nodes with known springs and edge dampers.
class MassSpec final : public ProblemSpec {
 public:
  explicit MassSpec(const ElasticNetwork& net)
      : g_(net.graph), d_(net.dim()), omega_(net.omega) {
    const EigenData dirs = spring_directions(net);
    conductivity_ = rank_one_field(dirs, net.c_e) +
                    (1.0 / (kJ * omega_)) * rank_one_field(dirs, net.k);
    if (!is_connected(g_)) throw InvalidArgument("network graph must be connected");
  }

  std::string name() const override { return "masses_known_springs"; }
  Index parameter_dim() const override { return g_.num_vertices(); }
  Index data_dim() const override { return static_cast<Index>(d_) * g_.num_boundary(); }
  Index state_dim() const override { return static_cast<Index>(d_) * g_.num_vertices(); }

  bool admissible(const CVector& p) const override {
    if (p.size() != parameter_dim() || !p.allFinite()) return false;
    for (Index k = 0; k < p.size(); ++k)
      if (!(p(k).real() < 0) || !(std::copysign(1.0, omega_) * p(k).imag() > 0)) return false;
    return true;
  }

  CMatrix state_map(const CVector& p) const override { return solver(p).solution_operator(); }

  CVector pair(const CVector& x, const CVector& y) const override {
    if (x.size() != state_dim() || y.size() != state_dim())
      throw InvalidArgument("pair: state length mismatch");
    CVector out = CVector::Zero(parameter_dim());
    for (Index i = 0; i < out.size(); ++i)
      out(i) = x.segment(i * d_, d_).cwiseProduct(y.segment(i * d_, d_)).sum();
    return out;
  }

  CMatrix forward(const CVector& p) const override {
    return kJ * omega_ * solver(p).dtn().matrix;
  }

 private:
  DirichletSolver solver(const CVector& p) const {
    return DirichletSolver::positive_definite(g_, conductivity_,
                                              node_scalars(d_, p / (kJ * omega_)));
  }

  Graph g_;
  int d_;
  double omega_;
  MatrixEdgeField conductivity_;
};

}  // namespace

void ElasticNetwork::validate_static() const {
  check_geometry(*this);
  check_edge_data(*this);
}

void ElasticNetwork::validate_dynamic() const {
  validate_static();
  check_node_data(*this);
}

EigenData spring_directions(const ElasticNetwork& net) {
  check_geometry(net);
  const Graph& g = net.graph;
  EigenData out;
  out.d = net.dim();
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges()[e];
    RMatrix x = (net.positions[ed.tail] - net.positions[ed.head]).normalized();
    fix_column_signs(x);
    out.x.push_back(std::move(x));
    const double k = net.k.size() == g.num_edges() ? net.k(e) : 1.0;
    out.lambda.push_back(CVector::Constant(1, Complex(k, 0)));
  }
  return out;
}

MatrixEdgeField spring_conductivity(const ElasticNetwork& net) {
  if (net.k.size() != net.graph.num_edges())
    throw InvalidArgument("need one spring constant per edge");
  return rank_one_field(spring_directions(net), net.k);
}

MatrixEdgeField damper_conductivity(const ElasticNetwork& net) {
  if (net.c_e.size() != net.graph.num_edges())
    throw InvalidArgument("need one edge damper per edge");
  return rank_one_field(spring_directions(net), net.c_e);
}

FrequencyOperator frequency_operator(const ElasticNetwork& net) {
  net.validate_dynamic();
  const Graph& g = net.graph;
  const int d = net.dim();
  const double w = net.omega;
  const MatrixEdgeField sigma = spring_conductivity(net);
  const MatrixEdgeField mu = damper_conductivity(net);
  const CVector mass = net.mass.cast<Complex>();
  const CVector damp = net.c_v.cast<Complex>();

  MatrixEdgeField conductivity = mu + (1.0 / (kJ * w)) * sigma;
  MatrixNodeField potential = node_scalars(d, damp + kJ * w * mass);
  BlockOperator op = assemble_schrodinger(g, conductivity, potential);
  const auto none = MatrixEdgeField::zeros(d, g.num_edges());
  return {w,
          std::move(conductivity),
          std::move(potential),
          std::move(op),
          assemble_schrodinger(g, none, node_scalars(d, mass)).matrix(),
          assemble_schrodinger(g, mu, node_scalars(d, damp)).matrix(),
          assemble_laplacian(g, sigma).matrix()};
}

DtnMap displacement_to_forces(const ElasticNetwork& net, ElasticRegime regime) {
  if (regime == ElasticRegime::Static) {
    net.validate_static();
    const EigenData dirs = spring_directions(net);
    return dtn_psd(net.graph, dirs.reconstruct(), dirs);
  }
  const FrequencyOperator fo = frequency_operator(net);
  DtnMap scaled =
      DirichletSolver::positive_definite(net.graph, fo.conductivity, fo.potential).dtn();
  scaled.matrix *= kJ * net.omega;
  return scaled;
}

SpecPtr make_spec_eigenvalues(const Graph& g, const EigenData& eig) {
  return std::make_shared<ProjectedSpec>(g, eig, EdgeSpecKind::Eigenvalues);
}

SpecPtr make_spec_static_springs(const ElasticNetwork& net) {
  check_geometry(net);
  return std::make_shared<ProjectedSpec>(net.graph, spring_directions(net),
                                         EdgeSpecKind::StaticSprings);
}

SpecPtr make_spec_springs_known_masses(const ElasticNetwork& net) {
  check_geometry(net);
  check_node_data(net);
  const CVector potential =
      -net.omega * net.omega * net.mass.cast<Complex>() + kJ * net.omega * net.c_v.cast<Complex>();
  return std::make_shared<ProjectedSpec>(net.graph, spring_directions(net),
                                         EdgeSpecKind::DynamicSprings, net.omega, potential);
}

SpecPtr make_spec_masses_known_springs(const ElasticNetwork& net) {
  check_geometry(net);
  check_edge_data(net);
  if (!(net.omega != 0.0) || !std::isfinite(net.omega))
    throw InvalidArgument("frequency must be nonzero");
  return std::make_shared<MassSpec>(net);
}

CVector edge_parameters(const ElasticNetwork& net) {
  check_edge_data(net);
  return net.k.cast<Complex>() + kJ * net.omega * net.c_e.cast<Complex>();
}

CVector node_parameters(const ElasticNetwork& net) {
  if (net.mass.size() != net.graph.num_vertices() || net.c_v.size() != net.graph.num_vertices())
    throw InvalidArgument("need one mass and one node damper per vertex");
  return -net.omega * net.omega * net.mass.cast<Complex>() +
         kJ * net.omega * net.c_v.cast<Complex>();
}

}  // namespace netinv
