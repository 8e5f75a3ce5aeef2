#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "netinv/elastic.hpp"
#include "netinv/io.hpp"

namespace py = pybind11;
using namespace netinv;

namespace {

MatrixEdgeField edge_field(const Graph& g, const std::vector<CMatrix>& blocks) {
  if (static_cast<int>(blocks.size()) != g.num_edges())
    throw InvalidArgument("need one conductivity block per edge");
  const int d = blocks.empty() ? 1 : static_cast<int>(blocks[0].rows());
  return MatrixEdgeField::symmetric(d, blocks);
}

MatrixNodeField node_field(const Graph& g, int d, const std::optional<std::vector<CMatrix>>& q) {
  if (!q) return MatrixNodeField::zeros(d, g.num_vertices());
  if (static_cast<int>(q->size()) != g.num_vertices())
    throw InvalidArgument("need one potential block per vertex");
  return MatrixNodeField::symmetric(d, *q);
}

DirichletSolver make_solver(const Graph& g, const MatrixEdgeField& sigma,
                            const MatrixNodeField& q) {
  const DirichletRegime r = classify_regime(g, sigma, q);
  if (is_positive_definite(r.tag)) return DirichletSolver::positive_definite(g, sigma, q);
  if (is_semidefinite(r.tag)) {
    EigenOptions opts;
    opts.allow_mixed_rank = true;
    return DirichletSolver::projected(g, sigma, q_basis(g, eigen_decompose(sigma, opts)).q);
  }
  throw SingularSystem("regime unsupported: " + r.reason);
}

ElasticNetwork make_network(const Graph& g, const std::vector<RVector>& positions,
                            const RVector& k, std::optional<RVector> c_e,
                            std::optional<RVector> mass, std::optional<RVector> c_v,
                            double omega) {
  ElasticNetwork net{g,
                     positions,
                     k,
                     c_e.value_or(RVector::Zero(g.num_edges())),
                     mass.value_or(RVector::Ones(g.num_vertices())),
                     c_v.value_or(RVector::Zero(g.num_vertices())),
                     omega};
  net.validate_static();
  return net;
}

// pybind11 holders cannot be pointers to const.
using Holder = std::shared_ptr<ProblemSpec>;
Holder hold(SpecPtr p) { return std::const_pointer_cast<ProblemSpec>(std::move(p)); }

py::dict trace_dict(const NewtonResult& r) {
  py::dict d;
  d["parameter"] = r.parameter;
  d["status"] = to_string(r.trace.status);
  d["residuals"] = r.trace.residuals;
  d["step_lengths"] = r.trace.step_lengths;
  d["iterates"] = r.trace.iterates;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Forward and inverse problems on graphs with matrix-valued weights";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<SingularSystem>(m, "SingularSystem", base.ptr());
  py::register_exception<InadmissibleParameter>(m, "InadmissibleParameter", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, const std::vector<VertexId>& boundary,
                       const std::vector<std::pair<VertexId, VertexId>>& edges) {
             return build_graph(n, boundary, edges);
           }),
           py::arg("num_vertices"), py::arg("boundary"), py::arg("edges"))
      .def_property_readonly("num_vertices", &Graph::num_vertices)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly("boundary", &Graph::boundary)
      .def_property_readonly("interior", &Graph::interior)
      .def_property_readonly("edges",
                             [](const Graph& g) {
                               std::vector<std::pair<VertexId, VertexId>> out;
                               for (const Edge& e : g.edges()) out.emplace_back(e.tail, e.head);
                               return out;
                             })
      .def("is_connected", [](const Graph& g) { return is_connected(g); })
      .def("__repr__", [](const Graph& g) {
        return "Graph(num_vertices=" + std::to_string(g.num_vertices()) +
               ", num_edges=" + std::to_string(g.num_edges()) +
               ", num_boundary=" + std::to_string(g.num_boundary()) + ")";
      });

  m.def("gradient_matrix", &gradient_matrix, py::arg("graph"), py::arg("d") = 1);

  m.def(
      "operator_matrix",
      [](const Graph& g, const std::vector<CMatrix>& sigma,
         const std::optional<std::vector<CMatrix>>& q) {
        const MatrixEdgeField s = edge_field(g, sigma);
        return assemble_schrodinger(g, s, node_field(g, s.dim(), q)).natural_order();
      },
      py::arg("graph"), py::arg("sigma"), py::arg("q") = py::none(),
      "L_sigma + diag(q) in natural vertex order.");

  m.def(
      "classify_regime",
      [](const Graph& g, const std::vector<CMatrix>& sigma,
         const std::optional<std::vector<CMatrix>>& q) {
        const MatrixEdgeField s = edge_field(g, sigma);
        return to_string(classify_regime(g, s, node_field(g, s.dim(), q)).tag);
      },
      py::arg("graph"), py::arg("sigma"), py::arg("q") = py::none());

  m.def(
      "solve_dirichlet",
      [](const Graph& g, const std::vector<CMatrix>& sigma, const CVector& boundary_values,
         const std::optional<std::vector<CMatrix>>& q) {
        const MatrixEdgeField s = edge_field(g, sigma);
        return make_solver(g, s, node_field(g, s.dim(), q)).solve(boundary_values);
      },
      py::arg("graph"), py::arg("sigma"), py::arg("boundary_values"), py::arg("q") = py::none(),
      "Solution in natural vertex order; minimal-norm when floppy modes exist.");

  m.def(
      "dtn",
      [](const Graph& g, const std::vector<CMatrix>& sigma,
         const std::optional<std::vector<CMatrix>>& q) {
        const MatrixEdgeField s = edge_field(g, sigma);
        return make_solver(g, s, node_field(g, s.dim(), q)).dtn().matrix;
      },
      py::arg("graph"), py::arg("sigma"), py::arg("q") = py::none());

  m.def(
      "floppy_modes",
      [](const Graph& g, const std::vector<CMatrix>& sigma) {
        return floppy_basis(g, edge_field(g, sigma)).modes;
      },
      py::arg("graph"), py::arg("sigma"));

  py::class_<ElasticNetwork>(m, "ElasticNetwork")
      .def(py::init(&make_network), py::arg("graph"), py::arg("positions"), py::arg("k"),
           py::arg("c_e") = py::none(), py::arg("mass") = py::none(),
           py::arg("c_v") = py::none(), py::arg("omega") = 1.0)
      .def_readonly("graph", &ElasticNetwork::graph)
      .def_readonly("k", &ElasticNetwork::k)
      .def_readonly("omega", &ElasticNetwork::omega)
      .def("spring_conductivity",
           [](const ElasticNetwork& n) { return spring_conductivity(n).blocks(); })
      .def("displacement_to_forces",
           [](const ElasticNetwork& n, bool dynamic) {
             return displacement_to_forces(
                        n, dynamic ? ElasticRegime::Dynamic : ElasticRegime::Static)
                 .matrix;
           },
           py::arg("dynamic") = false);

  py::class_<ProblemSpec, Holder>(m, "ProblemSpec")
      .def_property_readonly("name", &ProblemSpec::name)
      .def_property_readonly("parameter_dim", &ProblemSpec::parameter_dim)
      .def_property_readonly("data_dim", &ProblemSpec::data_dim)
      .def("admissible", &ProblemSpec::admissible)
      .def("forward", &ProblemSpec::forward)
      .def("state_map", &ProblemSpec::state_map)
      .def(
          "product_matrix",
          [](const ProblemSpec& s, const CVector& p1, const CVector& p2, int threads) {
            return product_matrix(s, p1, p2, threads).w;
          },
          py::arg("p1"), py::arg("p2"), py::arg("threads") = 1)
      .def(
          "jacobian",
          [](const ProblemSpec& s, const CVector& p, int threads) {
            return jacobian(s, p, threads);
          },
          py::arg("p"), py::arg("threads") = 1)
      .def(
          "fd_jacobian",
          [](const ProblemSpec& s, const CVector& p, double h) { return fd_jacobian(s, p, h); },
          py::arg("p"), py::arg("h") = 1e-5)
      .def(
          "uniqueness",
          [](const ProblemSpec& s, const CVector& p, double eps) {
            const UniquenessVerdict v = uniqueness_test(s, p, eps);
            py::dict d;
            d["sigma_max"] = v.sigma_max;
            d["sigma_min"] = v.sigma_min;
            d["epsilon"] = v.epsilon;
            d["holds"] = v.holds;
            return d;
          },
          py::arg("p"), py::arg("epsilon") = 1e-8)
      .def(
          "invert",
          [](const ProblemSpec& s, const CMatrix& target, const CVector& p0, int max_iters) {
            NewtonOptions opts;
            opts.max_iterations = max_iters;
            return trace_dict(newton_invert(s, target, p0, opts));
          },
          py::arg("target"), py::arg("p0"), py::arg("max_iterations") = 100)
      .def(
          "line_scan",
          [](const ProblemSpec& s, const CVector& p, const CVector& dp, int samples,
             std::uint64_t seed) {
            ScanOptions opts;
            opts.samples = samples;
            opts.seed = seed;
            const ScanResult r = line_rank_scan(s, p, dp, opts);
            std::vector<std::pair<double, double>> pts;
            for (const auto& smp : r.samples) pts.emplace_back(smp.t, smp.ratio);
            py::dict d;
            d["t_min"] = r.t_min;
            d["t_max"] = r.t_max;
            d["samples"] = pts;
            d["singular_fraction"] = r.singular_fraction(opts.epsilon);
            return d;
          },
          py::arg("p"), py::arg("dp"), py::arg("samples") = 1000, py::arg("seed") = 0);

  m.def(
      "conductivity_spec", [](const Graph& g, int d) { return hold(make_spec_conductivity(g, d)); },
      py::arg("graph"), py::arg("d") = 1);
  m.def(
      "schrodinger_spec",
      [](const Graph& g, const std::vector<CMatrix>& sigma) {
        return hold(make_spec_schrodinger(g, edge_field(g, sigma)));
      },
      py::arg("graph"), py::arg("sigma"));
  m.def(
      "static_springs_spec", [](const ElasticNetwork& n) { return hold(make_spec_static_springs(n)); },
      py::arg("network"));
  m.def(
      "springs_known_masses_spec", [](const ElasticNetwork& n) { return hold(make_spec_springs_known_masses(n)); },
      py::arg("network"));
  m.def(
      "masses_known_springs_spec", [](const ElasticNetwork& n) { return hold(make_spec_masses_known_springs(n)); },
      py::arg("network"));
  m.def("edge_parameters", &edge_parameters, py::arg("network"));
  m.def("node_parameters", &node_parameters, py::arg("network"));

  m.def(
      "load_network",
      [](const std::string& path) {
        const NetworkFile f = read_network(path);
        py::dict d;
        d["d"] = f.d;
        d["graph"] = f.graph;
        d["ids"] = f.ids;
        d["sigma"] = f.conductivity().blocks();
        d["q"] = f.potential().blocks();
        d["omega"] = f.omega;
        if (f.has_springs()) d["network"] = f.elastic();
        return d;
      },
      py::arg("path"));
}
