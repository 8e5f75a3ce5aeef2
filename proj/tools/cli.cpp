#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "netinv/elastic.hpp"
#include "netinv/inversion.hpp"
#include "netinv/io.hpp"

namespace netinv::cli {

using nlohmann::json;

namespace {

class RegimeUnsupported : public Error {
 public:
  using Error::Error;
};

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vector_json(const CVector& v) {
  json arr = json::array();
  for (Index k = 0; k < v.size(); ++k) arr.push_back(complex_json(v(k)));
  return arr;
}

json real_vector_json(const RVector& v) {
  json arr = json::array();
  for (Index k = 0; k < v.size(); ++k) arr.push_back(v(k));
  return arr;
}

void emit(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty())
    out << text;
  else
    write_text(path, text);
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("NETINV_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1)
      throw InvalidArgument("NETINV_THREADS must be a positive integer");
    return static_cast<int>(n);
  }
  return 1;
}

DirichletRegime require_supported(const NetworkFile& f) {
  DirichletRegime r = classify_regime(f.graph, f.conductivity(), f.potential());
  if (r.tag == Regime::Unsupported) throw RegimeUnsupported("regime unsupported: " + r.reason);
  return r;
}

DirichletSolver make_solver(const NetworkFile& f, const DirichletRegime& r) {
  const MatrixEdgeField sigma = f.conductivity();
  if (is_positive_definite(r.tag))
    return DirichletSolver::positive_definite(f.graph, sigma, f.potential());
  EigenOptions opts;
  opts.allow_mixed_rank = true;
  return DirichletSolver::projected(f.graph, sigma, q_basis(f.graph, eigen_decompose(sigma, opts)).q);
}

struct Problem {
  SpecPtr spec;
  CVector p;
};

Problem build_problem(const NetworkFile& f, const std::string& name) {
  if (name == "conductivity") {
    const MatrixEdgeField sigma = f.conductivity();
    return {make_spec_conductivity(f.graph, f.d), vec(sigma)};
  }
  if (name == "schrodinger")
    return {make_spec_schrodinger(f.graph, f.conductivity()), vec(f.potential())};
  if (name == "eigenvalues") {
    const EigenData eig = eigen_decompose(f.conductivity());
    return {make_spec_eigenvalues(f.graph, eig), eig.stacked_lambda()};
  }
  if (name == "springs") {
    const ElasticNetwork net = f.elastic();
    if (f.omega) return {make_spec_springs_known_masses(net), edge_parameters(net)};
    return {make_spec_static_springs(net), net.k.cast<Complex>()};
  }
  if (name == "masses") {
    if (!f.omega) throw SchemaError("the masses problem needs \"omega\"");
    const ElasticNetwork net = f.elastic();
    return {make_spec_masses_known_springs(net), node_parameters(net)};
  }
  throw InvalidArgument("unknown problem " + name);
}

CVector read_parameter_vector(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\n");
  if (first != std::string::npos && arg[first] == '[') return parse_complex_vector(arg);
  return parse_complex_vector(read_text(arg));
}

json ids_json(const NetworkFile& f) { return json(f.ids); }

int cmd_forward(const std::string& net_path, const std::string& bc_path,
                const std::string& output, std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  const DirichletRegime r = require_supported(f);
  const CMatrix bc = read_boundary_data(bc_path);
  const Index n = static_cast<Index>(f.d) * f.graph.num_boundary();
  if (bc.rows() != n)
    throw SchemaError("boundary data has " + std::to_string(bc.rows()) + " rows, expected " +
                      std::to_string(n));
  const DirichletSolver solver = make_solver(f, r);
  const CMatrix u = solver.solution_operator() * bc;
  double residual = 0;
  for (Index c = 0; c < u.cols(); ++c)
    residual = std::max(residual, interior_residual(f.graph, solver.op(), u.col(c)));

  json doc{{"regime", to_string(r.tag)},
           {"d", f.d},
           {"vertex_ids", ids_json(f)},
           {"residual", residual}};
  doc["u"] = u.cols() == 1 ? vector_json(u.col(0)) : json::parse(matrix_to_json(u));
  doc["floppy_dimension"] =
      is_semidefinite(r.tag) ? floppy_basis(f.graph, f.conductivity()).dimension() : 0;
  emit(doc, output, out);
  return kSuccess;
}

int cmd_dtn(const std::string& net_path, const std::string& output, const std::string& format,
            std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  DtnMap dtn;
  if (f.omega) {
    dtn = displacement_to_forces(f.elastic(), ElasticRegime::Dynamic);
  } else {
    dtn = make_solver(f, require_supported(f)).dtn();
  }
  const std::string text =
      format == "csv" ? matrix_to_csv(dtn.matrix) : matrix_to_json(dtn.matrix, &dtn);
  if (output.empty())
    out << text;
  else
    write_text(output, text);
  return kSuccess;
}

int cmd_uniqueness(const std::string& net_path, const std::string& problem, double epsilon,
                   int threads, std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  const Problem pr = build_problem(f, problem);
  const UniquenessVerdict v = uniqueness_test(*pr.spec, pr.p, epsilon, threads);
  json doc{{"problem", pr.spec->name()},
           {"parameter_dim", pr.spec->parameter_dim()},
           {"data_dim", pr.spec->data_dim()},
           {"sigma_max", v.sigma_max},
           {"sigma_min", v.sigma_min},
           {"epsilon", v.epsilon},
           {"verdict", v.holds ? "holds" : "inconclusive"}};
  emit(doc, "", out);
  return v.holds ? kSuccess : kInconclusive;
}

int cmd_invert(const std::string& net_path, const std::string& target_path,
               const std::string& problem, const std::string& p0_arg, int max_iters,
               const std::string& output, const std::string& trace_csv, int threads,
               std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  const Problem pr = build_problem(f, problem);
  const CMatrix target = read_matrix(target_path);
  const CVector p0 = p0_arg.empty() ? pr.p : read_parameter_vector(p0_arg);
  NewtonOptions opts;
  opts.max_iterations = max_iters;
  opts.threads = threads;
  const NewtonResult res = newton_invert(*pr.spec, target, p0, opts);

  json doc{{"problem", pr.spec->name()},
           {"status", to_string(res.trace.status)},
           {"iterations", res.trace.step_lengths.size()},
           {"parameters", vector_json(res.parameter)},
           {"residuals", res.trace.residuals},
           {"step_lengths", res.trace.step_lengths},
           {"final_residual", res.trace.residuals.back()}};
  emit(doc, output, out);
  if (!trace_csv.empty()) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "iteration,residual,step_length\n";
    for (std::size_t k = 0; k < res.trace.residuals.size(); ++k) {
      csv << k << ',' << res.trace.residuals[k] << ',';
      if (k > 0) csv << res.trace.step_lengths[k - 1];
      csv << '\n';
    }
    write_text(trace_csv, csv.str());
  }
  return res.succeeded() ? kSuccess : kNoConvergence;
}

int cmd_floppy(const std::string& net_path, std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  const DirichletRegime r = require_supported(f);
  json doc{{"regime", to_string(r.tag)}, {"d", f.d}, {"vertex_ids", ids_json(f)}};
  if (is_positive_definite(r.tag)) {
    doc["dimension"] = 0;
    doc["modes"] = json::array();
    doc["max_boundary_flux"] = 0.0;
    emit(doc, "", out);
    return kSuccess;
  }
  const MatrixEdgeField sigma = f.conductivity();
  const FloppyBasis basis = floppy_basis(f.graph, sigma);
  const CMatrix lap = assemble_laplacian(f.graph, sigma).natural_order();
  double boundary_flux = 0;
  double interior_flux = 0;
  json modes = json::array();
  for (int k = 0; k < basis.dimension(); ++k) {
    const CVector flux = lap * basis.modes.col(k).cast<Complex>();
    for (int v = 0; v < f.graph.num_vertices(); ++v) {
      const double m = flux.segment(static_cast<Index>(v) * f.d, f.d).cwiseAbs().maxCoeff();
      (f.graph.is_boundary(v) ? boundary_flux : interior_flux) =
          std::max(f.graph.is_boundary(v) ? boundary_flux : interior_flux, m);
    }
    modes.push_back(real_vector_json(basis.modes.col(k)));
  }
  doc["dimension"] = basis.dimension();
  doc["modes"] = std::move(modes);
  doc["max_boundary_flux"] = boundary_flux;
  doc["max_interior_flux"] = interior_flux;
  emit(doc, "", out);
  return kSuccess;
}

int cmd_scan(const std::string& net_path, const std::string& problem,
             const std::string& direction, int samples, double epsilon, double t_limit,
             std::uint64_t seed, int threads, std::ostream& out) {
  const NetworkFile f = read_network(net_path);
  const Problem pr = build_problem(f, problem);
  CVector dp;
  if (!direction.empty()) {
    dp = read_parameter_vector(direction);
  } else {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    dp.resize(pr.spec->parameter_dim());
    for (Index k = 0; k < dp.size(); ++k) {
      const double re = normal(rng);
      dp(k) = Complex(re, pr.spec->is_real() ? 0.0 : normal(rng));
    }
  }
  ScanOptions opts;
  opts.samples = samples;
  opts.epsilon = epsilon;
  opts.t_limit = t_limit;
  opts.seed = seed;
  opts.threads = threads;
  const ScanResult res = line_rank_scan(*pr.spec, pr.p, dp, opts);
  json pts = json::array();
  for (const auto& s : res.samples) pts.push_back({s.t, s.ratio});
  json doc{{"problem", pr.spec->name()},
           {"t_min", res.t_min},
           {"t_max", res.t_max},
           {"epsilon", epsilon},
           {"singular_fraction", res.singular_fraction(epsilon)},
           {"direction", vector_json(dp)},
           {"samples", std::move(pts)}};
  emit(doc, "", out);
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inverse problems on networks: Dirichlet solves, DtN maps, uniqueness tests, "
               "Newton inversion."};
  app.name("netinv");
  app.require_subcommand(1);

  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "worker threads (default: NETINV_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed for randomized subroutines");

  const std::vector<std::string> problems{"conductivity", "schrodinger", "eigenvalues",
                                          "springs", "masses"};
  std::string net, bc, target, output, format = "json", problem, p0, trace_csv, direction;
  double epsilon = 1e-8;
  double t_limit = 10.0;
  int max_iters = 100;
  int samples = 1000;

  auto* forward = app.add_subcommand("forward", "solve the Dirichlet problem");
  forward->add_option("network", net, "network file")->required();
  forward->add_option("bc", bc, "boundary data file")->required();
  forward->add_option("-o,--output", output, "output file (default stdout)");

  auto* dtn = app.add_subcommand("dtn", "write the Dirichlet-to-Neumann map");
  dtn->add_option("network", net, "network file")->required();
  dtn->add_option("-o,--output", output, "output file (default stdout)");
  dtn->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* uniq = app.add_subcommand("uniqueness", "injectivity test of the linearized problem");
  uniq->add_option("network", net, "network file")->required();
  uniq->add_option("--problem", problem)->required()->check(CLI::IsMember(problems));
  uniq->add_option("--epsilon", epsilon, "relative singular value tolerance");

  auto* invert = app.add_subcommand("invert", "Newton inversion from a target DtN map");
  invert->add_option("network", net, "network file")->required();
  invert->add_option("target", target, "target matrix file (.json or .csv)")->required();
  invert->add_option("--problem", problem)->required()->check(CLI::IsMember(problems));
  invert->add_option("--p0", p0, "initial parameters: JSON array or file (default: the network's)");
  invert->add_option("--max-iters", max_iters)->check(CLI::NonNegativeNumber);
  invert->add_option("-o,--output", output, "output file (default stdout)");
  invert->add_option("--trace-csv", trace_csv, "write the residual trace as CSV");

  auto* floppy = app.add_subcommand("floppy", "floppy mode report");
  floppy->add_option("network", net, "network file")->required();

  auto* scan = app.add_subcommand("scan", "Jacobian conditioning along a line");
  scan->add_option("network", net, "network file")->required();
  scan->add_option("--problem", problem)->required()->check(CLI::IsMember(problems));
  scan->add_option("--direction", direction, "direction: JSON array or file (default: random)");
  scan->add_option("--samples", samples)->check(CLI::PositiveNumber);
  scan->add_option("--epsilon", epsilon);
  scan->add_option("--t-limit", t_limit)->check(CLI::PositiveNumber);

  for (auto* sub : {forward, dtn, uniq, invert, floppy, scan}) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUsage;
  }

  try {
    const int nthreads = resolve_threads(threads);
    if (forward->parsed()) return cmd_forward(net, bc, output, out);
    if (dtn->parsed()) return cmd_dtn(net, output, format, out);
    if (uniq->parsed()) return cmd_uniqueness(net, problem, epsilon, nthreads, out);
    if (invert->parsed())
      return cmd_invert(net, target, problem, p0, max_iters, output, trace_csv, nthreads, out);
    if (floppy->parsed()) return cmd_floppy(net, out);
    if (scan->parsed())
      return cmd_scan(net, problem, direction, samples, epsilon, t_limit, seed, nthreads, out);
  } catch (const RegimeUnsupported& e) {
    err << "netinv: " << e.what() << "\n";
    return kUnsupported;
  } catch (const SingularSystem& e) {
    err << "netinv: regime unsupported: " << e.what() << "\n";
    return kUnsupported;
  } catch (const Error& e) {
    err << "netinv: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace netinv::cli
