#include "netinv/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace netinv {

using nlohmann::json;

namespace {

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("malformed JSON: ") + e.what());
  }
}

bool is_complex_pair(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

Complex to_complex(const json& j, const std::string& where) {
  Complex z;
  if (j.is_number()) {
    z = Complex(j.get<double>(), 0.0);
  } else if (is_complex_pair(j)) {
    z = Complex(j[0].get<double>(), j[1].get<double>());
  } else {
    throw SchemaError(where + ": expected a number or an [re, im] pair");
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw SchemaError(where + ": value is not finite");
  return z;
}

json from_complex(Complex z) { return json::array({z.real(), z.imag()}); }

double to_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw SchemaError(where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw SchemaError(where + ": value is not finite");
  return x;
}

// d x d block: rows of complex entries, or a single complex when d = 1.
CMatrix to_block(const json& j, int d, const std::string& where) {
  if (d == 1 && (j.is_number() || is_complex_pair(j)))
    return CMatrix::Constant(1, 1, to_complex(j, where));
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw SchemaError(where + ": expected " + std::to_string(d) + " rows");
  CMatrix m(d, d);
  for (int r = 0; r < d; ++r) {
    if (!j[r].is_array() || static_cast<int>(j[r].size()) != d)
      throw SchemaError(where + ": row " + std::to_string(r) + " needs " +
                        std::to_string(d) + " entries");
    for (int c = 0; c < d; ++c) m(r, c) = to_complex(j[r][c], where);
  }
  return m;
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() || it->is_null() ? nullptr : &*it;
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const json* j = find(obj, key);
  if (!j) throw SchemaError(where + ": missing \"" + key + "\"");
  return *j;
}

json matrix_json(const CMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(from_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

CMatrix matrix_from(const json& doc) {
  if (!doc.is_object()) throw SchemaError("matrix: expected an object");
  const json& jr = require(doc, "rows", "matrix");
  const json& jc = require(doc, "cols", "matrix");
  if (!jr.is_number_integer() || !jc.is_number_integer() || jr.get<long long>() < 0 ||
      jc.get<long long>() < 0)
    throw SchemaError("matrix: rows and cols must be nonnegative integers");
  const Index rows = jr.get<Index>();
  const Index cols = jc.get<Index>();
  const json& data = require(doc, "data", "matrix");
  if (!data.is_array() || static_cast<Index>(data.size()) != rows)
    throw SchemaError("matrix: data must have " + std::to_string(rows) + " rows");
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = data[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw SchemaError("matrix: row " + std::to_string(r) + " must have " +
                        std::to_string(cols) + " entries");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = to_complex(row[static_cast<std::size_t>(c)], "matrix");
  }
  return m;
}

CVector vector_from(const json& j, const std::string& where) {
  if (!j.is_array()) throw SchemaError(where + ": expected an array");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Index>(k)) = to_complex(j[k], where);
  return v;
}

std::optional<double> optional_real(const json& obj, const char* key, const std::string& where) {
  const json* j = find(obj, key);
  if (!j) return std::nullopt;
  return to_real(*j, where + "." + key);
}

}  // namespace

bool NetworkFile::has_springs() const {
  for (const auto& x : k)
    if (x) return true;
  return false;
}

MatrixEdgeField NetworkFile::conductivity() const {
  std::vector<CMatrix> blocks;
  blocks.reserve(sigma.size());
  for (int e = 0; e < graph.num_edges(); ++e) {
    if (sigma[e]) {
      blocks.push_back(*sigma[e]);
      continue;
    }
    const Edge& ed = graph.edges()[e];
    const RVector dir = (*positions[ed.tail] - *positions[ed.head]).normalized();
    blocks.push_back((*k[e] * dir * dir.transpose()).cast<Complex>());
  }
  return MatrixEdgeField::symmetric(d, std::move(blocks));
}

MatrixNodeField NetworkFile::potential() const {
  return q ? *q : MatrixNodeField::zeros(d, graph.num_vertices());
}

ElasticNetwork NetworkFile::elastic() const {
  const int nv = graph.num_vertices();
  const int ne = graph.num_edges();
  ElasticNetwork net{graph, {}, RVector(ne), RVector(ne), RVector::Zero(nv),
                     RVector::Zero(nv), omega.value_or(1.0)};
  for (int v = 0; v < nv; ++v) {
    if (!positions[v])
      throw SchemaError("vertex " + std::to_string(ids[v]) + " has no position");
    net.positions.push_back(*positions[v]);
    if (mass[v]) net.mass(v) = *mass[v];
    if (c_v[v]) net.c_v(v) = *c_v[v];
  }
  for (int e = 0; e < ne; ++e) {
    if (!k[e]) throw SchemaError("edge " + std::to_string(e) + " has no spring constant");
    net.k(e) = *k[e];
    net.c_e(e) = c_e[e].value_or(0.0);
  }
  return net;
}

NetworkFile parse_network(const std::string& json_text) {
  const json doc = parse_json(json_text);
  if (!doc.is_object()) throw SchemaError("network: expected an object");
  NetworkFile out;

  const json& jd = require(doc, "d", "network");
  if (!jd.is_number_integer() || jd.get<int>() < 1)
    throw SchemaError("network: d must be a positive integer");
  out.d = jd.get<int>();

  const json& verts = require(doc, "vertices", "network");
  if (!verts.is_array() || verts.empty())
    throw SchemaError("network: vertices must be a nonempty array");
  std::map<long long, int> index;
  std::vector<VertexId> boundary;
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const json& v = verts[k];
    const std::string where = "vertices[" + std::to_string(k) + "]";
    if (!v.is_object()) throw SchemaError(where + ": expected an object");
    const json& id = require(v, "id", where);
    if (!id.is_number_integer()) throw SchemaError(where + ": id must be an integer");
    if (!index.emplace(id.get<long long>(), static_cast<int>(k)).second)
      throw SchemaError(where + ": duplicate id " + std::to_string(id.get<long long>()));
    out.ids.push_back(id.get<long long>());

    const json& b = require(v, "boundary", where);
    if (!b.is_boolean()) throw SchemaError(where + ": boundary must be true or false");
    if (b.get<bool>()) boundary.push_back(static_cast<VertexId>(k));

    if (const json* p = find(v, "position")) {
      if (!p->is_array() || static_cast<int>(p->size()) != out.d)
        throw SchemaError(where + ": position must have d entries");
      RVector pos(out.d);
      for (int c = 0; c < out.d; ++c) pos(c) = to_real((*p)[c], where + ".position");
      out.positions.emplace_back(std::move(pos));
    } else {
      out.positions.emplace_back();
    }
    out.mass.push_back(optional_real(v, "mass", where));
    out.c_v.push_back(optional_real(v, "c_v", where));
  }

  const json& edges = require(doc, "edges", "network");
  if (!edges.is_array()) throw SchemaError("network: edges must be an array");
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const json& e = edges[k];
    const std::string where = "edges[" + std::to_string(k) + "]";
    if (!e.is_object()) throw SchemaError(where + ": expected an object");
    int ends[2];
    const char* keys[2] = {"i", "j"};
    for (int s = 0; s < 2; ++s) {
      const json& id = require(e, keys[s], where);
      if (!id.is_number_integer()) throw SchemaError(where + ": endpoint ids must be integers");
      const auto it = index.find(id.get<long long>());
      if (it == index.end())
        throw SchemaError(where + ": unknown vertex id " + std::to_string(id.get<long long>()));
      ends[s] = it->second;
    }
    pairs.emplace_back(ends[0], ends[1]);

    const json* js = find(e, "sigma");
    const json* jk = find(e, "k");
    if ((js != nullptr) == (jk != nullptr))
      throw SchemaError(where + ": give exactly one of sigma or k");
    if (js) {
      out.sigma.push_back(to_block(*js, out.d, where + ".sigma"));
      out.k.emplace_back();
    } else {
      out.sigma.emplace_back();
      out.k.push_back(to_real(*jk, where + ".k"));
      if (!out.positions[ends[0]] || !out.positions[ends[1]])
        throw SchemaError(where + ": spring edges need positions at both ends");
    }
    out.c_e.push_back(optional_real(e, "c_e", where));
  }

  try {
    out.graph = build_graph(static_cast<int>(verts.size()), boundary, pairs);
  } catch (const InvalidArgument& err) {
    throw SchemaError(std::string("network: ") + err.what());
  }

  if (const json* jq = find(doc, "q")) {
    if (!jq->is_array() || jq->size() != verts.size())
      throw SchemaError("network: q needs one entry per vertex");
    std::vector<CMatrix> blocks;
    for (std::size_t k = 0; k < jq->size(); ++k) {
      const json& x = (*jq)[k];
      const std::string where = "q[" + std::to_string(k) + "]";
      if (x.is_number() || is_complex_pair(x))
        blocks.push_back(to_complex(x, where) * CMatrix::Identity(out.d, out.d));
      else
        blocks.push_back(to_block(x, out.d, where));
    }
    try {
      out.q = MatrixNodeField::symmetric(out.d, std::move(blocks));
    } catch (const InvalidArgument& err) {
      throw SchemaError(std::string("network: ") + err.what());
    }
  }
  if (const json* jw = find(doc, "omega")) out.omega = to_real(*jw, "network.omega");

  try {
    out.conductivity();
  } catch (const InvalidArgument& err) {
    throw SchemaError(std::string("network: ") + err.what());
  }
  for (int e = 0; e < out.graph.num_edges(); ++e) {
    if (!out.k[e]) continue;
    const Edge& ed = out.graph.edges()[e];
    if ((*out.positions[ed.tail] - *out.positions[ed.head]).norm() == 0.0)
      throw SchemaError("edges[" + std::to_string(e) + "]: coincident endpoint positions");
  }
  return out;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

NetworkFile read_network(const std::string& path) { return parse_network(read_text(path)); }

std::string matrix_to_json(const CMatrix& m, const DtnMap* dtn) {
  json doc = matrix_json(m);
  if (dtn) {
    doc["provenance"] = to_string(dtn->provenance);
    doc["symmetry_residual"] = dtn->symmetry_residual();
  }
  return doc.dump(2) + "\n";
}

CMatrix matrix_from_json(const std::string& json_text) {
  return matrix_from(parse_json(json_text));
}

std::string matrix_to_csv(const CMatrix& m) {
  std::string out = "# " + std::to_string(m.rows()) + " " + std::to_string(m.cols()) + "\n";
  char buf[64];
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%s%.17g,%.17g", c ? "," : "", m(r, c).real(),
                    m(r, c).imag());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

CMatrix matrix_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("#", 0) != 0)
    throw SchemaError("csv matrix: missing '# rows cols' header");
  long long rows = -1;
  long long cols = -1;
  if (std::sscanf(line.c_str(), "# %lld %lld", &rows, &cols) != 2 || rows < 0 || cols < 0)
    throw SchemaError("csv matrix: bad header");
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw SchemaError("csv matrix: too few rows");
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw SchemaError("csv matrix: bad number '" + cell + "'");
      }
    }
    if (static_cast<Index>(values.size()) != 2 * cols)
      throw SchemaError("csv matrix: row " + std::to_string(r) + " has the wrong length");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = Complex(values[static_cast<std::size_t>(2 * c)],
                        values[static_cast<std::size_t>(2 * c + 1)]);
  }
  return m;
}

CMatrix read_matrix(const std::string& path) {
  const std::string text = read_text(path);
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0)
    return matrix_from_csv(text);
  return matrix_from_json(text);
}

CMatrix read_boundary_data(const std::string& path) {
  const json doc = parse_json(read_text(path));
  if (doc.is_object() && doc.contains("g")) return vector_from(doc["g"], "g");
  return matrix_from(doc);
}

CVector parse_complex_vector(const std::string& json_text) {
  return vector_from(parse_json(json_text), "vector");
}

std::string complex_vector_to_json(const CVector& v) {
  json arr = json::array();
  for (Index k = 0; k < v.size(); ++k) arr.push_back(from_complex(v(k)));
  return arr.dump();
}

}  // namespace netinv
