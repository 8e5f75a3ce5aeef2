#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netinv/dirichlet.hpp"
#include "netinv/elastic.hpp"

namespace netinv {

/// Malformed or incomplete input document.
class SchemaError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A network document. Vertex ids in the file are arbitrary integers; the
/// library numbers vertices 0.. in listing order, and the boundary order is
/// the listing order of the boundary vertices.
struct NetworkFile {
  int d = 1;
  Graph graph{1, {0}, {}};
  std::vector<long long> ids;

  std::vector<std::optional<RVector>> positions;
  std::vector<std::optional<double>> mass;
  std::vector<std::optional<double>> c_v;

  std::vector<std::optional<CMatrix>> sigma;  // per edge
  std::vector<std::optional<double>> k;       // per edge
  std::vector<std::optional<double>> c_e;     // per edge

  std::optional<MatrixNodeField> q;
  std::optional<double> omega;

  bool has_springs() const;
  /// sigma(e) as given, or k(e) x x^T for spring edges.
  MatrixEdgeField conductivity() const;
  /// q as given, or zero.
  MatrixNodeField potential() const;
  /// Needs positions everywhere and k on every edge; c_e defaults to 0.
  /// Masses and node dampers are filled in when present (zero otherwise).
  ElasticNetwork elastic() const;
};

NetworkFile parse_network(const std::string& json_text);
NetworkFile read_network(const std::string& path);

/// {"rows", "cols", "data": rows of [re, im] pairs}. The JSON form
/// round-trips exactly; CSV keeps 17 significant digits.
std::string matrix_to_json(const CMatrix& m, const DtnMap* dtn = nullptr);
CMatrix matrix_from_json(const std::string& json_text);
std::string matrix_to_csv(const CMatrix& m);
CMatrix matrix_from_csv(const std::string& csv_text);
/// Dispatches on the extension (.csv or JSON otherwise).
CMatrix read_matrix(const std::string& path);

/// Boundary data: {"g": [values]} (one column) or a matrix document.
CMatrix read_boundary_data(const std::string& path);

/// A JSON array of complex numbers, each a real or an [re, im] pair.
CVector parse_complex_vector(const std::string& json_text);
std::string complex_vector_to_json(const CVector& v);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace netinv
