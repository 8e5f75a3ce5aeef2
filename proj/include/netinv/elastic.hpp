#pragma once

#include <vector>

#include "netinv/inversion.hpp"

namespace netinv {

/// Springs (and dampers) on the edges, masses (and dampers) on the nodes,
/// around known equilibrium positions.
struct ElasticNetwork {
  Graph graph;
  std::vector<RVector> positions;  // one d-vector per vertex
  RVector k;                       // spring constants, per edge
  RVector c_e;                     // edge dampers, per edge
  RVector mass;                    // per vertex
  RVector c_v;                     // node dampers, per vertex
  double omega = 1.0;

  int dim() const { return positions.empty() ? 0 : static_cast<int>(positions[0].size()); }

  /// Shapes, distinct endpoint positions, k > 0 and c_e >= 0.
  void validate_static() const;
  /// validate_static plus mass > 0, c_v > 0, omega != 0.
  void validate_dynamic() const;
};

/// Unit vectors (p(i) - p(j)) / |p(i) - p(j)| as d x 1 eigenvector data.
EigenData spring_directions(const ElasticNetwork& net);

/// sigma(e) = k(e) x(e) x(e)^T.
MatrixEdgeField spring_conductivity(const ElasticNetwork& net);
/// mu(e) = c_e(e) x(e) x(e)^T.
MatrixEdgeField damper_conductivity(const ElasticNetwork& net);

/// Scaled operator jw M + C + (jw)^-1 K, i.e. conductivity mu + (jw)^-1 sigma
/// and potential c_v + jw m.
struct FrequencyOperator {
  double omega;
  MatrixEdgeField conductivity;
  MatrixNodeField potential;
  BlockOperator op;
  CMatrix mass;       // M, partitioned order
  CMatrix damping;    // C = diag(c_v) + L_mu
  CMatrix stiffness;  // K = L_sigma
};

FrequencyOperator frequency_operator(const ElasticNetwork& net);

enum class ElasticRegime { Static, Dynamic };

/// Static: projected DtN of sigma(k). Dynamic: jw times the DtN of the scaled
/// operator, which is the DtN of -w^2 M + jw C + K.
DtnMap displacement_to_forces(const ElasticNetwork& net, ElasticRegime regime);

/// lambda in (C^r)^E with fixed eigenvectors, lambda' > 0, q = 0.
SpecPtr make_spec_eigenvalues(const Graph& g, const EigenData& eig);

/// Real spring constants k in (0, inf)^E, geometry known.
SpecPtr make_spec_static_springs(const ElasticNetwork& net);

/// rho = k + jw c_e per edge with masses and node dampers known.
/// Admissible: rho' > 0 and sign(w) rho'' > 0.
SpecPtr make_spec_springs_known_masses(const ElasticNetwork& net);

/// rho = -w^2 m + jw c_v per vertex with springs and edge dampers known.
/// Admissible: rho' < 0 and sign(w) rho'' > 0.
SpecPtr make_spec_masses_known_springs(const ElasticNetwork& net);

/// k + jw c_e per edge.
CVector edge_parameters(const ElasticNetwork& net);
/// -w^2 m + jw c_v per vertex.
CVector node_parameters(const ElasticNetwork& net);

}  // namespace netinv
