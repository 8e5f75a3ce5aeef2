#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "netinv/types.hpp"

namespace netinv {

using VertexId = int;

/// Undirected edge stored with its fixed orientation: tail < head.
struct Edge {
  VertexId tail;
  VertexId head;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Finite undirected graph with a boundary/interior vertex partition.
///
/// Vertices are 0..n-1. Edges keep the order in which they were given and
/// are oriented from the smaller to the larger id. Block operators use the
/// "partitioned" vertex order: boundary vertices first (in the order given
/// at construction), then interior vertices in ascending id order.
class Graph {
 public:
  Graph(int num_vertices, std::vector<VertexId> boundary,
        const std::vector<std::pair<VertexId, VertexId>>& edges);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_boundary() const { return static_cast<int>(boundary_.size()); }
  int num_interior() const { return static_cast<int>(interior_.size()); }

  const std::vector<VertexId>& boundary() const { return boundary_; }
  const std::vector<VertexId>& interior() const { return interior_; }
  const std::vector<Edge>& edges() const { return edges_; }

  bool is_boundary(VertexId v) const { return position_[v] < num_boundary(); }

  /// Position of vertex `v` in the partitioned order.
  int position(VertexId v) const { return position_[v]; }
  /// Vertex at position `k` of the partitioned order.
  VertexId vertex_at(int k) const { return order_[k]; }

  /// Adjacency lists (neighbour ids, ascending).
  std::vector<std::vector<VertexId>> adjacency() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int num_vertices_;
  std::vector<VertexId> boundary_;
  std::vector<VertexId> interior_;
  std::vector<Edge> edges_;
  std::vector<int> position_;
  std::vector<VertexId> order_;
};

Graph build_graph(int num_vertices, const std::vector<VertexId>& boundary,
                  const std::vector<std::pair<VertexId, VertexId>>& edges);

bool is_connected(const Graph& g);

/// Connectivity of the subgraph induced by the interior vertices.
/// An empty interior counts as connected.
bool is_interior_connected(const Graph& g);

}  // namespace netinv
