#include "netinv/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <string>

namespace netinv {

namespace {

std::string pair_str(VertexId i, VertexId j) {
  return "{" + std::to_string(i) + "," + std::to_string(j) + "}";
}

// Breadth-first search restricted to vertices where keep[v] is true.
// Returns true when every kept vertex is reached from the first kept one.
bool connected_subset(const std::vector<std::vector<VertexId>>& adj,
                      const std::vector<bool>& keep) {
  const auto first = std::find(keep.begin(), keep.end(), true);
  if (first == keep.end()) return true;
  std::vector<bool> seen(keep.size(), false);
  std::queue<VertexId> frontier;
  const auto start = static_cast<VertexId>(first - keep.begin());
  frontier.push(start);
  seen[start] = true;
  while (!frontier.empty()) {
    const VertexId v = frontier.front();
    frontier.pop();
    for (VertexId w : adj[v]) {
      if (keep[w] && !seen[w]) {
        seen[w] = true;
        frontier.push(w);
      }
    }
  }
  for (std::size_t v = 0; v < keep.size(); ++v)
    if (keep[v] && !seen[v]) return false;
  return true;
}

}  // namespace

Graph::Graph(int num_vertices, std::vector<VertexId> boundary,
             const std::vector<std::pair<VertexId, VertexId>>& edges)
    : num_vertices_(num_vertices), boundary_(std::move(boundary)) {
  if (num_vertices_ <= 0)
    throw InvalidArgument("graph needs at least one vertex");
  if (boundary_.empty()) throw InvalidArgument("boundary must be nonempty");

  position_.assign(num_vertices_, -1);
  for (std::size_t k = 0; k < boundary_.size(); ++k) {
    const VertexId v = boundary_[k];
    if (v < 0 || v >= num_vertices_)
      throw InvalidArgument("boundary vertex " + std::to_string(v) +
                            " out of range");
    if (position_[v] != -1)
      throw InvalidArgument("boundary vertex " + std::to_string(v) +
                            " listed twice");
    position_[v] = static_cast<int>(k);
  }
  order_ = boundary_;
  for (VertexId v = 0; v < num_vertices_; ++v) {
    if (position_[v] == -1) {
      position_[v] = static_cast<int>(order_.size());
      order_.push_back(v);
      interior_.push_back(v);
    }
  }

  std::set<std::pair<VertexId, VertexId>> seen;
  edges_.reserve(edges.size());
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= num_vertices_ || j < 0 || j >= num_vertices_)
      throw InvalidArgument("edge " + pair_str(i, j) + " out of range");
    if (i == j) throw InvalidArgument("self-loop at vertex " + std::to_string(i));
    const Edge e{std::min(i, j), std::max(i, j)};
    if (!seen.emplace(e.tail, e.head).second)
      throw InvalidArgument("duplicate edge " + pair_str(e.tail, e.head));
    edges_.push_back(e);
  }
}

std::vector<std::vector<VertexId>> Graph::adjacency() const {
  std::vector<std::vector<VertexId>> adj(num_vertices_);
  for (const Edge& e : edges_) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

Graph build_graph(int num_vertices, const std::vector<VertexId>& boundary,
                  const std::vector<std::pair<VertexId, VertexId>>& edges) {
  return Graph(num_vertices, boundary, edges);
}

bool is_connected(const Graph& g) {
  return connected_subset(g.adjacency(),
                          std::vector<bool>(g.num_vertices(), true));
}

bool is_interior_connected(const Graph& g) {
  std::vector<bool> keep(g.num_vertices(), false);
  for (VertexId v : g.interior()) keep[v] = true;
  return connected_subset(g.adjacency(), keep);
}

}  // namespace netinv
