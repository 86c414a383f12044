#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace exdiff {

// Undirected connected graph over agents 0..n-1.
//
// Neighbor lists are sorted and always contain the agent itself: every agent
// runs a self-loop, so degree(k) counts k as well. All combination-rule
// formulas downstream use this self-inclusive degree convention.
class Network {
 public:
  Network() = default;

  // Builds from an undirected edge list (0-based endpoints). Duplicate edges
  // and explicit self-pairs are ignored; self-loops are implied for every
  // agent. Throws std::invalid_argument on n < 1, endpoints out of range, or
  // a disconnected result.
  static Network from_edges(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return static_cast<int>(neighbors_.size()); }

  // Self-inclusive degree |N_k| (>= 1).
  int degree(int k) const { return static_cast<int>(neighbors_.at(k).size()); }

  // True iff l is in N_k. adjacent(k, k) is always true.
  bool adjacent(int k, int l) const;

  // Sorted self-inclusive neighbor list of agent k.
  const std::vector<int>& neighbors(int k) const { return neighbors_.at(k); }

  // Undirected edge list without self-loops, each edge once with i < j,
  // sorted lexicographically. Inverse of from_edges.
  std::vector<std::pair<int, int>> edges() const;

 private:
  std::vector<std::vector<int>> neighbors_;
};

// Erdos-Renyi style generator: each unordered pair {i, j} becomes an edge
// independently with probability edge_prob, then a deterministic augmentation
// step chains any remaining components onto the first one, so the result is
// always connected. Fully reproducible: same (n, edge_prob, seed) gives the
// same graph. edge_prob must lie in (0, 1].
Network generate_random_network(int n, double edge_prob, std::uint64_t seed);

// Two-tier hub/leaf topology: `hubs` fully interconnected agents, each also
// linked to every leaf; each of the `leaves` agents touches only the hubs.
// With (2, 18): hub degree 20, leaf degree 3 (self-inclusive).
Network generate_unbalanced_network(int hubs, int leaves);

// Reads a network from JSON: {"n": <int>, "edges": [[i, j], ...]} with
// 0-based endpoints. Throws std::invalid_argument on malformed input or a
// disconnected graph, std::runtime_error if the file cannot be read.
Network load_network(const std::string& path);

// Writes the from_edges-compatible JSON form of `net` to `path`.
void save_network(const Network& net, const std::string& path);

}  // namespace exdiff
