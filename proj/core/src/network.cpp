#include "exdiff/network.hpp"

#include <algorithm>
#include <fstream>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace exdiff {

namespace {

// BFS from agent 0 over self-inclusive neighbor lists.
bool connected(const std::vector<std::vector<int>>& neighbors) {
  const int n = static_cast<int>(neighbors.size());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int reached = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : neighbors[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n;
}

Network from_adjacency_sets(int n, const std::vector<std::set<int>>& adj) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j : adj[i])
      if (i < j) edges.emplace_back(i, j);
  return Network::from_edges(n, edges);
}

}  // namespace

Network Network::from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
  if (n < 1) throw std::invalid_argument("network: need at least one agent");
  std::vector<std::set<int>> adj(n);
  for (int k = 0; k < n; ++k) adj[k].insert(k);  // implied self-loop
  for (const auto& [i, j] : edges) {
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw std::invalid_argument("network: edge endpoint out of range");
    if (i == j) continue;  // explicit self-pairs are redundant
    adj[i].insert(j);
    adj[j].insert(i);
  }
  Network net;
  net.neighbors_.reserve(n);
  for (int k = 0; k < n; ++k)
    net.neighbors_.emplace_back(adj[k].begin(), adj[k].end());
  if (!connected(net.neighbors_))
    throw std::invalid_argument("network: graph is not connected");
  return net;
}

bool Network::adjacent(int k, int l) const {
  const auto& nk = neighbors_.at(k);
  return std::binary_search(nk.begin(), nk.end(), l);
}

std::vector<std::pair<int, int>> Network::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j : neighbors_[i])
      if (i < j) out.emplace_back(i, j);
  return out;
}

Network generate_random_network(int n, double edge_prob, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("network: need at least one agent");
  if (!(edge_prob > 0.0 && edge_prob <= 1.0))
    throw std::invalid_argument("network: edge_prob must lie in (0, 1]");
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::set<int>> adj(n);
  for (int k = 0; k < n; ++k) adj[k].insert(k);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (unif(gen) < edge_prob) {
        adj[i].insert(j);
        adj[j].insert(i);
      }

  // Deterministic augmentation: chain the lowest-index node of every stray
  // component onto the component of agent 0, so the graph is always
  // connected without further random draws.
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp[s] = n_comp;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u])
        if (comp[v] < 0) {
          comp[v] = n_comp;
          q.push(v);
        }
    }
    ++n_comp;
  }
  if (n_comp > 1) {
    std::vector<int> rep(n_comp, -1);  // lowest-index node per component
    for (int k = n - 1; k >= 0; --k) rep[comp[k]] = k;
    for (int c = 1; c < n_comp; ++c) {
      adj[rep[0]].insert(rep[c]);
      adj[rep[c]].insert(rep[0]);
    }
  }
  return from_adjacency_sets(n, adj);
}

Network generate_unbalanced_network(int hubs, int leaves) {
  if (hubs < 1) throw std::invalid_argument("network: need at least one hub");
  if (leaves < 1) throw std::invalid_argument("network: need at least one leaf");
  const int n = hubs + leaves;
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < hubs; ++i)
    for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Network::from_edges(n, edges);
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("network: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("network: JSON parse failure in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("edges") ||
      !j["n"].is_number_integer() || !j["edges"].is_array())
    throw std::invalid_argument("network: expected {\"n\": int, \"edges\": [[i,j],...]} in " + path);
  const int n = j["n"].get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer())
      throw std::invalid_argument("network: each edge must be a pair of integers in " + path);
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  return Network::from_edges(n, edges);
}

void save_network(const Network& net, const std::string& path) {
  nlohmann::json j;
  j["n"] = net.size();
  auto edges = nlohmann::json::array();
  for (const auto& [i, jj] : net.edges()) edges.push_back({i, jj});
  j["edges"] = edges;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("network: cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace exdiff
