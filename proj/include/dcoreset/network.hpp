#pragma once

// Communication topologies, rooted spanning trees, the flooding protocol,
// tree converge-cast, and exact accounting of everything transmitted.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "dcoreset/error.hpp"
#include "dcoreset/rng.hpp"

namespace dcoreset {

struct Edge {
  std::size_t u;
  std::size_t v;

  /// Same edge with u < v.
  Edge normalized() const noexcept { return u < v ? Edge{u, v} : Edge{v, u}; }

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

enum class TopologyKind { Random, Grid, Preferential, Custom };

inline std::string to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::Random: return "random";
    case TopologyKind::Grid: return "grid";
    case TopologyKind::Preferential: return "preferential";
    case TopologyKind::Custom: return "custom";
  }
  return "custom";
}

inline TopologyKind parse_topology_kind(std::string_view s) {
  if (s == "random") return TopologyKind::Random;
  if (s == "grid") return TopologyKind::Grid;
  if (s == "preferential") return TopologyKind::Preferential;
  if (s == "custom") return TopologyKind::Custom;
  throw Error("unknown topology kind '" + std::string(s) + "'");
}

/// Undirected simple graph over sites 0..n-1.
class Topology {
 public:
  Topology(std::size_t n, std::vector<Edge> edges, TopologyKind kind = TopologyKind::Custom)
      : n_(n), kind_(kind), adjacency_(n) {
    if (n == 0) throw Error("topology needs at least one site");
    for (Edge& e : edges) {
      if (e.u >= n || e.v >= n) throw Error("edge endpoint out of range");
      if (e.u == e.v) throw Error("self-loop at site " + std::to_string(e.u));
      e = e.normalized();
    }
    std::sort(edges.begin(), edges.end());
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) throw Error("duplicate edge");
    edges_ = std::move(edges);
    for (const Edge& e : edges_) {
      adjacency_[e.u].push_back(e.v);
      adjacency_[e.v].push_back(e.u);
    }
    for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return edges_.size(); }
  TopologyKind kind() const noexcept { return kind_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  /// Neighbors in ascending id order.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::size_t degree(std::size_t i) const { return adjacency_.at(i).size(); }

  std::size_t max_degree() const {
    std::size_t best = 0;
    for (const auto& nb : adjacency_) best = std::max(best, nb.size());
    return best;
  }

  /// Hop distances from `source`; unreachable sites hold SIZE_MAX.
  std::vector<std::size_t> hop_distances(std::size_t source) const {
    std::vector<std::size_t> dist(n_, std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{source};
    dist.at(source) = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      for (std::size_t y : adjacency_[x])
        if (dist[y] == std::numeric_limits<std::size_t>::max()) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
    }
    return dist;
  }

  bool is_connected() const {
    const auto dist = hop_distances(0);
    return std::none_of(dist.begin(), dist.end(),
                        [](std::size_t d) { return d == std::numeric_limits<std::size_t>::max(); });
  }

  std::size_t eccentricity(std::size_t source) const {
    const auto dist = hop_distances(source);
    return *std::max_element(dist.begin(), dist.end());
  }

 private:
  std::size_t n_;
  TopologyKind kind_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

struct TopologyParams {
  double p = 0.3;          // Random: edge probability
  std::size_t rows = 0;    // Grid: 0 picks the most square factorization
  std::size_t cols = 0;
  std::size_t attach = 2;  // Preferential: edges added per new site
};

inline constexpr std::size_t kMaxTopologyAttempts = 1000;

/// Random: G(n, p), redrawn until connected. Grid: 4-neighbour lattice.
/// Preferential: starts from a clique on attach+1 sites; each later site links
/// to `attach` distinct earlier sites chosen proportionally to degree, giving
/// m = attach(attach+1)/2 + attach(n - attach - 1).
inline Topology gen_topology(TopologyKind kind, std::size_t n, const TopologyParams& params, Rng& rng) {
  if (n < 2) throw Error("gen_topology: need at least 2 sites");
  std::vector<Edge> edges;
  switch (kind) {
    case TopologyKind::Random: {
      if (!(params.p > 0.0 && params.p <= 1.0)) throw Error("gen_topology: p must be in (0, 1]");
      std::bernoulli_distribution coin(params.p);
      for (std::size_t attempt = 0; attempt < kMaxTopologyAttempts; ++attempt) {
        edges.clear();
        for (std::size_t u = 0; u < n; ++u)
          for (std::size_t v = u + 1; v < n; ++v)
            if (coin(rng)) edges.push_back({u, v});
        Topology g(n, edges, kind);
        if (g.is_connected()) return g;
      }
      throw Error("gen_topology: no connected random graph after " + std::to_string(kMaxTopologyAttempts) +
                  " attempts");
    }
    case TopologyKind::Grid: {
      std::size_t rows = params.rows, cols = params.cols;
      if (rows == 0 && cols == 0) {
        for (auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n))); r >= 2; --r)
          if (n % r == 0) {
            rows = r;
            cols = n / r;
            break;
          }
        if (rows == 0) throw Error("gen_topology: " + std::to_string(n) + " sites do not factor into a grid");
      } else if (rows == 0) {
        rows = n / cols;
      } else if (cols == 0) {
        cols = n / rows;
      }
      if (rows * cols != n) throw Error("gen_topology: grid shape does not match site count");
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t id = r * cols + c;
          if (c + 1 < cols) edges.push_back({id, id + 1});
          if (r + 1 < rows) edges.push_back({id, id + cols});
        }
      return Topology(n, std::move(edges), kind);
    }
    case TopologyKind::Preferential: {
      const std::size_t attach = params.attach;
      if (attach == 0) throw Error("gen_topology: attach must be >= 1");
      if (n <= attach) throw Error("gen_topology: need more sites than attach");
      std::vector<double> degree(n, 0.0);
      for (std::size_t u = 0; u <= attach; ++u)
        for (std::size_t v = u + 1; v <= attach; ++v) {
          edges.push_back({u, v});
          degree[u] += 1.0;
          degree[v] += 1.0;
        }
      for (std::size_t v = attach + 1; v < n; ++v) {
        std::vector<double> mass(degree.begin(), degree.begin() + static_cast<std::ptrdiff_t>(v));
        for (std::size_t a = 0; a < attach; ++a) {
          const std::size_t target = DiscreteSampler(mass)(rng);
          mass[target] = 0.0;
          edges.push_back({target, v});
          degree[target] += 1.0;
          degree[v] += 1.0;
        }
      }
      return Topology(n, std::move(edges), kind);
    }
    case TopologyKind::Custom:
      break;
  }
  throw Error("gen_topology: custom topologies are imported, not generated");
}

/// Edge-list text format: "n m" followed by m lines "u v", 0-indexed.
inline void write_edge_list(std::ostream& out, const Topology& g) {
  out << g.n() << ' ' << g.m() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

inline Topology read_edge_list(std::istream& in, TopologyKind kind = TopologyKind::Custom) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw ParseError(1, "expected header 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Edge e{};
    if (!(in >> e.u >> e.v)) throw ParseError(i + 2, "expected edge 'u v'");
    edges.push_back(e);
  }
  return Topology(n, std::move(edges), kind);
}

/// Rooted spanning tree over sites 0..n-1.
class RootedTree {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  /// parent[root] must be kNoParent; every other site must reach the root.
  RootedTree(std::size_t root, std::vector<std::size_t> parent)
      : root_(root), parent_(std::move(parent)), depth_(parent_.size(), kNoParent), children_(parent_.size()) {
    const std::size_t n = parent_.size();
    if (root >= n) throw Error("tree root out of range");
    if (parent_[root] != kNoParent) throw Error("tree root must not have a parent");
    for (std::size_t i = 0; i < n; ++i) {
      if (i == root) continue;
      if (parent_[i] >= n || parent_[i] == i) throw Error("invalid parent for site " + std::to_string(i));
      children_[parent_[i]].push_back(i);
    }
    depth_[root] = 0;
    std::deque<std::size_t> queue{root};
    std::size_t seen = 0;
    while (!queue.empty()) {
      const std::size_t x = queue.front();
      queue.pop_front();
      ++seen;
      height_ = std::max(height_, depth_[x]);
      for (std::size_t c : children_[x]) {
        depth_[c] = depth_[x] + 1;
        queue.push_back(c);
      }
    }
    if (seen != n) throw Error("parent map does not form a tree spanning all sites");
  }

  std::size_t n() const noexcept { return parent_.size(); }
  std::size_t root() const noexcept { return root_; }
  std::size_t parent(std::size_t i) const { return parent_.at(i); }
  std::size_t depth(std::size_t i) const { return depth_.at(i); }
  std::size_t height() const noexcept { return height_; }
  const std::vector<std::size_t>& children(std::size_t i) const { return children_.at(i); }

  /// Children before parents.
  std::vector<std::size_t> post_order() const {
    std::vector<std::size_t> order;
    order.reserve(n());
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < children_[node].size()) {
        const std::size_t child = children_[node][next++];
        stack.push_back({child, 0});
      } else {
        order.push_back(node);
        stack.pop_back();
      }
    }
    return order;
  }

 private:
  std::size_t root_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> depth_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t height_ = 0;
};

/// BFS tree from `root`, exploring neighbours in ascending id order.
inline RootedTree bfs_tree(const Topology& g, std::size_t root) {
  if (root >= g.n()) throw Error("bfs_tree: root out of range");
  std::vector<std::size_t> parent(g.n(), RootedTree::kNoParent);
  std::vector<bool> visited(g.n(), false);
  visited[root] = true;
  std::deque<std::size_t> queue{root};
  while (!queue.empty()) {
    const std::size_t x = queue.front();
    queue.pop_front();
    for (std::size_t y : g.neighbors(x))
      if (!visited[y]) {
        visited[y] = true;
        parent[y] = x;
        queue.push_back(y);
      }
  }
  if (std::find(visited.begin(), visited.end(), false) != visited.end())
    throw Error("bfs_tree: topology is not connected");
  return RootedTree(root, std::move(parent));
}

/// BFS tree from a uniformly chosen root.
inline RootedTree spanning_tree(const Topology& g, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, g.n() - 1);
  return bfs_tree(g, pick(rng));
}

enum class Unit { Point, Scalar };

struct Traffic {
  std::uint64_t point_units = 0;
  std::uint64_t scalar_units = 0;

  friend bool operator==(const Traffic&, const Traffic&) = default;
};

/// Exact count of what crossed each edge. A point travels with its weight
/// for one point-unit; standalone reals are scalar-units.
class CommLedger {
 public:
  void charge(std::size_t u, std::size_t v, Unit unit, std::uint64_t units) {
    Traffic& t = per_edge_[Edge{u, v}.normalized()];
    if (unit == Unit::Point) {
      t.point_units += units;
      total_.point_units += units;
    } else {
      t.scalar_units += units;
      total_.scalar_units += units;
    }
  }

  std::uint64_t point_units() const noexcept { return total_.point_units; }
  std::uint64_t scalar_units() const noexcept { return total_.scalar_units; }
  const std::map<Edge, Traffic>& per_edge() const noexcept { return per_edge_; }

  /// Point-units plus scalar-units converted at 1 scalar = 1/(d+1) point-unit.
  double combined_units(std::size_t dim) const {
    return static_cast<double>(total_.point_units) +
           static_cast<double>(total_.scalar_units) / static_cast<double>(dim + 1);
  }

  CommLedger& operator+=(const CommLedger& other) {
    for (const auto& [e, t] : other.per_edge_) {
      charge(e.u, e.v, Unit::Point, t.point_units);
      charge(e.u, e.v, Unit::Scalar, t.scalar_units);
    }
    return *this;
  }

 private:
  Traffic total_;
  std::map<Edge, Traffic> per_edge_;
};

struct FloodRecord {
  /// holds[i][j]: site i ended up holding item j.
  std::vector<std::vector<bool>> holds;
  std::size_t rounds = 0;
  std::uint64_t transmissions = 0;
};

/// Synchronous flooding. Every site starts with its own item and sends it to
/// all neighbours; a site receiving an item for the first time forwards it to
/// all neighbours, including the sender. Each item is therefore transmitted
/// exactly 2m times, and each transmission of item j costs item_sizes[j].
inline FloodRecord flood(const Topology& g, std::span<const std::uint64_t> item_sizes, CommLedger& ledger,
                         Unit unit = Unit::Point) {
  const std::size_t n = g.n();
  if (item_sizes.size() != n) throw Error("flood: one item per site required");
  if (!g.is_connected()) throw Error("flood: topology is not connected");

  struct Message {
    std::size_t from, to, item;
  };
  FloodRecord record;
  record.holds.assign(n, std::vector<bool>(n, false));
  std::vector<Message> in_flight;

  auto send_all = [&](std::size_t from, std::size_t item) {
    for (std::size_t to : g.neighbors(from)) {
      in_flight.push_back({from, to, item});
      ledger.charge(from, to, unit, item_sizes[item]);
      ++record.transmissions;
    }
  };

  for (std::size_t i = 0; i < n; ++i) {
    record.holds[i][i] = true;
    send_all(i, i);
  }
  std::size_t missing = n * n - n;
  while (!in_flight.empty()) {
    std::vector<Message> delivering;
    delivering.swap(in_flight);
    if (missing > 0) ++record.rounds;
    for (const Message& msg : delivering) {
      if (record.holds[msg.to][msg.item]) continue;
      record.holds[msg.to][msg.item] = true;
      --missing;
      send_all(msg.to, msg.item);
    }
  }
  return record;
}

/// Every site learns every site's scalar; costs 2mn scalar-units.
inline std::vector<std::vector<double>> broadcast_scalars(const Topology& g, std::span<const double> values,
                                                          CommLedger& ledger) {
  const std::vector<std::uint64_t> sizes(g.n(), 1);
  const FloodRecord record = flood(g, sizes, ledger, Unit::Scalar);
  std::vector<std::vector<double>> known(g.n(), std::vector<double>(g.n(), 0.0));
  for (std::size_t i = 0; i < g.n(); ++i)
    for (std::size_t j = 0; j < g.n(); ++j) {
      if (!record.holds[i][j]) throw Error("broadcast_scalars: delivery incomplete");
      known[i][j] = values[j];
    }
  return known;
}

struct UpcastRecord {
  /// Items held at the root after the converge-cast, in site order.
  std::vector<std::size_t> delivered;
  std::uint64_t units = 0;
};

/// Sends each site's payload hop by hop to the root; a payload from depth l
/// costs l * size.
inline UpcastRecord tree_upcast(const RootedTree& tree, std::span<const std::uint64_t> payload_sizes,
                                CommLedger& ledger, Unit unit = Unit::Point) {
  if (payload_sizes.size() != tree.n()) throw Error("tree_upcast: one payload per site required");
  UpcastRecord record;
  for (std::size_t i = 0; i < tree.n(); ++i) {
    for (std::size_t x = i; x != tree.root(); x = tree.parent(x)) {
      ledger.charge(x, tree.parent(x), unit, payload_sizes[i]);
      record.units += payload_sizes[i];
    }
    record.delivered.push_back(i);
  }
  return record;
}

/// Sends `units` from the root to every other site along tree edges; each
/// edge carries it once.
inline void tree_downcast(const RootedTree& tree, std::uint64_t units, CommLedger& ledger, Unit unit) {
  for (std::size_t i = 0; i < tree.n(); ++i)
    if (i != tree.root()) ledger.charge(i, tree.parent(i), unit, units);
}

/// How local costs and coreset portions move between sites.
class Communicator {
 public:
  virtual ~Communicator() = default;

  virtual std::size_t sites() const = 0;

  /// Makes the per-site local costs available wherever allocation is decided
  /// and returns them in site order.
  virtual std::vector<double> share_local_costs(std::span<const double> costs, CommLedger& ledger) const = 0;

  /// Moves coreset portions (sizes in points) to where the final clustering
  /// is computed.
  virtual void share_portions(std::span<const std::uint64_t> sizes, CommLedger& ledger) const = 0;
};

/// Flooding over an arbitrary connected graph: every site ends up with all
/// costs and all portions.
class FloodingCommunicator final : public Communicator {
 public:
  explicit FloodingCommunicator(Topology g) : g_(std::move(g)) {}

  std::size_t sites() const override { return g_.n(); }
  const Topology& topology() const noexcept { return g_; }

  std::vector<double> share_local_costs(std::span<const double> costs, CommLedger& ledger) const override {
    const auto known = broadcast_scalars(g_, costs, ledger);
    for (const auto& row : known)
      if (row != known.front()) throw Error("sites disagree on the local costs");
    return known.front();
  }

  void share_portions(std::span<const std::uint64_t> sizes, CommLedger& ledger) const override {
    flood(g_, sizes, ledger, Unit::Point);
  }

 private:
  Topology g_;
};

/// Converge-cast on a rooted tree. Costs travel to the root (sum of depths);
/// the root sends back down the global total (one scalar per tree edge) and
/// each site's sample count (routed to that site, sum of depths again).
/// Portions travel to the root.
class TreeCommunicator final : public Communicator {
 public:
  explicit TreeCommunicator(RootedTree tree) : tree_(std::move(tree)) {}

  std::size_t sites() const override { return tree_.n(); }
  const RootedTree& tree() const noexcept { return tree_; }

  std::vector<double> share_local_costs(std::span<const double> costs, CommLedger& ledger) const override {
    const std::vector<std::uint64_t> ones(tree_.n(), 1);
    tree_upcast(tree_, ones, ledger, Unit::Scalar);
    tree_downcast(tree_, 1, ledger, Unit::Scalar);
    tree_upcast(tree_, ones, ledger, Unit::Scalar);
    return {costs.begin(), costs.end()};
  }

  void share_portions(std::span<const std::uint64_t> sizes, CommLedger& ledger) const override {
    tree_upcast(tree_, sizes, ledger, Unit::Point);
  }

 private:
  RootedTree tree_;
};

}  // namespace dcoreset
