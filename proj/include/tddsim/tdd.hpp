#pragma once

#include <climits>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tddsim/network.hpp"
#include "tddsim/tensor.hpp"
#include "tddsim/weight_table.hpp"

namespace tddsim {

using NodeId = std::uint32_t;

inline constexpr NodeId kTerminal = 0;
inline constexpr int kTerminalLevel = INT_MAX;

struct Edge {
  Complex w{0.0, 0.0};
  NodeId node = kTerminal;

  bool is_zero() const { return w == Complex{0.0, 0.0}; }
  static Edge zero() { return {}; }
  static Edge one() { return {Complex{1.0, 0.0}, kTerminal}; }

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Node {
  Edge low;
  Edge high;
  std::int32_t level = kTerminalLevel;  // -1 marks a free arena slot
  std::uint32_t ref = 0;
  NodeId next = kTerminal;  // unique-table bucket chain
};

/// A diagram root plus the indices it ranges over, sorted by level. The
/// index lists are only read when preparing an operation.
struct Tdd {
  Edge root;
  std::vector<IndexId> indices;
  std::vector<int> levels;
};

struct EngineConfig {
  std::size_t gc_limit = std::size_t{1} << 22;
  int cache_bits = 20;
  bool caches = true;
  std::size_t max_nodes = std::size_t{1} << 27;
  double tolerance = 1e-12;
};

struct EngineStats {
  std::uint64_t unique_lookups = 0;
  std::uint64_t contract_lookups = 0;
  std::uint64_t add_lookups = 0;
  std::uint64_t unique_hits = 0;
  std::uint64_t unique_misses = 0;
  std::uint64_t contract_hits = 0;
  std::uint64_t contract_misses = 0;
  std::uint64_t add_hits = 0;
  std::uint64_t add_misses = 0;
  std::uint64_t peak_nodes = 0;
  std::uint64_t gc_runs = 0;
  std::uint64_t gc_reclaimed = 0;
  std::uint64_t complex_muls = 0;
  std::uint64_t complex_adds = 0;
  std::uint64_t recursive_calls = 0;
};

double hit_rate(std::uint64_t hits, std::uint64_t misses);

/// Node arena (which doubles as the unique table), computed caches and
/// weight table. One engine must only be used from one thread at a time.
class Engine {
 public:
  explicit Engine(EngineConfig config = {});

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Canonical edge for the node (level, low, high): redundant nodes are
  /// skipped, weights are normalised by the larger-magnitude one and the
  /// node is hash-consed.
  Edge make_node(int level, Edge low, Edge high);

  /// `level_of` maps index ids to levels.
  Tdd tensor_to_tdd(const Tensor& t, std::span<const int> level_of);
  Tensor tdd_to_tensor(const Tdd& d) const;

  /// Contracts two diagrams. Indices present in both are summed unless
  /// `keep` holds for them, in which case they appear once in the result.
  Tdd contract(const Tdd& a, const Tdd& b, const std::function<bool(IndexId)>& keep);

  Edge add(Edge a, Edge b);
  Tdd add(const Tdd& a, const Tdd& b);

  void inc_ref(Edge e);
  void dec_ref(Edge e);

  /// Frees every node whose reference count is zero and clears the caches.
  /// Returns the number of nodes reclaimed.
  std::size_t garbage_collect();

  /// Runs garbage_collect when the live node count exceeds the limit.
  bool maybe_collect();

  Complex amplitude(const Tdd& d, std::span<const std::pair<IndexId, int>> assignment) const;

  /// Non-terminal nodes reachable from `e`, plus one for the terminal.
  std::size_t node_count(Edge e) const;

  std::size_t live_nodes() const { return nodes_.size() - 1 - free_.size(); }
  /// Arena slots including the terminal and free ones; free slots have level -1.
  std::size_t arena_size() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[id]; }
  int level(NodeId id) const { return nodes_[id].level; }
  const EngineStats& stats() const { return stats_; }
  const EngineConfig& config() const { return config_; }

  /// Graphviz rendering; 0-edges dashed red, 1-edges solid blue.
  std::string to_dot(const Tdd& d, const std::vector<std::string>& labels) const;

 private:
  struct ContractEntry {
    NodeId a = 0;
    NodeId b = 0;
    std::uint32_t ctx = 0;
    std::uint32_t epoch = 0;
    Edge result;
  };

  struct AddEntry {
    NodeId a = 0;
    NodeId b = 0;
    Complex ratio;
    std::uint32_t epoch = 0;
    Edge result;
  };

  NodeId lookup_or_insert(int level, Edge low, Edge high);
  void rebuild_buckets(std::size_t count);
  std::size_t bucket_of(int level, const Edge& low, const Edge& high) const;

  Edge contract_rec(NodeId a, NodeId b);
  Edge add_core(NodeId a, NodeId b, Complex ratio);
  int summed_from(int level) const;

  Edge scale(Edge e, Complex w);
  Complex mul(Complex x, Complex y);

  EngineConfig config_;
  EngineStats stats_;
  WeightTable weights_;

  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  std::vector<NodeId> buckets_;

  std::vector<ContractEntry> contract_cache_;
  std::vector<AddEntry> add_cache_;
  std::uint32_t epoch_ = 1;

  std::map<std::vector<int>, std::uint32_t> context_ids_;
  std::vector<int> summed_;  // ascending levels summed by the running contraction
  std::uint32_t ctx_ = 0;
};

/// Converts each tensor, contracts pairs in order while maintaining root
/// reference counts, and collects garbage when the node store passes the
/// configured limit. The returned diagram stays referenced;
/// release it with engine.dec_ref(result.root).
Tdd contract_network(Engine& engine, const TensorNetwork& net, const ContractionOrder& order,
                     std::span<const int> level_of);

/// Stats as a JSON object; `extra` entries are appended verbatim.
std::string stats_json(const EngineStats& stats, std::uint64_t final_nodes,
                       const std::vector<std::pair<std::string, double>>& extra = {});

}  // namespace tddsim
