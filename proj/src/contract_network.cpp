#include <algorithm>
#include <json.hpp>

#include "tddsim/error.hpp"
#include "tddsim/tdd.hpp"

namespace tddsim {

Tdd contract_network(Engine& engine, const TensorNetwork& net, const ContractionOrder& order,
                     std::span<const int> level_of) {
  validate_order(order, net.tensors.size());

  std::vector<bool> open(net.labels.size(), false);
  for (IndexId i : net.open_indices) open[i.id] = true;
  std::vector<int> ref = net.index_refcount();

  std::vector<Tdd> list;
  list.reserve(net.tensors.size());
  for (const Tensor& t : net.tensors) {
    list.push_back(engine.tensor_to_tdd(t, level_of));
    engine.inc_ref(list.back().root);
  }

  auto keep = [&](IndexId i) { return open[i.id] || ref[i.id] > 2; };
  for (auto [i, j] : order.pairs) {
    Tdd c = engine.contract(list[i], list[j], keep);
    for (IndexId x : list[i].indices) --ref[x.id];
    for (IndexId x : list[j].indices) --ref[x.id];
    for (IndexId x : c.indices) ++ref[x.id];
    engine.dec_ref(list[i].root);
    engine.dec_ref(list[j].root);
    engine.inc_ref(c.root);
    list.erase(list.begin() + std::max(i, j));
    list.erase(list.begin() + std::min(i, j));
    list.push_back(std::move(c));
    engine.maybe_collect();
  }

  Tdd result;
  if (list.empty()) {
    result.root = Edge::one();
  } else {
    result = std::move(list.front());
  }
  // Idle open lines still belong to the result; the diagram is constant
  // along them.
  for (IndexId i : net.open_indices) {
    if (std::find(result.indices.begin(), result.indices.end(), i) != result.indices.end()) continue;
    const int lvl = level_of[i.id];
    const auto pos = std::lower_bound(result.levels.begin(), result.levels.end(), lvl) - result.levels.begin();
    result.levels.insert(result.levels.begin() + pos, lvl);
    result.indices.insert(result.indices.begin() + pos, i);
  }
  return result;
}

std::string stats_json(const EngineStats& s, std::uint64_t final_nodes,
                       const std::vector<std::pair<std::string, double>>& extra) {
  nlohmann::ordered_json j;
  j["unique_hits"] = s.unique_hits;
  j["unique_misses"] = s.unique_misses;
  j["contract_hits"] = s.contract_hits;
  j["contract_misses"] = s.contract_misses;
  j["add_hits"] = s.add_hits;
  j["add_misses"] = s.add_misses;
  j["peak_nodes"] = s.peak_nodes;
  j["final_nodes"] = final_nodes;
  j["gc_runs"] = s.gc_runs;
  j["complex_muls"] = s.complex_muls;
  j["complex_adds"] = s.complex_adds;
  j["recursive_calls"] = s.recursive_calls;
  j["unique_hit_rate"] = hit_rate(s.unique_hits, s.unique_misses);
  j["contract_hit_rate"] = hit_rate(s.contract_hits, s.contract_misses);
  j["add_hit_rate"] = hit_rate(s.add_hits, s.add_misses);
  for (const auto& [k, v] : extra) j[k] = v;
  return j.dump(2);
}

}  // namespace tddsim
