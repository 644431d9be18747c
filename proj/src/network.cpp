#include "tddsim/network.hpp"

#include <algorithm>
#include <json.hpp>

#include "tddsim/error.hpp"

namespace tddsim {

bool TensorNetwork::is_open(IndexId i) const {
  return std::find(open_indices.begin(), open_indices.end(), i) != open_indices.end();
}

std::vector<int> TensorNetwork::index_refcount() const {
  std::vector<int> ref(labels.size(), 0);
  for (const Tensor& t : tensors) {
    for (IndexId i : t.indices) ++ref[i.id];
  }
  return ref;
}

int TensorNetwork::gate_tensor_count() const {
  int count = 0;
  for (const TensorInfo& ti : info) count += ti.gate_count > 0 ? 1 : 0;
  return count;
}

TensorNetwork build_network(const Circuit& circuit, bool hyper_edges) {
  circuit.validate();
  const int n = circuit.num_qubits;
  TensorNetwork net;
  net.num_qubits = n;
  net.mode = circuit.mode;
  net.line_indices.resize(n);
  std::vector<int> wire_count(n, 0);

  auto fresh = [&](int q, std::string label) {
    IndexId id{static_cast<std::int32_t>(net.labels.size())};
    net.labels.push_back(std::move(label));
    net.line_indices[q].push_back(id);
    return id;
  };

  std::vector<IndexId> current(n);
  for (int q = 0; q < n; ++q) {
    if (circuit.mode == SimMode::State) {
      current[q] = fresh(q, "q" + std::to_string(q) + "_0");
      net.tensors.push_back(Tensor({current[q]}, {Complex{1.0, 0.0}, Complex{0.0, 0.0}}));
      net.info.push_back({{q}, 1, 0, -1});
    } else {
      current[q] = fresh(q, "in" + std::to_string(q));
      net.input_index.push_back(current[q]);
    }
  }

  for (const auto& layer : circuit.layers) {
    for (const Gate& g : layer) {
      std::vector<IndexId> ins;
      for (int q : g.qubits) ins.push_back(current[q]);
      std::vector<IndexId> outs;
      const bool merged = hyper_edges && is_diagonal(g.kind.type);
      if (!merged) {
        for (int q : g.qubits) {
          current[q] = fresh(q, "q" + std::to_string(q) + "_" + std::to_string(++wire_count[q]));
          outs.push_back(current[q]);
        }
      }
      net.tensors.push_back(gate_tensor(g.kind, ins, outs, hyper_edges));
      std::vector<int> qs = g.qubits;
      std::sort(qs.begin(), qs.end());
      net.info.push_back({std::move(qs), 2 * arity(g.kind.type), 1, g.layer});
    }
  }

  net.output_index = current;
  for (IndexId i : net.output_index) net.open_indices.push_back(i);
  for (IndexId i : net.input_index) {
    if (!net.is_open(i)) net.open_indices.push_back(i);
  }
  return net;
}

namespace {

// Positions within `result` of each canonical bit, or -1 when the result
// does not depend on that index.
std::vector<int> canonical_slots(const TensorNetwork& net, const Tensor& result) {
  std::vector<IndexId> canon = net.output_index;
  if (net.mode == SimMode::Unitary) canon.insert(canon.end(), net.input_index.begin(), net.input_index.end());
  std::vector<int> slot(canon.size(), -1);
  for (std::size_t k = 0; k < canon.size(); ++k) {
    for (int p = 0; p < result.rank(); ++p) {
      if (result.indices[p] == canon[k]) slot[k] = p;
    }
  }
  return slot;
}

}  // namespace

std::vector<Complex> canonical_amplitudes(const TensorNetwork& net, const Tensor& result) {
  const std::vector<int> slot = canonical_slots(net, result);
  const std::size_t m = slot.size();
  if (static_cast<int>(m) > kMaxDenseRank) throw GuardError("canonical layout too large");
  std::vector<Complex> out(std::size_t{1} << m);
  const int r = result.rank();
  std::vector<int> assigned(r);
  for (std::size_t x = 0; x < out.size(); ++x) {
    std::fill(assigned.begin(), assigned.end(), -1);
    bool consistent = true;
    for (std::size_t k = 0; k < m && consistent; ++k) {
      const int b = static_cast<int>((x >> (m - 1 - k)) & 1);
      if (slot[k] < 0) continue;
      int& a = assigned[slot[k]];
      if (a >= 0 && a != b) consistent = false;
      a = b;
    }
    if (!consistent) continue;
    std::size_t off = 0;
    for (int p = 0; p < r; ++p) off = (off << 1) | static_cast<std::size_t>(std::max(assigned[p], 0));
    out[x] = result.data[off];
  }
  return out;
}

bool canonical_assignment(const TensorNetwork& net, const std::string& bits,
                          std::vector<std::pair<IndexId, int>>& out) {
  const std::size_t n = static_cast<std::size_t>(net.num_qubits);
  const std::size_t want = net.mode == SimMode::Unitary ? 2 * n : n;
  if (bits.size() != want) {
    throw Error("bitstring needs " + std::to_string(want) + " characters, got " + std::to_string(bits.size()));
  }
  out.clear();
  for (std::size_t k = 0; k < bits.size(); ++k) {
    if (bits[k] != '0' && bits[k] != '1') throw Error("bitstring may only contain 0 and 1");
    const IndexId id = k < n ? net.output_index[k] : net.input_index[k - n];
    const int b = bits[k] - '0';
    bool seen = false;
    for (auto& [i, v] : out) {
      if (i == id) {
        seen = true;
        if (v != b) return false;
      }
    }
    if (!seen) out.emplace_back(id, b);
  }
  return true;
}

IndexOrder parse_index_order(const std::string& name) {
  if (name == "interleaved") return IndexOrder::Interleaved;
  if (name == "appearance") return IndexOrder::Appearance;
  throw Error("unknown index order '" + name + "'");
}

std::vector<int> index_levels(const TensorNetwork& net, IndexOrder order) {
  std::vector<int> level(net.labels.size(), -1);
  int next = 0;
  if (order == IndexOrder::Interleaved) {
    for (const auto& line : net.line_indices) {
      for (IndexId i : line) {
        if (level[i.id] < 0) level[i.id] = next++;
      }
    }
  } else {
    std::vector<bool> is_output(net.labels.size(), false);
    for (IndexId i : net.output_index) is_output[i.id] = true;
    for (std::size_t id = 0; id < level.size(); ++id) {
      if (!is_output[id]) level[id] = next++;
    }
    for (IndexId i : net.output_index) {
      if (level[i.id] < 0) level[i.id] = next++;
    }
  }
  for (int& l : level) {
    if (l < 0) l = next++;
  }
  return level;
}

std::string dump_network_json(const TensorNetwork& net) {
  nlohmann::json j;
  j["num_qubits"] = net.num_qubits;
  j["mode"] = net.mode == SimMode::State ? "state" : "unitary";
  auto labels_of = [&](const std::vector<IndexId>& ids) {
    nlohmann::json arr = nlohmann::json::array();
    for (IndexId i : ids) arr.push_back(net.labels[i.id]);
    return arr;
  };
  j["open_indices"] = labels_of(net.open_indices);
  nlohmann::json tensors = nlohmann::json::array();
  for (std::size_t k = 0; k < net.tensors.size(); ++k) {
    tensors.push_back({{"indices", labels_of(net.tensors[k].indices)},
                       {"rank", net.tensors[k].rank()},
                       {"qubits", net.info[k].qubits},
                       {"gates", net.info[k].gate_count}});
  }
  j["tensors"] = std::move(tensors);
  return j.dump(2);
}

Tensor contract_network_dense(const TensorNetwork& net, const ContractionOrder& order) {
  validate_order(order, net.tensors.size());
  std::vector<Tensor> list = net.tensors;
  std::vector<int> ref = net.index_refcount();
  std::vector<bool> open(net.labels.size(), false);
  for (IndexId i : net.open_indices) open[i.id] = true;

  for (auto [i, j] : order.pairs) {
    const Tensor& a = list[i];
    const Tensor& b = list[j];
    Tensor c = contract_pair_dense(a, b, [&](IndexId x) { return open[x.id] || ref[x.id] > 2; });
    for (IndexId x : a.indices) --ref[x.id];
    for (IndexId x : b.indices) --ref[x.id];
    for (IndexId x : c.indices) ++ref[x.id];
    list.erase(list.begin() + std::max(i, j));
    list.erase(list.begin() + std::min(i, j));
    list.push_back(std::move(c));
  }

  Tensor result = list.empty() ? Tensor() : std::move(list.front());
  // Open lines no tensor touches (an idle qubit in unitary mode) are
  // constant along that index.
  for (IndexId i : net.open_indices) {
    if (!result.has(i)) result = contract_pair_dense(result, Tensor({i}, {1.0, 1.0}), [](IndexId) { return true; });
  }
  return permute(result, net.open_indices);
}

}  // namespace tddsim
