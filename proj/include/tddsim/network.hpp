#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tddsim/circuit.hpp"
#include "tddsim/tensor.hpp"

namespace tddsim {

/// Bookkeeping carried alongside each tensor of a network.
struct TensorInfo {
  std::vector<int> qubits;   // qubit lines the tensor touches, ascending
  int nominal_rank = 0;      // 2 * arity for gates, 1 for state tensors
  int gate_count = 0;        // gates folded into this tensor
  int layer = -1;            // -1 for state tensors
};

struct TensorNetwork {
  int num_qubits = 0;
  SimMode mode = SimMode::State;
  std::vector<Tensor> tensors;
  std::vector<TensorInfo> info;

  /// Distinct open indices: outputs by qubit, then inputs (unitary mode) not
  /// already listed.
  std::vector<IndexId> open_indices;
  std::vector<IndexId> input_index;   // per qubit; unitary mode only
  std::vector<IndexId> output_index;  // per qubit

  /// Per qubit line, its indices in time order.
  std::vector<std::vector<IndexId>> line_indices;

  std::vector<std::string> labels;  // by index id

  int num_indices() const { return static_cast<int>(labels.size()); }
  bool is_open(IndexId i) const;

  /// Number of tensors referencing each index, by index id.
  std::vector<int> index_refcount() const;

  /// Count of tensors that came from gates, i.e. excluding state tensors.
  int gate_tensor_count() const;
};

TensorNetwork build_network(const Circuit& circuit, bool hyper_edges = true);

/// Reorders a tensor over exactly the network's open indices into the
/// canonical layout: state mode [out_0 .. out_{n-1}], unitary mode
/// [out_0 .. out_{n-1}, in_0 .. in_{n-1}], qubit 0 most significant. Lines
/// whose input and output share one index yield zeros off the diagonal.
std::vector<Complex> canonical_amplitudes(const TensorNetwork& net, const Tensor& result);

/// Maps a canonical bitstring (see canonical_amplitudes) to an assignment of
/// the open indices. Returns false when a merged line receives two
/// different bits, meaning the amplitude is exactly zero.
bool canonical_assignment(const TensorNetwork& net, const std::string& bits, std::vector<std::pair<IndexId, int>>& out);

enum class IndexOrder { Interleaved, Appearance };

IndexOrder parse_index_order(const std::string& name);

/// Level of every index (by id); smaller levels sit closer to the root.
/// Interleaved: qubit-major, each line's indices in time order. Appearance:
/// creation order with the open output indices moved last.
std::vector<int> index_levels(const TensorNetwork& net, IndexOrder order);

std::string dump_network_json(const TensorNetwork& net);

enum class TetrisConstraint { Max, Min };

struct TetrisStats {
  std::int64_t gates_visited = 0;
  std::int64_t stack_ops = 0;
  std::int64_t merges = 0;
};

/// Rank simplification over per-qubit stacks. `net` must come straight from
/// build_network so tensors are in circuit order.
TensorNetwork tetris_simplify(const TensorNetwork& net, TetrisConstraint constraint = TetrisConstraint::Max,
                              TetrisStats* stats = nullptr);

/// Sequence of (position, position) pairs. Each step contracts the two
/// listed tensors, removes them from the list and appends the result.
struct ContractionOrder {
  std::vector<std::pair<int, int>> pairs;
};

ContractionOrder order_sequential(const TensorNetwork& net);
ContractionOrder order_greedy(const TensorNetwork& net);
ContractionOrder order_random(const TensorNetwork& net, std::uint64_t seed);

ContractionOrder parse_order_json(const std::string& text, const TensorNetwork& net);
ContractionOrder order_import(const std::string& path, const TensorNetwork& net);

/// Throws OrderError unless the order has T-1 pairs that stay in range.
void validate_order(const ContractionOrder& order, std::size_t tensor_count);

/// Dense cost model: 8 * 2^|union of indices| per pairwise step.
double order_flops(const TensorNetwork& net, const ContractionOrder& order);

/// Rank of the largest intermediate tensor produced along the order.
int order_max_rank(const TensorNetwork& net, const ContractionOrder& order);

/// Replays the order with dense tensors; the result is over the open indices.
Tensor contract_network_dense(const TensorNetwork& net, const ContractionOrder& order);

}  // namespace tddsim
