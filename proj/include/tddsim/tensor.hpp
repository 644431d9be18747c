#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tddsim/gate.hpp"

namespace tddsim {

/// Largest rank a dense tensor may have (2^30 complex values, 16 GiB).
inline constexpr int kMaxDenseRank = 30;

/// Identifier of a binary tensor index. Labels live in the owning network.
struct IndexId {
  std::int32_t id = -1;

  friend auto operator<=>(const IndexId&, const IndexId&) = default;
};

/// Dense complex tensor, row-major over `indices` (first index is the most
/// significant bit of the flat offset). Every index has dimension 2.
struct Tensor {
  std::vector<IndexId> indices;
  std::vector<Complex> data;

  Tensor() : data{Complex{1.0, 0.0}} {}
  Tensor(std::vector<IndexId> idx, std::vector<Complex> values);

  int rank() const { return static_cast<int>(indices.size()); }
  bool has(IndexId i) const;

  /// Value at the given per-index bit assignment, in `indices` order.
  Complex at(std::span<const int> bits) const;
};

/// Reorders the tensor's axes to `order`, which must be a permutation of its
/// indices.
Tensor permute(const Tensor& t, std::span<const IndexId> order);

/// Pairwise contraction. Indices shared by `a` and `b` are summed unless
/// `keep(index)` is true, in which case they appear once in the result.
/// Result index order: a's surviving indices, then b's remaining ones.
Tensor contract_pair_dense(const Tensor& a, const Tensor& b, const std::function<bool(IndexId)>& keep);

/// Tensor of a gate. With `hyper` set, a diagonal gate becomes a rank-a
/// tensor over its per-qubit indices `ins`; otherwise the layout is
/// [ins..., outs...] with T[in, out] = U[out][in].
Tensor gate_tensor(const GateKind& kind, std::span<const IndexId> ins, std::span<const IndexId> outs, bool hyper);

/// Largest elementwise modulus of a - b; both must have the same index list.
double max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace tddsim

template <>
struct std::hash<tddsim::IndexId> {
  std::size_t operator()(const tddsim::IndexId& i) const noexcept { return std::hash<std::int32_t>{}(i.id); }
};
