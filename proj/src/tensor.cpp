#include "tddsim/tensor.hpp"

#include <algorithm>
#include <cstddef>

#include "tddsim/error.hpp"

namespace tddsim {

namespace {

std::size_t stride_of(const std::vector<IndexId>& idx, IndexId i) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] == i) return std::size_t{1} << (idx.size() - 1 - k);
  }
  return 0;
}

}  // namespace

Tensor::Tensor(std::vector<IndexId> idx, std::vector<Complex> values)
    : indices(std::move(idx)), data(std::move(values)) {
  if (indices.size() >= 63 || data.size() != (std::size_t{1} << indices.size())) {
    throw Error("tensor data size does not match its rank");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    for (std::size_t j = i + 1; j < indices.size(); ++j) {
      if (indices[i] == indices[j]) throw Error("tensor has a repeated index");
    }
  }
}

bool Tensor::has(IndexId i) const { return std::find(indices.begin(), indices.end(), i) != indices.end(); }

Complex Tensor::at(std::span<const int> bits) const {
  std::size_t off = 0;
  for (int b : bits) off = (off << 1) | static_cast<std::size_t>(b & 1);
  return data[off];
}

Tensor permute(const Tensor& t, std::span<const IndexId> order) {
  if (order.size() != t.indices.size()) throw Error("permutation has the wrong length");
  std::vector<std::size_t> src_stride(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    src_stride[k] = stride_of(t.indices, order[k]);
    if (src_stride[k] == 0) throw Error("permutation names an index the tensor lacks");
  }
  Tensor out(std::vector<IndexId>(order.begin(), order.end()), std::vector<Complex>(t.data.size()));
  const std::size_t r = order.size();
  std::vector<int> bit(r, 0);
  std::size_t src = 0;
  for (std::size_t dst = 0; dst < out.data.size(); ++dst) {
    out.data[dst] = t.data[src];
    for (std::size_t k = r; k-- > 0;) {
      if (bit[k] == 0) {
        bit[k] = 1;
        src += src_stride[k];
        break;
      }
      bit[k] = 0;
      src -= src_stride[k];
    }
  }
  return out;
}

Tensor contract_pair_dense(const Tensor& a, const Tensor& b, const std::function<bool(IndexId)>& keep) {
  std::vector<IndexId> result;
  std::vector<IndexId> summed;
  for (IndexId i : a.indices) {
    if (b.has(i) && !keep(i)) {
      summed.push_back(i);
    } else {
      result.push_back(i);
    }
  }
  for (IndexId i : b.indices) {
    if (!a.has(i)) result.push_back(i);
  }
  if (static_cast<int>(result.size()) > kMaxDenseRank) throw GuardError("dense contraction result too large");

  // Summed indices run fastest so each output entry is finished before the
  // odometer moves on.
  std::vector<IndexId> vars = result;
  vars.insert(vars.end(), summed.begin(), summed.end());
  const std::size_t nv = vars.size();
  std::vector<std::size_t> sa(nv), sb(nv), sr(nv, 0);
  for (std::size_t k = 0; k < nv; ++k) {
    sa[k] = stride_of(a.indices, vars[k]);
    sb[k] = stride_of(b.indices, vars[k]);
    if (k < result.size()) sr[k] = std::size_t{1} << (result.size() - 1 - k);
  }

  Tensor out(result, std::vector<Complex>(std::size_t{1} << result.size()));
  std::vector<int> bit(nv, 0);
  std::size_t ia = 0, ib = 0, ir = 0;
  const std::size_t total = std::size_t{1} << nv;
  for (std::size_t step = 0; step < total; ++step) {
    out.data[ir] += a.data[ia] * b.data[ib];
    for (std::size_t k = nv; k-- > 0;) {
      if (bit[k] == 0) {
        bit[k] = 1;
        ia += sa[k];
        ib += sb[k];
        ir += sr[k];
        break;
      }
      bit[k] = 0;
      ia -= sa[k];
      ib -= sb[k];
      ir -= sr[k];
    }
  }
  return out;
}

Tensor gate_tensor(const GateKind& kind, std::span<const IndexId> ins, std::span<const IndexId> outs, bool hyper) {
  const int a = arity(kind.type);
  if (static_cast<int>(ins.size()) != a) throw Error("gate tensor needs one input index per qubit");
  const std::vector<Complex> u = gate_matrix(kind);
  const std::size_t dim = std::size_t{1} << a;

  if (hyper && is_diagonal(kind.type)) {
    std::vector<Complex> diag(dim);
    for (std::size_t x = 0; x < dim; ++x) diag[x] = u[x * dim + x];
    return Tensor(std::vector<IndexId>(ins.begin(), ins.end()), std::move(diag));
  }
  if (static_cast<int>(outs.size()) != a) throw Error("gate tensor needs one output index per qubit");
  std::vector<IndexId> idx(ins.begin(), ins.end());
  idx.insert(idx.end(), outs.begin(), outs.end());
  std::vector<Complex> data(dim * dim);
  for (std::size_t in = 0; in < dim; ++in) {
    for (std::size_t out = 0; out < dim; ++out) data[in * dim + out] = u[out * dim + in];
  }
  return Tensor(std::move(idx), std::move(data));
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.indices != b.indices) throw Error("tensors have different index lists");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) worst = std::max(worst, std::abs(a.data[k] - b.data[k]));
  return worst;
}

}  // namespace tddsim
