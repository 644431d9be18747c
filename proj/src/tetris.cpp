#include <algorithm>

#include "tddsim/error.hpp"
#include "tddsim/network.hpp"

namespace tddsim {

namespace {

struct Piece {
  Tensor tensor;
  TensorInfo info;
  int member_rank = 0;  // rank this piece contributes to the constraint
};

// Stacks hold slot numbers; when several tops merge, the result takes the
// first slot and the rest forward to it, so no stack is ever rewritten.
class Slots {
 public:
  int add(int piece) {
    forward_.push_back(static_cast<int>(forward_.size()));
    piece_.push_back(piece);
    return static_cast<int>(forward_.size()) - 1;
  }

  int find(int s) {
    int root = s;
    while (forward_[root] != root) root = forward_[root];
    while (forward_[s] != root) {
      const int up = forward_[s];
      forward_[s] = root;
      s = up;
    }
    return root;
  }

  void redirect(int from, int to) { forward_[from] = to; }
  int& piece(int s) { return piece_[s]; }

 private:
  std::vector<int> forward_;
  std::vector<int> piece_;
};

}  // namespace

TensorNetwork tetris_simplify(const TensorNetwork& net, TetrisConstraint constraint, TetrisStats* stats) {
  TetrisStats local;
  TetrisStats& st = stats ? *stats : local;

  std::vector<int> ref = net.index_refcount();
  std::vector<bool> open(net.labels.size(), false);
  for (IndexId i : net.open_indices) open[i.id] = true;

  std::vector<Piece> pieces;
  pieces.reserve(net.tensors.size());
  Slots slots;
  std::vector<std::vector<int>> stacks(net.num_qubits);
  std::vector<int> mark(net.labels.size(), 0);  // per-index scratch count

  for (std::size_t k = 0; k < net.tensors.size(); ++k) {
    const TensorInfo& ti = net.info[k];
    Piece cur{net.tensors[k], ti, ti.nominal_rank};
    const int self = static_cast<int>(pieces.size());

    if (ti.gate_count == 0) {
      // State tensors start their line's stack.
      pieces.push_back(std::move(cur));
      const int s = slots.add(self);
      for (int q : ti.qubits) stacks[q].push_back(s);
      ++st.stack_ops;
      continue;
    }
    ++st.gates_visited;

    std::vector<int> absorbed;  // slots
    int bound = cur.member_rank;
    int lower = cur.member_rank;
    for (int q : net.info[k].qubits) {
      if (stacks[q].empty()) continue;
      ++st.stack_ops;
      const int s = slots.find(stacks[q].back());
      if (std::find(absorbed.begin(), absorbed.end(), s) != absorbed.end()) continue;
      Piece& top = pieces[slots.piece(s)];

      bool shares = false;
      for (IndexId i : top.tensor.indices) shares = shares || cur.tensor.has(i);
      if (!shares) continue;

      // An index survives if it is open or some tensor outside the pair
      // still references it.
      for (IndexId i : cur.tensor.indices) ++mark[i.id];
      for (IndexId i : top.tensor.indices) ++mark[i.id];
      int result_rank = 0;
      auto survives = [&](IndexId i) { return open[i.id] || ref[i.id] > mark[i.id]; };
      for (IndexId i : cur.tensor.indices) result_rank += survives(i) ? 1 : 0;
      for (IndexId i : top.tensor.indices) result_rank += (!cur.tensor.has(i) && survives(i)) ? 1 : 0;

      const int limit = constraint == TetrisConstraint::Max ? std::max(bound, top.member_rank)
                                                            : std::min(lower, top.member_rank);
      if (result_rank <= limit) {
        Tensor merged = contract_pair_dense(cur.tensor, top.tensor, survives);
        for (IndexId i : cur.tensor.indices) --ref[i.id];
        for (IndexId i : top.tensor.indices) --ref[i.id];
        for (IndexId i : merged.indices) ++ref[i.id];
        if (merged.rank() > limit) throw Error("rank constraint violated during consolidation");

        TensorInfo info = cur.info;
        for (int tq : top.info.qubits) {
          if (std::find(info.qubits.begin(), info.qubits.end(), tq) == info.qubits.end()) info.qubits.push_back(tq);
        }
        std::sort(info.qubits.begin(), info.qubits.end());
        info.gate_count += top.info.gate_count;
        info.layer = std::max(info.layer, top.info.layer);
        info.nominal_rank = merged.rank();

        bound = limit;
        lower = std::min(lower, top.member_rank);
        for (IndexId i : cur.tensor.indices) mark[i.id] = 0;
        for (IndexId i : top.tensor.indices) mark[i.id] = 0;
        cur = Piece{std::move(merged), std::move(info), 0};
        // The absorbed piece is never emitted; drop its storage now so the
        // working set stays proportional to the live stack tops.
        top = Piece{};
        absorbed.push_back(s);
        ++st.merges;
        continue;
      }
      for (IndexId i : cur.tensor.indices) mark[i.id] = 0;
      for (IndexId i : top.tensor.indices) mark[i.id] = 0;
    }

    int target;
    if (absorbed.empty()) {
      pieces.push_back(std::move(cur));
      target = slots.add(self);
    } else {
      cur.member_rank = cur.tensor.rank();
      pieces.push_back(std::move(cur));
      target = absorbed.front();
      slots.piece(target) = self;
      for (std::size_t a = 1; a < absorbed.size(); ++a) slots.redirect(absorbed[a], target);
    }
    for (int q : net.info[k].qubits) {
      if (stacks[q].empty() || slots.find(stacks[q].back()) != target) {
        stacks[q].push_back(target);
        ++st.stack_ops;
      }
    }
  }

  // Pop bottom-up, one depth at a time across all lines.
  TensorNetwork out;
  out.num_qubits = net.num_qubits;
  out.mode = net.mode;
  out.open_indices = net.open_indices;
  out.input_index = net.input_index;
  out.output_index = net.output_index;
  out.line_indices = net.line_indices;
  out.labels = net.labels;
  std::vector<bool> emitted(pieces.size(), false);
  std::size_t depth = 0;
  for (const auto& s : stacks) depth = std::max(depth, s.size());
  for (std::size_t d = 0; d < depth; ++d) {
    for (auto& s : stacks) {
      if (d >= s.size()) continue;
      const int p = slots.piece(slots.find(s[d]));
      if (emitted[p]) continue;
      emitted[p] = true;
      out.tensors.push_back(std::move(pieces[p].tensor));
      out.info.push_back(std::move(pieces[p].info));
    }
  }
  return out;
}

}  // namespace tddsim
