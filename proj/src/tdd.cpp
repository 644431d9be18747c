#include "tddsim/tdd.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "tddsim/error.hpp"

namespace tddsim {

namespace {

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 33;
  x *= 0xff51afd7ed558ccdULL;
  x ^= x >> 33;
  x *= 0xc4ceb9fe1a85ec53ULL;
  x ^= x >> 33;
  return x;
}

std::uint64_t combine(std::uint64_t seed, std::uint64_t v) { return mix(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6))); }

std::uint64_t bits(Complex c) {
  return std::bit_cast<std::uint64_t>(c.real()) * 31 + std::bit_cast<std::uint64_t>(c.imag());
}

}  // namespace

double hit_rate(std::uint64_t hits, std::uint64_t misses) {
  const std::uint64_t total = hits + misses;
  return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
}

Engine::Engine(EngineConfig config) : config_(config), weights_(config.tolerance) {
  if (config_.cache_bits < 1 || config_.cache_bits > 30) throw Error("cache bits must lie in [1, 30]");
  nodes_.push_back(Node{});  // terminal
  buckets_.assign(std::size_t{1} << 16, kTerminal);
  if (config_.caches) {
    contract_cache_.resize(std::size_t{1} << config_.cache_bits);
    add_cache_.resize(std::size_t{1} << config_.cache_bits);
  }
}

Complex Engine::mul(Complex x, Complex y) {
  ++stats_.complex_muls;
  return x * y;
}

Edge Engine::scale(Edge e, Complex w) {
  if (e.is_zero() || w == Complex{0.0, 0.0}) return Edge::zero();
  const Complex v = mul(e.w, w);
  if (v == Complex{0.0, 0.0}) return Edge::zero();
  return {v, e.node};
}

std::size_t Engine::bucket_of(int level, const Edge& low, const Edge& high) const {
  std::uint64_t h = mix(static_cast<std::uint64_t>(level));
  h = combine(h, low.node);
  h = combine(h, bits(low.w));
  h = combine(h, high.node);
  h = combine(h, bits(high.w));
  return static_cast<std::size_t>(h & (buckets_.size() - 1));
}

void Engine::rebuild_buckets(std::size_t count) {
  buckets_.assign(count, kTerminal);
  for (NodeId id = 1; id < nodes_.size(); ++id) {
    Node& n = nodes_[id];
    if (n.level < 0) continue;
    const std::size_t b = bucket_of(n.level, n.low, n.high);
    n.next = buckets_[b];
    buckets_[b] = id;
  }
}

NodeId Engine::lookup_or_insert(int level, Edge low, Edge high) {
  ++stats_.unique_lookups;
  const std::size_t b = bucket_of(level, low, high);
  for (NodeId id = buckets_[b]; id != kTerminal; id = nodes_[id].next) {
    const Node& n = nodes_[id];
    if (n.level == level && n.low == low && n.high == high) {
      ++stats_.unique_hits;
      return id;
    }
  }
  ++stats_.unique_misses;

  if (live_nodes() + 1 > config_.max_nodes) {
    throw ArenaExhausted("node arena exhausted at " + std::to_string(live_nodes()) + " nodes (peak " +
                         std::to_string(stats_.peak_nodes) + ", gc runs " + std::to_string(stats_.gc_runs) + ")");
  }
  NodeId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& n = nodes_[id];
  n.low = low;
  n.high = high;
  n.level = level;
  n.ref = 0;
  n.next = buckets_[b];
  buckets_[b] = id;
  stats_.peak_nodes = std::max<std::uint64_t>(stats_.peak_nodes, live_nodes());
  if (live_nodes() > buckets_.size()) rebuild_buckets(buckets_.size() * 2);
  return id;
}

Edge Engine::make_node(int level, Edge low, Edge high) {
  if (low.is_zero() && high.is_zero()) return Edge::zero();
  const double ml = std::abs(low.w);
  const double mh = std::abs(high.w);
  const bool pivot_low = ml > mh || std::abs(ml - mh) <= config_.tolerance * std::max(ml, mh);
  const Complex one{1.0, 0.0};
  const Complex zero{0.0, 0.0};

  Complex p, nl, nh;
  if (pivot_low) {
    p = low.w;
    nl = one;
    nh = high.is_zero() ? zero : weights_.intern(high.w / p);
  } else {
    p = high.w;
    nh = one;
    nl = low.is_zero() ? zero : weights_.intern(low.w / p);
  }
  stats_.complex_muls += 1;

  const Edge l{nl, nl == zero ? kTerminal : low.node};
  const Edge h{nh, nh == zero ? kTerminal : high.node};
  if (l == h) return {p, l.node};
  return {p, lookup_or_insert(level, l, h)};
}

Tdd Engine::tensor_to_tdd(const Tensor& t, std::span<const int> level_of) {
  std::vector<std::pair<int, IndexId>> order;
  for (IndexId i : t.indices) {
    if (i.id < 0 || static_cast<std::size_t>(i.id) >= level_of.size()) throw Error("index has no level");
    order.emplace_back(level_of[i.id], i);
  }
  std::sort(order.begin(), order.end());
  Tdd out;
  for (auto [lvl, i] : order) {
    out.levels.push_back(lvl);
    out.indices.push_back(i);
  }
  const Tensor sorted = permute(t, out.indices);
  const int r = sorted.rank();

  auto build = [&](auto&& self, int depth, std::size_t off) -> Edge {
    if (depth == r) {
      const Complex v = sorted.data[off];
      return v == Complex{0.0, 0.0} ? Edge::zero() : Edge{v, kTerminal};
    }
    const std::size_t half = std::size_t{1} << (r - depth - 1);
    const Edge lo = self(self, depth + 1, off);
    const Edge hi = self(self, depth + 1, off + half);
    return make_node(out.levels[depth], lo, hi);
  };
  out.root = build(build, 0, 0);
  return out;
}

Tensor Engine::tdd_to_tensor(const Tdd& d) const {
  const int r = static_cast<int>(d.indices.size());
  if (r > kMaxDenseRank) throw GuardError("diagram has too many indices for a dense tensor");
  Tensor out(d.indices, std::vector<Complex>(std::size_t{1} << r));

  auto fill = [&](auto&& self, NodeId n, int depth, std::size_t off, Complex w) -> void {
    if (w == Complex{0.0, 0.0}) return;
    if (depth == r) {
      out.data[off] = w;
      return;
    }
    const std::size_t half = std::size_t{1} << (r - depth - 1);
    const Node& node = nodes_[n];
    if (n != kTerminal && node.level == d.levels[depth]) {
      self(self, node.low.node, depth + 1, off, w * node.low.w);
      self(self, node.high.node, depth + 1, off + half, w * node.high.w);
    } else {
      self(self, n, depth + 1, off, w);
      self(self, n, depth + 1, off + half, w);
    }
  };
  fill(fill, d.root.node, 0, 0, d.root.w);
  return out;
}

int Engine::summed_from(int level) const {
  return static_cast<int>(summed_.end() - std::lower_bound(summed_.begin(), summed_.end(), level));
}

Tdd Engine::contract(const Tdd& a, const Tdd& b, const std::function<bool(IndexId)>& keep) {
  Tdd out;
  std::vector<int> summed;
  std::size_t i = 0, j = 0;
  while (i < a.levels.size() || j < b.levels.size()) {
    if (j == b.levels.size() || (i < a.levels.size() && a.levels[i] < b.levels[j])) {
      out.indices.push_back(a.indices[i]);
      out.levels.push_back(a.levels[i++]);
    } else if (i == a.levels.size() || b.levels[j] < a.levels[i]) {
      out.indices.push_back(b.indices[j]);
      out.levels.push_back(b.levels[j++]);
    } else {
      if (a.indices[i] != b.indices[j]) throw Error("two indices share one level");
      if (keep(a.indices[i])) {
        out.indices.push_back(a.indices[i]);
        out.levels.push_back(a.levels[i]);
      } else {
        summed.push_back(a.levels[i]);
      }
      ++i;
      ++j;
    }
  }
  if (a.root.is_zero() || b.root.is_zero()) return out;

  const auto [it, inserted] = context_ids_.try_emplace(summed, static_cast<std::uint32_t>(context_ids_.size()));
  ctx_ = it->second;
  summed_ = summed;

  const NodeId an = a.root.node;
  const NodeId bn = b.root.node;
  const int top = std::min(level(an), level(bn));
  const Edge r = contract_rec(an, bn);
  const int skipped = static_cast<int>(summed_.size()) - summed_from(top);
  const Complex w = mul(mul(a.root.w, b.root.w), Complex{std::ldexp(1.0, skipped), 0.0});
  out.root = scale(r, w);
  return out;
}

// Product of the unit-weight diagrams rooted at a and b, summed over every
// summed level at or below the shallower root.
Edge Engine::contract_rec(NodeId a, NodeId b) {
  ++stats_.recursive_calls;
  if (a == kTerminal && b == kTerminal) return Edge::one();

  // Multiplication commutes exactly, so operand order can be normalised.
  const NodeId x = std::min(a, b);
  const NodeId y = std::max(a, b);
  std::size_t slot = 0;
  if (config_.caches) {
    ++stats_.contract_lookups;
    slot = static_cast<std::size_t>(combine(combine(mix(x), y), ctx_) & (contract_cache_.size() - 1));
    const ContractEntry& e = contract_cache_[slot];
    if (e.epoch == epoch_ && e.a == x && e.b == y && e.ctx == ctx_) {
      ++stats_.contract_hits;
      return e.result;
    }
    ++stats_.contract_misses;
  }

  const int la = level(x);
  const int lb = level(y);
  const int top = std::min(la, lb);
  const Edge one_x{Complex{1.0, 0.0}, x};
  const Edge one_y{Complex{1.0, 0.0}, y};
  const Edge xs[2] = {la == top ? nodes_[x].low : one_x, la == top ? nodes_[x].high : one_x};
  const Edge ys[2] = {lb == top ? nodes_[y].low : one_y, lb == top ? nodes_[y].high : one_y};
  const int below = summed_from(top + 1);

  Edge r[2];
  for (int k = 0; k < 2; ++k) {
    if (xs[k].is_zero() || ys[k].is_zero()) continue;
    const Edge sub = contract_rec(xs[k].node, ys[k].node);
    if (sub.is_zero()) continue;
    const int child_top = std::min(level(xs[k].node), level(ys[k].node));
    Complex w = mul(xs[k].w, ys[k].w);
    const int skipped = below - summed_from(child_top);
    if (skipped > 0) w *= std::ldexp(1.0, skipped);
    r[k] = scale(sub, w);
  }

  const bool summed = std::binary_search(summed_.begin(), summed_.end(), top);
  const Edge result = summed ? add(r[0], r[1]) : make_node(top, r[0], r[1]);
  if (config_.caches) contract_cache_[slot] = {x, y, ctx_, epoch_, result};
  return result;
}

Edge Engine::add(Edge a, Edge b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  ++stats_.complex_adds;
  if (a.node == b.node) {
    const Complex s = a.w + b.w;
    if (std::abs(s) <= config_.tolerance * std::max(std::abs(a.w), std::abs(b.w))) return Edge::zero();
    return {s, a.node};
  }
  // Order by magnitude (not by handle) so results do not depend on where
  // nodes happen to sit in the arena.
  if (std::abs(b.w) > std::abs(a.w)) std::swap(a, b);
  const Complex ratio = weights_.intern(b.w / a.w);
  ++stats_.complex_muls;
  if (ratio == Complex{0.0, 0.0}) return a;
  return scale(add_core(a.node, b.node, ratio), a.w);
}

// a + ratio * b for unit-weight diagrams a and b.
Edge Engine::add_core(NodeId a, NodeId b, Complex ratio) {
  ++stats_.recursive_calls;
  std::size_t slot = 0;
  if (config_.caches) {
    ++stats_.add_lookups;
    slot = static_cast<std::size_t>(combine(combine(mix(a), b), bits(ratio)) & (add_cache_.size() - 1));
    const AddEntry& e = add_cache_[slot];
    if (e.epoch == epoch_ && e.a == a && e.b == b && e.ratio == ratio) {
      ++stats_.add_hits;
      return e.result;
    }
    ++stats_.add_misses;
  }

  const int la = level(a);
  const int lb = level(b);
  const int top = std::min(la, lb);
  const Edge one_a{Complex{1.0, 0.0}, a};
  const Edge one_b{Complex{1.0, 0.0}, b};
  const Edge as[2] = {la == top ? nodes_[a].low : one_a, la == top ? nodes_[a].high : one_a};
  const Edge bs[2] = {lb == top ? nodes_[b].low : one_b, lb == top ? nodes_[b].high : one_b};

  const Edge lo = add(as[0], scale(bs[0], ratio));
  const Edge hi = add(as[1], scale(bs[1], ratio));
  const Edge result = make_node(top, lo, hi);
  if (config_.caches) add_cache_[slot] = {a, b, ratio, epoch_, result};
  return result;
}

Tdd Engine::add(const Tdd& a, const Tdd& b) {
  Tdd out;
  std::size_t i = 0, j = 0;
  while (i < a.levels.size() || j < b.levels.size()) {
    if (j == b.levels.size() || (i < a.levels.size() && a.levels[i] < b.levels[j])) {
      out.indices.push_back(a.indices[i]);
      out.levels.push_back(a.levels[i++]);
    } else {
      if (i < a.levels.size() && a.levels[i] == b.levels[j]) ++i;
      out.indices.push_back(b.indices[j]);
      out.levels.push_back(b.levels[j++]);
    }
  }
  out.root = add(a.root, b.root);
  return out;
}

void Engine::inc_ref(Edge e) {
  if (e.node == kTerminal) return;
  std::vector<NodeId> stack{e.node};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (nodes_[n].ref++ == 0) {
      if (nodes_[n].low.node != kTerminal) stack.push_back(nodes_[n].low.node);
      if (nodes_[n].high.node != kTerminal) stack.push_back(nodes_[n].high.node);
    }
  }
}

void Engine::dec_ref(Edge e) {
  if (e.node == kTerminal) return;
  std::vector<NodeId> stack{e.node};
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (nodes_[n].ref == 0) throw Error("reference count underflow");
    if (--nodes_[n].ref == 0) {
      if (nodes_[n].low.node != kTerminal) stack.push_back(nodes_[n].low.node);
      if (nodes_[n].high.node != kTerminal) stack.push_back(nodes_[n].high.node);
    }
  }
}

std::size_t Engine::garbage_collect() {
  std::size_t reclaimed = 0;
  for (NodeId id = 1; id < nodes_.size(); ++id) {
    Node& n = nodes_[id];
    if (n.level >= 0 && n.ref == 0) {
      n.level = -1;
      free_.push_back(id);
      ++reclaimed;
    }
  }
  rebuild_buckets(buckets_.size());
  // Cached results may name reclaimed handles; a new epoch invalidates all.
  if (++epoch_ == 0) {
    std::fill(contract_cache_.begin(), contract_cache_.end(), ContractEntry{});
    std::fill(add_cache_.begin(), add_cache_.end(), AddEntry{});
    epoch_ = 1;
  }
  ++stats_.gc_runs;
  stats_.gc_reclaimed += reclaimed;
  return reclaimed;
}

bool Engine::maybe_collect() {
  if (live_nodes() <= config_.gc_limit) return false;
  garbage_collect();
  return true;
}

Complex Engine::amplitude(const Tdd& d, std::span<const std::pair<IndexId, int>> assignment) const {
  std::vector<int> bit(d.indices.size(), -1);
  for (std::size_t k = 0; k < d.indices.size(); ++k) {
    for (auto [i, v] : assignment) {
      if (i == d.indices[k]) bit[k] = v;
    }
    if (bit[k] < 0) throw Error("assignment misses index " + std::to_string(d.indices[k].id));
  }
  Complex w = d.root.w;
  NodeId n = d.root.node;
  while (n != kTerminal && w != Complex{0.0, 0.0}) {
    const Node& node = nodes_[n];
    const auto pos = std::lower_bound(d.levels.begin(), d.levels.end(), node.level) - d.levels.begin();
    const Edge& e = bit[pos] ? node.high : node.low;
    w *= e.w;
    n = e.node;
  }
  return w;
}

std::size_t Engine::node_count(Edge e) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack;
  std::size_t count = 1;
  if (e.node != kTerminal) stack.push_back(e.node);
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    ++count;
    for (NodeId c : {nodes_[n].low.node, nodes_[n].high.node}) {
      if (c != kTerminal && !seen[c]) stack.push_back(c);
    }
  }
  return count;
}

std::string Engine::to_dot(const Tdd& d, const std::vector<std::string>& labels) const {
  auto weight = [](Complex w) {
    std::ostringstream s;
    s.precision(4);
    s << w.real();
    if (w.imag() != 0.0) s << (w.imag() < 0 ? "-" : "+") << std::abs(w.imag()) << "i";
    return s.str();
  };
  auto label_of = [&](int lvl) -> std::string {
    const auto pos = std::lower_bound(d.levels.begin(), d.levels.end(), lvl) - d.levels.begin();
    if (pos < static_cast<std::ptrdiff_t>(d.indices.size()) && d.levels[pos] == lvl) {
      const IndexId i = d.indices[pos];
      if (i.id >= 0 && static_cast<std::size_t>(i.id) < labels.size()) return labels[i.id];
      return "x" + std::to_string(i.id);
    }
    return "l" + std::to_string(lvl);
  };

  std::ostringstream out;
  out << "digraph tdd {\n  root [shape=point];\n  n0 [shape=box,label=\"1\"];\n";
  out << "  root -> n" << d.root.node << " [label=\"" << weight(d.root.w) << "\"];\n";
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<NodeId> stack;
  if (d.root.node != kTerminal) stack.push_back(d.root.node);
  while (!stack.empty()) {
    const NodeId n = stack.back();
    stack.pop_back();
    if (seen[n]) continue;
    seen[n] = 1;
    const Node& node = nodes_[n];
    out << "  n" << n << " [shape=circle,label=\"" << label_of(node.level) << "\"];\n";
    out << "  n" << n << " -> n" << node.low.node << " [style=dashed,color=red,label=\"" << weight(node.low.w)
        << "\"];\n";
    out << "  n" << n << " -> n" << node.high.node << " [color=blue,label=\"" << weight(node.high.w) << "\"];\n";
    for (NodeId c : {node.low.node, node.high.node}) {
      if (c != kTerminal) stack.push_back(c);
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace tddsim
