#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "tddsim/error.hpp"
#include "tddsim/tdd.hpp"
#include "test_support.hpp"

using namespace tddsim;
using testsupport::random_circuit;
using testsupport::random_tensor;

namespace {

const double kR = 1.0 / std::sqrt(2.0);

std::vector<int> identity_levels(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<IndexId> ids(std::initializer_list<int> list) {
  std::vector<IndexId> out;
  for (int i : list) out.push_back(IndexId{i});
  return out;
}

// Random subset of {0 .. pool-1} in random order.
std::vector<IndexId> random_indices(std::mt19937_64& rng, int pool, int max_rank) {
  std::vector<IndexId> out;
  for (int i = 0; i < pool; ++i) {
    if (static_cast<int>(out.size()) < max_rank && rng() % 2) out.push_back(IndexId{i});
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

void check_normalised(const Engine& e) {
  for (NodeId id = 1; id < e.arena_size(); ++id) {
    const Node& n = e.node(id);
    if (n.level < 0) continue;
    CHECK(std::abs(std::max(std::abs(n.low.w), std::abs(n.high.w)) - 1.0) < 1e-12);
    CHECK_FALSE(n.low == n.high);
    if (n.low.node != kTerminal) CHECK(e.level(n.low.node) > n.level);
    if (n.high.node != kTerminal) CHECK(e.level(n.high.node) > n.level);
    if (n.low.is_zero()) CHECK(n.low.node == kTerminal);
    if (n.high.is_zero()) CHECK(n.high.node == kTerminal);
  }
}

Tensor h_tensor(IndexId in, IndexId out) {
  return gate_tensor({GateType::H, {}}, std::vector<IndexId>{in}, std::vector<IndexId>{out}, false);
}

}  // namespace

TEST_CASE("make_node examples") {
  Engine e;
  const Edge t{Complex(kR), kTerminal};
  CHECK(e.make_node(0, t, t) == t);
  CHECK(e.live_nodes() == 0);

  const Edge child = e.make_node(1, Edge::one(), Edge::zero());
  REQUIRE(child.node != kTerminal);
  const Edge top = e.make_node(0, t, {Complex(-kR), child.node});
  CHECK(std::abs(top.w - kR) < 1e-15);
  const Node& n = e.node(top.node);
  CHECK(n.low.w == Complex(1.0));
  CHECK(std::abs(n.high.w + 1.0) < 1e-15);
  CHECK(n.high.node == child.node);

  // Larger magnitude on the high side becomes the pivot.
  const Edge hi = e.make_node(0, {Complex(0.5), kTerminal}, {Complex(0, 2), child.node});
  CHECK(std::abs(hi.w - Complex(0, 2)) < 1e-15);
  CHECK(e.node(hi.node).high.w == Complex(1.0));
  CHECK(std::abs(e.node(hi.node).low.w - Complex(0, -0.25)) < 1e-15);

  CHECK(e.make_node(3, Edge::zero(), Edge::zero()) == Edge::zero());
  // Hash-consing returns the existing node.
  CHECK(e.make_node(0, t, {Complex(-kR), child.node}) == top);
}

TEST_CASE("H tensor H is four nodes") {
  Engine e;
  const auto levels = identity_levels(4);
  const Tensor hh = contract_pair_dense(h_tensor(IndexId{0}, IndexId{1}), h_tensor(IndexId{2}, IndexId{3}),
                                        [](IndexId) { return false; });
  const Tdd d = e.tensor_to_tdd(hh, levels);
  CHECK(e.node_count(d.root) - 1 == 4);
  CHECK(std::abs(d.root.w - 0.5) < 1e-15);
  // As a 4x4 array over (in0 in1, out0 out1) it is H kron H.
  const Tensor back = permute(e.tdd_to_tensor(d), ids({0, 2, 1, 3}));
  const double sign[2][2] = {{1, 1}, {1, -1}};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      const double want = 0.5 * sign[r >> 1][c >> 1] * sign[r & 1][c & 1];
      CHECK(std::abs(back.data[r * 4 + c] - want) < 1e-12);
    }
  }
  check_normalised(e);
}

TEST_CASE("tensor_to_tdd small cases") {
  Engine e;
  const auto levels = identity_levels(4);
  const Tdd scalar = e.tensor_to_tdd(Tensor({}, {Complex(2, -1)}), levels);
  CHECK(scalar.root == Edge{Complex(2, -1), kTerminal});
  CHECK(scalar.indices.empty());

  const Tdd basis = e.tensor_to_tdd(Tensor(ids({2}), {1.0, 0.0}), levels);
  REQUIRE(basis.root.node != kTerminal);
  CHECK(basis.root.w == Complex(1.0));
  const Node& n = e.node(basis.root.node);
  CHECK(n.level == 2);
  CHECK(n.low == Edge::one());
  CHECK(n.high == Edge::zero());

  Tdd zero;
  zero.indices = ids({0, 1});
  zero.levels = {0, 1};
  const Tensor z = e.tdd_to_tensor(zero);
  CHECK(z.data == std::vector<Complex>(4));

  CHECK_THROWS_AS(e.tensor_to_tdd(Tensor(ids({9}), {1.0, 0.0}), levels), Error);
}

TEST_CASE("tensor round trip and canonicity") {
  std::mt19937_64 rng(12);
  Engine e;
  const auto levels = identity_levels(8);
  for (int trial = 0; trial < 100; ++trial) {
    const Tensor t = random_tensor(rng, random_indices(rng, 8, 6));
    const Tdd d = e.tensor_to_tdd(t, levels);
    const Tensor back = permute(e.tdd_to_tensor(d), t.indices);
    CHECK(max_abs_diff(back, t) < 1e-12);
    const Tdd again = e.tensor_to_tdd(t, levels);
    CHECK(again.root.node == d.root.node);
    CHECK(std::abs(again.root.w - d.root.w) < 1e-12);
  }
  check_normalised(e);
}

TEST_CASE("contract agrees with the dense pairwise contraction") {
  std::mt19937_64 rng(99);
  Engine e;
  const auto levels = identity_levels(8);
  for (int trial = 0; trial < 200; ++trial) {
    const Tensor a = random_tensor(rng, random_indices(rng, 8, 5));
    const Tensor b = random_tensor(rng, random_indices(rng, 8, 5));
    const std::uint64_t mask = rng();
    auto keep = [mask](IndexId i) { return (mask >> i.id) & 1; };
    const Tensor dense = contract_pair_dense(a, b, keep);
    const Tdd d = e.contract(e.tensor_to_tdd(a, levels), e.tensor_to_tdd(b, levels), keep);
    REQUIRE(d.indices.size() == dense.indices.size());
    CHECK(max_abs_diff(e.tdd_to_tensor(d), permute(dense, d.indices)) < 1e-10);
  }
  check_normalised(e);
}

TEST_CASE("contract examples") {
  Engine e;
  const auto levels = identity_levels(4);
  const Tdd h = e.tensor_to_tdd(h_tensor(IndexId{0}, IndexId{1}), levels);
  const Tdd zero = e.tensor_to_tdd(Tensor(ids({0}), {1.0, 0.0}), levels);
  const Tdd plus = e.contract(h, zero, [](IndexId) { return false; });
  CHECK(plus.indices == ids({1}));
  const Tensor t = e.tdd_to_tensor(plus);
  CHECK(std::abs(t.data[0] - kR) < 1e-15);
  CHECK(std::abs(t.data[1] - kR) < 1e-15);
  // Equal amplitudes collapse to a bare terminal edge.
  CHECK(e.node_count(plus.root) == 1);

  // A single-qubit state with no node at the gate's output level.
  const Tensor q = Tensor(ids({1}), {0.6, Complex(0, 0.8)});
  std::mt19937_64 rng(5);
  const Tensor gate = random_tensor(rng, ids({1, 2, 3}));
  const Tdd r = e.contract(e.tensor_to_tdd(q, levels), e.tensor_to_tdd(gate, levels), [](IndexId) { return false; });
  CHECK(max_abs_diff(e.tdd_to_tensor(r), contract_pair_dense(q, gate, [](IndexId) { return false; })) < 1e-12);
}

TEST_CASE("terminal factor counts absent summed indices") {
  for (int k = 0; k <= 3; ++k) {
    Engine e;
    const auto levels = identity_levels(4);
    std::vector<IndexId> idx;
    for (int i = 0; i < k; ++i) idx.push_back(IndexId{i});
    const std::size_t size = std::size_t{1} << k;
    const Tdd a = e.tensor_to_tdd(Tensor(idx, std::vector<Complex>(size, Complex(1.5))), levels);
    const Tdd b = e.tensor_to_tdd(Tensor(idx, std::vector<Complex>(size, Complex(0, 2))), levels);
    REQUIRE(a.root.node == kTerminal);
    const Tdd c = e.contract(a, b, [](IndexId) { return false; });
    CHECK(c.indices.empty());
    CHECK(std::abs(c.root.w - Complex(0, 3) * std::ldexp(1.0, k)) < 1e-12);
  }
}

TEST_CASE("add") {
  Engine e;
  const auto levels = identity_levels(8);
  std::mt19937_64 rng(17);
  const Tensor v = random_tensor(rng, ids({1, 3, 4}));
  const Tdd a = e.tensor_to_tdd(v, levels);
  CHECK(e.add(a.root, Edge::zero()) == a.root);
  CHECK(e.add(Edge::zero(), a.root) == a.root);
  Tensor neg = v;
  for (Complex& x : neg.data) x = -x;
  CHECK(e.add(a.root, e.tensor_to_tdd(neg, levels).root) == Edge::zero());

  for (int trial = 0; trial < 100; ++trial) {
    const Tensor x = random_tensor(rng, random_indices(rng, 8, 6));
    const Tensor y = random_tensor(rng, random_indices(rng, 8, 6));
    const Tdd s = e.add(e.tensor_to_tdd(x, levels), e.tensor_to_tdd(y, levels));
    const Tensor got = e.tdd_to_tensor(s);
    std::vector<int> bits(got.indices.size());
    for (std::size_t flat = 0; flat < got.data.size(); ++flat) {
      for (std::size_t k = 0; k < bits.size(); ++k) bits[k] = (flat >> (bits.size() - 1 - k)) & 1;
      auto value = [&](const Tensor& t) {
        std::vector<int> b;
        for (IndexId i : t.indices) {
          const auto pos = std::find(got.indices.begin(), got.indices.end(), i) - got.indices.begin();
          b.push_back(bits[pos]);
        }
        return t.at(b);
      };
      CHECK(std::abs(got.data[flat] - (value(x) + value(y))) < 1e-12);
    }
  }
  check_normalised(e);
}

TEST_CASE("contract_network on small networks") {
  Engine e;
  Circuit c;
  c.num_qubits = 1;
  c.mode = SimMode::Unitary;
  c.append({{GateType::RY, {0.4}}, {0}});
  const TensorNetwork one = build_network(c);
  const auto levels = index_levels(one, IndexOrder::Interleaved);
  const Tdd d = contract_network(e, one, order_sequential(one), levels);
  CHECK(max_abs_diff(e.tdd_to_tensor(d), permute(one.tensors[0], d.indices)) < 1e-15);
  e.dec_ref(d.root);

  const TensorNetwork ghz = build_network(generate(Family::Ghz, 25));
  const Tdd g = contract_network(e, ghz, order_sequential(ghz), index_levels(ghz, IndexOrder::Interleaved));
  CHECK(e.node_count(g.root) == 50);
}

TEST_CASE("amplitude") {
  Engine e;
  const TensorNetwork net = build_network(generate(Family::Ghz, 8));
  const Tdd d = contract_network(e, net, order_greedy(net), index_levels(net, IndexOrder::Interleaved));
  std::vector<std::pair<IndexId, int>> a;
  REQUIRE(canonical_assignment(net, "00000000", a));
  CHECK(std::abs(e.amplitude(d, a) - kR) < 1e-12);
  REQUIRE(canonical_assignment(net, "11111111", a));
  CHECK(std::abs(e.amplitude(d, a) - kR) < 1e-12);
  REQUIRE(canonical_assignment(net, "00000001", a));
  CHECK(e.amplitude(d, a) == Complex{});

  Tdd zero;
  zero.indices = ids({0});
  zero.levels = {0};
  const std::pair<IndexId, int> bit{IndexId{0}, 1};
  CHECK(e.amplitude(zero, std::span(&bit, 1)) == Complex{});
  a.pop_back();
  CHECK_THROWS_AS(e.amplitude(d, a), Error);
}

TEST_CASE("garbage collection") {
  const auto levels = identity_levels(8);
  std::mt19937_64 rng(41);
  auto never = [](IndexId) { return false; };

  SUBCASE("operands released after a contraction") {
    Engine e;
    Tdd a = e.tensor_to_tdd(random_tensor(rng, ids({0, 1, 2, 3})), levels);
    Tdd b = e.tensor_to_tdd(random_tensor(rng, ids({2, 3, 4, 5})), levels);
    e.inc_ref(a.root);
    e.inc_ref(b.root);
    const Tdd c = e.contract(a, b, never);
    e.inc_ref(c.root);
    const Tensor before = e.tdd_to_tensor(c);
    e.dec_ref(a.root);
    e.dec_ref(b.root);
    e.garbage_collect();
    CHECK(e.live_nodes() == e.node_count(c.root) - 1);
    CHECK(max_abs_diff(e.tdd_to_tensor(c), before) == 0.0);
  }

  SUBCASE("nothing to reclaim") {
    Engine e;
    const Tdd a = e.tensor_to_tdd(random_tensor(rng, ids({0, 1, 2})), levels);
    e.inc_ref(a.root);
    CHECK(e.garbage_collect() == 0);
    CHECK(e.stats().gc_runs == 1);
  }

  SUBCASE("many transient diagrams") {
    Engine e;
    Tdd kept;
    for (int k = 0; k < 1000; ++k) {
      const Tdd d = e.tensor_to_tdd(random_tensor(rng, random_indices(rng, 8, 5)), levels);
      if (k == 500) {
        kept = d;
        e.inc_ref(kept.root);
      }
    }
    const Tensor before = e.tdd_to_tensor(kept);
    e.garbage_collect();
    CHECK(e.live_nodes() == e.node_count(kept.root) - 1);
    CHECK(max_abs_diff(e.tdd_to_tensor(kept), before) == 0.0);
    // The freed slots are reused and queries still give the same answers.
    const Tensor t = random_tensor(rng, ids({1, 2, 6}));
    const Tdd d = e.tensor_to_tdd(t, levels);
    CHECK(max_abs_diff(permute(e.tdd_to_tensor(d), t.indices), t) < 1e-12);
    check_normalised(e);
  }

  SUBCASE("low limit gives identical amplitudes") {
    const Circuit c = random_circuit(rng, 8, 12);
    const TensorNetwork net = tetris_simplify(build_network(c));
    const auto lv = index_levels(net, IndexOrder::Interleaved);
    Engine loose;
    Engine tight({.gc_limit = 16});
    const Tdd x = contract_network(loose, net, order_sequential(net), lv);
    const Tdd y = contract_network(tight, net, order_sequential(net), lv);
    CHECK(tight.stats().gc_runs > 0);
    CHECK(max_abs_diff(loose.tdd_to_tensor(x), tight.tdd_to_tensor(y)) == 0.0);
  }

  CHECK_THROWS_AS([] {
    Engine e;
    e.dec_ref(e.make_node(0, Edge::one(), Edge::zero()));
  }(), Error);
}

TEST_CASE("stats counters") {
  Engine fresh;
  const EngineStats& z = fresh.stats();
  CHECK(z.unique_lookups + z.contract_lookups + z.add_lookups + z.unique_hits + z.unique_misses + z.contract_hits +
            z.contract_misses + z.add_hits + z.add_misses + z.peak_nodes + z.gc_runs + z.gc_reclaimed +
            z.complex_muls + z.complex_adds + z.recursive_calls ==
        0);

  const Circuit c = parse_rqc(R"(4
0 h 0
0 h 1
0 h 2
0 h 3
1 cz 0 1
1 cz 2 3
2 t 0
2 x_1_2 1
2 y_1_2 2
2 t 3
3 cz 1 2
4 y_1_2 1
4 t 2
)");
  const TensorNetwork net = build_network(c);
  Engine e({.gc_limit = 8});
  const Tdd d = contract_network(e, net, order_sequential(net), index_levels(net, IndexOrder::Interleaved));
  const EngineStats& s = e.stats();
  CHECK(s.unique_lookups == s.unique_hits + s.unique_misses);
  CHECK(s.contract_lookups == s.contract_hits + s.contract_misses);
  CHECK(s.add_lookups == s.add_hits + s.add_misses);
  CHECK(e.live_nodes() == s.unique_misses - s.gc_reclaimed);
  CHECK(s.peak_nodes >= e.live_nodes());
  CHECK(s.recursive_calls > 0);
  CHECK(s.complex_muls > 0);

  const std::string json = stats_json(s, e.node_count(d.root), {{"contraction_seconds", 0.5}});
  for (const char* key : {"unique_hits", "unique_misses", "contract_hits", "contract_misses", "add_hits", "add_misses",
                          "peak_nodes", "final_nodes", "gc_runs", "complex_muls", "complex_adds",
                          "contraction_seconds"}) {
    CHECK(json.find(std::string("\"") + key + "\"") != std::string::npos);
  }
  CHECK(hit_rate(0, 0) == 0.0);
  CHECK(hit_rate(1, 3) == 0.25);
}

TEST_CASE("caches do not change results") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = random_circuit(rng, 2 + static_cast<int>(rng() % 6), 10);
    const TensorNetwork net = tetris_simplify(build_network(c));
    const auto lv = index_levels(net, IndexOrder::Interleaved);
    Engine on;
    Engine off({.caches = false});
    const Tdd a = contract_network(on, net, order_greedy(net), lv);
    const Tdd b = contract_network(off, net, order_greedy(net), lv);
    CHECK(a.root.node == b.root.node);
    CHECK(a.root.w == b.root.w);
    CHECK(max_abs_diff(on.tdd_to_tensor(a), off.tdd_to_tensor(b)) == 0.0);
    CHECK(off.stats().contract_lookups == 0);
  }
}

TEST_CASE("final handles do not depend on the order") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Circuit c = random_circuit(rng, 2 + static_cast<int>(rng() % 6), 10);
    const TensorNetwork net = tetris_simplify(build_network(c));
    const auto lv = index_levels(net, IndexOrder::Interleaved);
    Engine e;
    const Tdd ref = contract_network(e, net, order_sequential(net), lv);
    for (const ContractionOrder& o : {order_greedy(net), order_random(net, trial), order_random(net, trial + 99)}) {
      const Tdd d = contract_network(e, net, o, lv);
      CHECK(d.root.node == ref.root.node);
      CHECK(std::abs(d.root.w - ref.root.w) < 1e-10);
    }
  }
}

TEST_CASE("DOT export") {
  Engine e;
  const TensorNetwork net = build_network(generate(Family::Ghz, 3));
  const Tdd d = contract_network(e, net, order_sequential(net), index_levels(net, IndexOrder::Interleaved));
  const std::string dot = e.to_dot(d, net.labels);
  CHECK(dot.rfind("digraph", 0) == 0);
  CHECK(dot.find("dashed") != std::string::npos);
  CHECK(dot.find(net.labels[net.output_index[0].id]) != std::string::npos);
}

TEST_CASE("bundled RQC instance has nontrivial hit rates") {
  std::ifstream in(std::string(TDDSIM_DATA) + "/inst_4x4_10_0.txt");
  REQUIRE(in);
  std::stringstream text;
  text << in.rdbuf();
  const Circuit c = parse_rqc(text.str());
  CHECK(c.num_qubits == 16);
  const TensorNetwork net = tetris_simplify(build_network(c));
  Engine e;
  contract_network(e, net, order_sequential(net), index_levels(net, IndexOrder::Interleaved));
  const EngineStats& s = e.stats();
  for (double r : {hit_rate(s.unique_hits, s.unique_misses), hit_rate(s.contract_hits, s.contract_misses),
                   hit_rate(s.add_hits, s.add_misses)}) {
    CHECK(r > 0.0);
    CHECK(r < 1.0);
  }
}
