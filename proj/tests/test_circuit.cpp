#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"

using namespace tddsim;

namespace {

const std::vector<GateType> kAllGates = {GateType::H,  GateType::X,  GateType::Y,  GateType::Z,
                                         GateType::S,  GateType::T,  GateType::SX, GateType::SY,
                                         GateType::RX, GateType::RY, GateType::RZ, GateType::P,
                                         GateType::CZ, GateType::CX, GateType::CP, GateType::SWAP};

Circuit random_circuit(std::mt19937_64& rng, int n, int gates) {
  Circuit c;
  c.num_qubits = n;
  std::uniform_int_distribution<std::size_t> pick_gate(0, kAllGates.size() - 1);
  std::uniform_int_distribution<int> pick_qubit(0, n - 1);
  std::uniform_real_distribution<double> angle(-4.0, 4.0);
  for (int g = 0; g < gates; ++g) {
    GateType t = kAllGates[pick_gate(rng)];
    if (n < 2 && arity(t) == 2) t = GateType::H;
    std::vector<double> params;
    for (int p = 0; p < param_count(t); ++p) params.push_back(angle(rng));
    std::vector<int> qs{pick_qubit(rng)};
    while (static_cast<int>(qs.size()) < arity(t)) {
      const int q = pick_qubit(rng);
      if (q != qs[0]) qs.push_back(q);
    }
    c.append({{t, params}, qs});
  }
  return c;
}

}  // namespace

TEST_CASE("gate matrices are unitary") {
  for (GateType t : kAllGates) {
    GateKind k{t, std::vector<double>(param_count(t), 0.7)};
    const auto u = gate_matrix(k);
    const std::size_t d = std::size_t{1} << arity(t);
    REQUIRE(u.size() == d * d);
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        Complex acc{};
        for (std::size_t k2 = 0; k2 < d; ++k2) acc += u[r * d + k2] * std::conj(u[c * d + k2]);
        CHECK(std::abs(acc - Complex(r == c ? 1.0 : 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("gate matrices match textbook values") {
  const double r = 1.0 / std::sqrt(2.0);
  const auto h = gate_matrix({GateType::H, {}});
  CHECK(std::abs(h[0] - r) < 1e-15);
  CHECK(std::abs(h[3] + r) < 1e-15);
  const auto cz = gate_matrix({GateType::CZ, {}});
  CHECK(cz[15] == Complex(-1.0));
  CHECK(cz[0] == Complex(1.0));
  // SX squared is X.
  const auto sx = gate_matrix({GateType::SX, {}});
  CHECK(std::abs(sx[0] * sx[0] + sx[1] * sx[2]) < 1e-15);
  CHECK(std::abs(sx[0] * sx[1] + sx[1] * sx[3] - 1.0) < 1e-15);
  // SY squared is Y = [[0,-i],[i,0]].
  const auto sy = gate_matrix({GateType::SY, {}});
  CHECK(std::abs(sy[0] * sy[1] + sy[1] * sy[3] - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(sy[2] * sy[0] + sy[3] * sy[2] - Complex(0, 1)) < 1e-15);
  // Control is the first qubit (most significant).
  const auto cx = gate_matrix({GateType::CX, {}});
  CHECK(cx[2 * 4 + 3] == Complex(1.0));
  CHECK(cx[1 * 4 + 1] == Complex(1.0));
  const auto rz = gate_matrix({GateType::RZ, {std::numbers::pi}});
  CHECK(std::abs(rz[0] - Complex(0, -1)) < 1e-15);
  CHECK(std::abs(rz[3] - Complex(0, 1)) < 1e-15);
  CHECK_THROWS_AS(gate_matrix({GateType::RX, {}}), Error);
}

TEST_CASE("diagonal flags") {
  std::set<GateType> diag;
  for (GateType t : kAllGates) {
    if (is_diagonal(t)) diag.insert(t);
  }
  CHECK(diag == std::set<GateType>{GateType::Z, GateType::S, GateType::T, GateType::RZ, GateType::P, GateType::CZ,
                                   GateType::CP});
  // The flag must agree with the matrix.
  for (GateType t : kAllGates) {
    const auto u = gate_matrix({t, std::vector<double>(param_count(t), 0.3)});
    const std::size_t d = std::size_t{1} << arity(t);
    bool off_zero = true;
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) off_zero = off_zero && (r == c || u[r * d + c] == Complex{});
    }
    CHECK(off_zero == is_diagonal(t));
  }
}

TEST_CASE("parse_qasm builds greedy layers") {
  const Circuit bell = parse_qasm("qreg q[2]; h q[0]; cx q[0],q[1];");
  CHECK(bell.num_qubits == 2);
  REQUIRE(bell.layers.size() == 2);
  CHECK(bell.layers[0].size() == 1);
  CHECK(bell.layers[0][0].kind.type == GateType::H);
  CHECK(bell.layers[1][0].kind.type == GateType::CX);
  CHECK(bell.layers[1][0].qubits == std::vector<int>{0, 1});

  const Circuit tt = parse_qasm("qreg q[1]; t q[0]; t q[0];");
  REQUIRE(tt.layers.size() == 2);
  CHECK(tt.layers[1][0].layer == 1);

  const Circuit empty = parse_qasm("qreg q[3];");
  CHECK(empty.num_qubits == 3);
  CHECK(empty.layers.empty());

  const Circuit par = parse_qasm("qreg q[3]; h q[0]; h q[1]; cx q[0],q[1]; x q[2];");
  REQUIRE(par.layers.size() == 2);
  CHECK(par.layers[0].size() == 3);
}

TEST_CASE("parse_qasm header, comments, aliases and angles") {
  std::vector<std::string> warnings;
  const Circuit c = parse_qasm(R"(OPENQASM 2.0;
include "qelib1.inc";
// a comment
qreg q[3]; creg c[3];
u1(pi/2) q[0]; cu1(-pi/4) q[0],q[1];
rx(2*pi/3) q[2]; ry((1+1)*pi/8) q[1]; rz(1e-3) q[0]; p(-0.5) q[2];
barrier q[0],q[1];
measure q[0] -> c[0];
h q;
)",
                               &warnings);
  CHECK(warnings.size() == 2);
  REQUIRE(c.gate_count() == 9);
  auto find = [&](GateType t) {
    for (const Gate& g : c.gates()) {
      if (g.kind.type == t) return g;
    }
    FAIL("gate missing");
    return Gate{};
  };
  CHECK(find(GateType::P).qubits == std::vector<int>{0});
  CHECK(find(GateType::P).kind.params[0] == doctest::Approx(std::numbers::pi / 2));
  CHECK(find(GateType::CP).kind.params[0] == doctest::Approx(-std::numbers::pi / 4));
  CHECK(find(GateType::RX).kind.params[0] == doctest::Approx(2 * std::numbers::pi / 3));
  CHECK(find(GateType::RY).kind.params[0] == doctest::Approx(std::numbers::pi / 4));
  CHECK(find(GateType::RZ).kind.params[0] == doctest::Approx(1e-3));
  int hs = 0;
  for (const Gate& g : c.gates()) hs += g.kind.type == GateType::H ? 1 : 0;
  CHECK(hs == 3);
}

TEST_CASE("parse_qasm errors") {
  try {
    parse_qasm("qreg q[2];\nh q[0];\nfoo q[1];");
    FAIL("expected an unsupported-gate error");
  } catch (const UnsupportedGateError& e) {
    CHECK(e.gate() == "foo");
    CHECK(e.line() == 3);
    CHECK(e.column() == 1);
  }
  try {
    parse_qasm("qreg q[2];\nh q[0];\n  cx q[0],q[7];");
    FAIL("expected a range error");
  } catch (const QubitRangeError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 13);
  }
  try {
    parse_qasm("qreg q[2];\nh q[0]\nh q[1];");
    FAIL("expected a syntax error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; rx q[0];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; cx q[0],q[0];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("h q[0];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; qreg r[2];"), ParseError);
  CHECK_THROWS_AS(parse_qasm("qreg q[2]; rz(pi/0) q[0];"), ParseError);
}

TEST_CASE("emit_qasm round-trips") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 6);
    const Circuit c = random_circuit(rng, n, 1 + static_cast<int>(rng() % 30));
    const Circuit back = parse_qasm(emit_qasm(c));
    CHECK(back.num_qubits == c.num_qubits);
    CHECK(back.layers == c.layers);
  }
}

TEST_CASE("parsed layers never share a qubit") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const Circuit c = parse_qasm(emit_qasm(random_circuit(rng, 2 + static_cast<int>(rng() % 6), 40)));
    for (const auto& layer : c.layers) {
      std::set<int> used;
      for (const Gate& g : layer) {
        for (int q : g.qubits) CHECK(used.insert(q).second);
      }
    }
    // Each gate sits right after the last layer touching one of its qubits.
    std::vector<int> last(c.num_qubits, -1);
    for (std::size_t l = 0; l < c.layers.size(); ++l) {
      for (const Gate& g : c.layers[l]) {
        int want = 0;
        for (int q : g.qubits) want = std::max(want, last[q] + 1);
        CHECK(want == static_cast<int>(l));
      }
      for (const Gate& g : c.layers[l]) {
        for (int q : g.qubits) last[q] = static_cast<int>(l);
      }
    }
  }
}

TEST_CASE("parse_rqc") {
  const Circuit c = parse_rqc("2\n0 h 0\n0 h 1\n1 cz 0 1");
  CHECK(c.num_qubits == 2);
  REQUIRE(c.layers.size() == 2);
  CHECK(c.layers[0].size() == 2);
  CHECK(c.layers[1][0].kind.type == GateType::CZ);

  const Circuit one = parse_rqc("1\n0 t 0\n");
  REQUIRE(one.layers.size() == 1);
  CHECK(one.layers[0][0].kind.type == GateType::T);

  const Circuit roots = parse_rqc("2\n0 x_1_2 0\n0 y_1_2 1\n");
  CHECK(roots.layers[0][0].kind.type == GateType::SX);
  CHECK(roots.layers[0][1].kind.type == GateType::SY);

  // Skipped cycles are compacted.
  const Circuit gap = parse_rqc("1\n0 h 0\n5 t 0\n");
  CHECK(gap.layers.size() == 2);

  try {
    parse_rqc("2\n0 h 0\n0 q 5\n");
    FAIL("expected unsupported gate");
  } catch (const UnsupportedGateError& e) {
    CHECK(e.gate() == "q");
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_rqc("2\n0 h 2\n"), QubitRangeError);
  CHECK_THROWS_AS(parse_rqc("2\n0 cz 0\n"), ParseError);
  CHECK_THROWS_AS(parse_rqc("2\n0 h 0\n0 t 0\n"), ParseError);
  CHECK_THROWS_AS(parse_rqc("x\n"), ParseError);
  CHECK_THROWS_AS(parse_rqc(""), ParseError);
}

TEST_CASE("generators") {
  CHECK(generate(Family::Ghz, 25).gate_count() == 25);
  CHECK(generate(Family::GraphState, 25).gate_count() == 50);
  CHECK(generate(Family::GraphState, 26).gate_count() == 52);
  CHECK(generate(Family::Qft, 13).gate_count() == 91);
  CHECK(generate(Family::Qft, 13).mode == SimMode::Unitary);
  CHECK(generate(Family::Qft, 6, {true}).gate_count() == 21 + 3);
  const Circuit eq = generate(Family::QftEntangled, 14);
  CHECK(eq.mode == SimMode::State);
  CHECK(eq.gate_count() == 14 + 105);
  for (int n = 2; n <= 9; ++n) {
    CHECK(generate(Family::Ghz, n).gate_count() == static_cast<std::size_t>(n));
    CHECK(generate(Family::Qft, n).gate_count() == static_cast<std::size_t>(n * (n + 1) / 2));
    generate(Family::QftEntangled, n).validate();
    generate(Family::GraphState, n).validate();
  }
  CHECK(parse_family("qft_entangled") == Family::QftEntangled);
  CHECK_THROWS_AS(parse_family("bogus"), Error);
  CHECK_THROWS_AS(generate(Family::Ghz, 1), Error);
}

TEST_CASE("example circuit") {
  const Circuit c = example_circuit();
  c.validate();
  CHECK(c.gate_count() == 11);
  CHECK(c.layers.size() == 4);
  // Its greedy layering is the same as the transcription.
  CHECK(parse_qasm(emit_qasm(c)).layers == c.layers);
}
