#include <numbers>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"

namespace tddsim {

Family parse_family(std::string_view name) {
  if (name == "ghz") return Family::Ghz;
  if (name == "graph_state" || name == "graphstate") return Family::GraphState;
  if (name == "qft") return Family::Qft;
  if (name == "qft_entangled" || name == "qftentangled") return Family::QftEntangled;
  throw Error("unknown circuit family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::Ghz: return "ghz";
    case Family::GraphState: return "graph_state";
    case Family::Qft: return "qft";
    case Family::QftEntangled: return "qft_entangled";
  }
  return "?";
}

namespace {

void add_ghz(Circuit& c, int n) {
  c.append({{GateType::H, {}}, {0}});
  for (int i = 0; i + 1 < n; ++i) c.append({{GateType::CX, {}}, {i, i + 1}});
}

// H(i) followed by controlled phases from every later qubit; the output
// comes out bit-reversed unless swaps are appended.
void add_qft(Circuit& c, int n, bool swaps) {
  for (int i = 0; i < n; ++i) {
    c.append({{GateType::H, {}}, {i}});
    for (int j = i + 1; j < n; ++j) {
      c.append({{GateType::CP, {std::numbers::pi / static_cast<double>(1LL << (j - i))}}, {j, i}});
    }
  }
  if (swaps) {
    for (int i = 0; i < n / 2; ++i) c.append({{GateType::SWAP, {}}, {i, n - 1 - i}});
  }
}

}  // namespace

Circuit generate(Family family, int n, GenerateOptions options) {
  if (n < 1) throw Error("qubit count must be positive");
  if (n < 2 && family != Family::Qft) throw Error("entangling families need n >= 2");
  Circuit c;
  c.num_qubits = n;
  switch (family) {
    case Family::Ghz:
      add_ghz(c, n);
      break;
    case Family::GraphState:
      for (int i = 0; i < n; ++i) c.append({{GateType::H, {}}, {i}});
      for (int i = 0; i < n; ++i) c.append({{GateType::CZ, {}}, {i, (i + 1) % n}});
      break;
    case Family::Qft:
      c.mode = SimMode::Unitary;
      add_qft(c, n, options.qft_swaps);
      break;
    case Family::QftEntangled:
      add_ghz(c, n);
      add_qft(c, n, options.qft_swaps);
      break;
  }
  return c;
}

Circuit example_circuit() {
  Circuit c;
  c.num_qubits = 4;
  c.mode = SimMode::Unitary;
  auto put = [&](int layer, GateType t, std::vector<int> qs) {
    if (static_cast<int>(c.layers.size()) <= layer) c.layers.resize(layer + 1);
    c.layers[layer].push_back({{t, {}}, std::move(qs), layer});
  };
  for (int q = 0; q < 4; ++q) put(0, GateType::H, {q});
  put(1, GateType::CZ, {0, 1});
  put(1, GateType::T, {2});
  put(1, GateType::SX, {3});
  put(2, GateType::SX, {0});
  put(2, GateType::SY, {1});
  put(3, GateType::T, {0});
  put(3, GateType::CZ, {1, 2});
  return c;
}

}  // namespace tddsim
