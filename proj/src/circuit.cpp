#include <algorithm>
#include <set>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"

namespace tddsim {

std::size_t Circuit::gate_count() const {
  std::size_t count = 0;
  for (const auto& layer : layers) count += layer.size();
  return count;
}

std::vector<Gate> Circuit::gates() const {
  std::vector<Gate> out;
  out.reserve(gate_count());
  for (const auto& layer : layers) out.insert(out.end(), layer.begin(), layer.end());
  return out;
}

void Circuit::append(Gate gate) {
  std::size_t layer = 0;
  for (std::size_t l = layers.size(); l-- > 0;) {
    bool touches = false;
    for (const Gate& g : layers[l]) {
      for (int q : g.qubits) {
        if (std::find(gate.qubits.begin(), gate.qubits.end(), q) != gate.qubits.end()) touches = true;
      }
    }
    if (touches) {
      layer = l + 1;
      break;
    }
  }
  if (layer == layers.size()) layers.emplace_back();
  gate.layer = static_cast<int>(layer);
  layers[layer].push_back(std::move(gate));
}

void Circuit::validate() const {
  if (num_qubits <= 0) throw Error("circuit needs at least one qubit");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::set<int> used;
    for (const Gate& g : layers[l]) {
      if (static_cast<int>(g.qubits.size()) != arity(g.kind.type)) {
        throw Error("gate '" + std::string(gate_name(g.kind.type)) + "' has wrong qubit count");
      }
      for (int q : g.qubits) {
        if (q < 0 || q >= num_qubits) throw Error("qubit " + std::to_string(q) + " out of range");
        if (!used.insert(q).second) {
          throw Error("layer " + std::to_string(l) + " uses qubit " + std::to_string(q) + " twice");
        }
      }
    }
  }
}

}  // namespace tddsim
