#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "tddsim/gate.hpp"

namespace tddsim {

enum class SimMode { State, Unitary };

struct Circuit {
  int num_qubits = 0;
  std::vector<std::vector<Gate>> layers;
  SimMode mode = SimMode::State;

  std::size_t gate_count() const;

  /// Gates in layer order, each layer in stored order.
  std::vector<Gate> gates() const;

  /// Appends a gate to the earliest layer after the last one touching any of
  /// its qubits.
  void append(Gate gate);

  /// Throws Error when a qubit is out of range, repeated within a gate, or
  /// two gates of one layer overlap.
  void validate() const;
};

Circuit parse_qasm(std::string_view text);

/// Diagnostics (skipped measure/barrier statements) are appended to
/// `warnings` when it is non-null.
Circuit parse_qasm(std::string_view text, std::vector<std::string>* warnings);

std::string emit_qasm(const Circuit& circuit);

Circuit parse_rqc(std::string_view text);

enum class Family { Ghz, GraphState, Qft, QftEntangled };

Family parse_family(std::string_view name);
std::string_view family_name(Family family);

struct GenerateOptions {
  bool qft_swaps = false;
};

Circuit generate(Family family, int n, GenerateOptions options = {});

/// The four-qubit example circuit used to illustrate rank simplification:
/// H on every line, then CZ(0,1) T2 SX3, SX0 SY1, T0 CZ(1,2).
Circuit example_circuit();

}  // namespace tddsim
