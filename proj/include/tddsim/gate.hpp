#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tddsim {

using Complex = std::complex<double>;

enum class GateType : std::uint8_t {
  H, X, Y, Z, S, T, SX, SY, RX, RY, RZ, P, CZ, CX, CP, SWAP
};

struct GateKind {
  GateType type = GateType::H;
  std::vector<double> params;

  friend bool operator==(const GateKind&, const GateKind&) = default;
};

int arity(GateType type);
int param_count(GateType type);

/// Every qubit's input index always equals its output index.
bool is_diagonal(GateType type);

/// Lower-case mnemonic, e.g. "h", "cx", "rz".
std::string_view gate_name(GateType type);

/// 2^a x 2^a unitary, row-major, rows are outputs. For two-qubit gates the
/// first listed qubit is the most significant bit of the row/column index.
std::vector<Complex> gate_matrix(const GateKind& kind);

struct Gate {
  GateKind kind;
  std::vector<int> qubits;
  int layer = 0;

  friend bool operator==(const Gate&, const Gate&) = default;
};

}  // namespace tddsim
