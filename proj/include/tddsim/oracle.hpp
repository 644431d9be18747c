#pragma once

#include <vector>

#include "tddsim/circuit.hpp"
#include "tddsim/network.hpp"
#include "tddsim/tensor.hpp"

namespace tddsim {

inline constexpr int kOracleMaxRank = 26;
inline constexpr int kOracleMaxQubits = 20;

/// Full contraction of a network by eliminating one summed index at a time.
/// Shares no code with the pairwise contraction path. The result ranges over
/// net.open_indices in that order. Throws GuardError when any intermediate
/// factor would exceed kOracleMaxRank indices.
Tensor oracle_contract(const TensorNetwork& net);

/// Applies gate matrices to a 2^n vector starting from |0...0>. Amplitude k
/// has qubit 0 as its most significant bit. State mode only, n <= 20.
std::vector<Complex> oracle_statevector(const Circuit& circuit);

}  // namespace tddsim
