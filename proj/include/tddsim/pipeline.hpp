#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"
#include "tddsim/network.hpp"
#include "tddsim/tdd.hpp"

namespace tddsim {

enum class Backend { Tdd, Dense };

struct RunConfig {
  std::string input_path;               // QASM or RQC file (by extension)
  std::optional<std::string> generator;  // "family:n"
  bool tetris = true;
  std::string order = "greedy";  // sequential | greedy | file:PATH
  bool hyper_edges = true;
  Backend backend = Backend::Tdd;
  std::size_t gc_limit = std::size_t{1} << 22;
  int cache_bits = 20;
  TetrisConstraint tetris_constraint = TetrisConstraint::Max;
  IndexOrder index_order = IndexOrder::Interleaved;
  bool verify = false;
  bool unitary = false;    // force unitary simulation
  bool qft_swaps = false;
  std::vector<std::string> amplitudes;
  std::string dump_dot;      // path, empty for none
  std::string dump_network;  // path, empty for none
};

struct StageTimes {
  double parse = 0.0;
  double tetris = 0.0;
  double ordering = 0.0;
  double contraction = 0.0;
};

struct RunReport {
  int num_qubits = 0;
  SimMode mode = SimMode::State;
  std::size_t gates = 0;
  std::size_t tensors_before = 0;
  std::size_t tensors_after = 0;
  double order_flops = 0.0;
  int order_max_rank = 0;
  std::uint64_t final_nodes = 0;
  EngineStats stats;
  StageTimes times;
  std::vector<std::pair<std::string, Complex>> amplitudes;
  bool verified = false;  // with verify: oracle agreement within 1e-10
  double verify_error = 0.0;
  std::vector<std::string> warnings;

  std::string stats_json() const;
};

Circuit load_circuit(const RunConfig& config, std::vector<std::string>* warnings);

RunReport run(const RunConfig& config);

/// Shortest round-trip form, e.g. "0.7071067811865476+0i".
std::string format_complex(Complex c);

}  // namespace tddsim
