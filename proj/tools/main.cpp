#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <new>

#include "tddsim/error.hpp"
#include "tddsim/pipeline.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;
constexpr int kExitResources = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace tddsim;

  CLI::App app{"Quantum circuit simulation with tensor decision diagrams"};
  RunConfig config;
  std::string generator;
  std::string tetris = "on";
  std::string hyper = "on";
  std::string backend = "tdd";
  std::string constraint = "max";
  std::string index_order = "interleaved";
  std::string stats_out;

  app.add_option("input", config.input_path, "OpenQASM 2.0 file or RQC instance (.txt)");
  app.add_option("--gen", generator, "Generated circuit, family:n (ghz, graph_state, qft, qft_entangled)");
  app.add_option("--tetris", tetris, "Rank simplification")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--order", config.order, "sequential | greedy | file:PATH");
  app.add_option("--hyper-edges", hyper, "Merge diagonal-gate indices")->check(CLI::IsMember({"on", "off"}));
  app.add_option("--backend", backend, "Contraction backend")->check(CLI::IsMember({"tdd", "dense"}));
  app.add_option("--gc-limit", config.gc_limit, "Live node count that triggers garbage collection");
  app.add_option("--cache-bits", config.cache_bits, "log2 of each computed-cache size")->check(CLI::Range(1, 30));
  app.add_option("--tetris-constraint", constraint, "Rank bound for consolidation")
      ->check(CLI::IsMember({"max", "min"}));
  app.add_option("--index-order", index_order, "Global index order")
      ->check(CLI::IsMember({"interleaved", "appearance"}));
  app.add_flag("--verify", config.verify, "Cross-check against the dense oracles");
  app.add_option("--stats-out", stats_out, "Write stats JSON to this path");
  app.add_option("--amplitude", config.amplitudes,
                 "Bitstring to evaluate (qubit 0 first; unitary mode: outputs then inputs)");
  app.add_option("--dump-dot", config.dump_dot, "Write the final diagram as Graphviz DOT");
  app.add_option("--dump-network", config.dump_network, "Write the simplified network as JSON");
  app.add_flag("--unitary", config.unitary, "Simulate the full unitary (inputs left open)");
  app.add_flag("--qft-swaps", config.qft_swaps, "Append the final swap layer to generated QFTs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (!generator.empty()) config.generator = generator;
  if (config.generator && !config.input_path.empty()) {
    std::cerr << "error: give either an input file or --gen, not both\n";
    return kExitInput;
  }
  config.tetris = tetris == "on";
  config.hyper_edges = hyper == "on";
  config.backend = backend == "tdd" ? Backend::Tdd : Backend::Dense;
  config.tetris_constraint = constraint == "max" ? TetrisConstraint::Max : TetrisConstraint::Min;
  config.index_order = parse_index_order(index_order);

  RunReport report;
  try {
    report = run(config);
  } catch (const ArenaExhausted& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResources;
  } catch (const GuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResources;
  } catch (const std::bad_alloc&) {
    std::cerr << "error: out of memory\n";
    return kExitResources;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }

  for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("qubits: %d (%s)\n", report.num_qubits, report.mode == SimMode::State ? "state" : "unitary");
  std::printf("gates: %zu\n", report.gates);
  std::printf("tensors: %zu -> %zu\n", report.tensors_before, report.tensors_after);
  std::printf("order: %g flops, max rank %d\n", report.order_flops, report.order_max_rank);
  std::printf("time parse: %.6f s\n", report.times.parse);
  std::printf("time tetris: %.6f s\n", report.times.tetris);
  std::printf("time ordering: %.6f s\n", report.times.ordering);
  std::printf("time contraction: %.6f s\n", report.times.contraction);
  if (config.backend == Backend::Tdd) std::printf("final_nodes: %llu\n", static_cast<unsigned long long>(report.final_nodes));
  for (const auto& [bits, value] : report.amplitudes) {
    std::printf("amplitude %s: %s\n", bits.c_str(), format_complex(value).c_str());
  }

  const std::string json = report.stats_json();
  if (!stats_out.empty()) {
    std::ofstream out(stats_out);
    if (!out) {
      std::cerr << "error: cannot write '" << stats_out << "'\n";
      return kExitInput;
    }
    out << json << "\n";
  }
  std::printf("%s\n", json.c_str());

  if (config.verify) {
    std::printf("verify: %s (max deviation %.3g)\n", report.verified ? "ok" : "MISMATCH", report.verify_error);
    if (!report.verified) return kExitVerify;
  }
  return 0;
}
