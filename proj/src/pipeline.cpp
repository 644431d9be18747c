#include "tddsim/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "tddsim/oracle.hpp"

namespace tddsim {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool looks_like_rqc(const std::string& path, const std::string& text) {
  if (path.ends_with(".qasm")) return false;
  if (path.ends_with(".txt")) return true;
  std::istringstream in(text);
  std::string first;
  in >> first;
  return !first.empty() && first.find_first_not_of("0123456789") == std::string::npos;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace

std::string format_complex(Complex c) {
  char buf[64];
  auto put = [&](char* p, double v) { return std::to_chars(p, buf + sizeof buf, v).ptr; };
  char* p = put(buf, c.real() == 0.0 ? 0.0 : c.real());
  const double im = c.imag() == 0.0 ? 0.0 : c.imag();
  if (!std::signbit(im)) *p++ = '+';
  p = put(p, im);
  *p++ = 'i';
  return std::string(buf, p);
}

Circuit load_circuit(const RunConfig& config, std::vector<std::string>* warnings) {
  Circuit c;
  if (config.generator) {
    const std::string& spec = *config.generator;
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error("generator spec must look like family:n");
    int n = 0;
    const std::string count = spec.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), n);
    if (ec != std::errc() || ptr != count.data() + count.size()) throw Error("bad qubit count '" + count + "'");
    c = generate(parse_family(spec.substr(0, colon)), n, {config.qft_swaps});
  } else {
    if (config.input_path.empty()) throw Error("no input circuit given");
    const std::string text = read_file(config.input_path);
    c = looks_like_rqc(config.input_path, text) ? parse_rqc(text) : parse_qasm(text, warnings);
  }
  if (config.unitary) c.mode = SimMode::Unitary;
  return c;
}

std::string RunReport::stats_json() const {
  return tddsim::stats_json(stats, final_nodes,
                            {{"parse_seconds", times.parse},
                             {"tetris_seconds", times.tetris},
                             {"ordering_seconds", times.ordering},
                             {"contraction_seconds", times.contraction}});
}

RunReport run(const RunConfig& config) {
  RunReport report;

  auto t0 = Clock::now();
  const Circuit circuit = load_circuit(config, &report.warnings);
  TensorNetwork net = build_network(circuit, config.hyper_edges);
  report.times.parse = seconds_since(t0);
  report.num_qubits = circuit.num_qubits;
  report.mode = circuit.mode;
  report.gates = circuit.gate_count();
  report.tensors_before = net.tensors.size();

  if (config.verify) {
    if (static_cast<int>(net.open_indices.size()) > kOracleMaxRank ||
        (circuit.mode == SimMode::State && circuit.num_qubits > kOracleMaxQubits)) {
      throw Error("--verify is limited to circuits the dense oracle can hold");
    }
  }

  t0 = Clock::now();
  if (config.tetris) net = tetris_simplify(net, config.tetris_constraint);
  report.times.tetris = seconds_since(t0);
  report.tensors_after = net.tensors.size();
  if (!config.dump_network.empty()) write_file(config.dump_network, dump_network_json(net));

  t0 = Clock::now();
  ContractionOrder order;
  if (config.order == "sequential") {
    order = order_sequential(net);
  } else if (config.order == "greedy") {
    order = order_greedy(net);
  } else if (config.order.starts_with("file:")) {
    order = order_import(config.order.substr(5), net);
  } else {
    throw Error("unknown order '" + config.order + "'");
  }
  report.times.ordering = seconds_since(t0);
  report.order_flops = order_flops(net, order);
  report.order_max_rank = order_max_rank(net, order);

  std::optional<Tensor> dense;
  t0 = Clock::now();
  if (config.backend == Backend::Tdd) {
    Engine engine({config.gc_limit, config.cache_bits});
    const std::vector<int> levels = index_levels(net, config.index_order);
    const Tdd result = contract_network(engine, net, order, levels);
    report.times.contraction = seconds_since(t0);
    report.final_nodes = engine.node_count(result.root);
    report.stats = engine.stats();

    std::vector<std::pair<IndexId, int>> assignment;
    for (const std::string& bits : config.amplitudes) {
      const bool possible = canonical_assignment(net, bits, assignment);
      report.amplitudes.emplace_back(bits, possible ? engine.amplitude(result, assignment) : Complex{});
    }
    if (!config.dump_dot.empty()) write_file(config.dump_dot, engine.to_dot(result, net.labels));
    if (config.verify) dense = engine.tdd_to_tensor(result);
  } else {
    dense = contract_network_dense(net, order);
    report.times.contraction = seconds_since(t0);
    std::vector<std::pair<IndexId, int>> assignment;
    for (const std::string& bits : config.amplitudes) {
      Complex v{};
      if (canonical_assignment(net, bits, assignment)) {
        std::vector<int> b;
        for (IndexId i : dense->indices) {
          for (auto [id, bit] : assignment) {
            if (id == i) b.push_back(bit);
          }
        }
        v = dense->at(b);
      }
      report.amplitudes.emplace_back(bits, v);
    }
  }

  if (config.verify) {
    const std::vector<Complex> got = canonical_amplitudes(net, *dense);
    const TensorNetwork plain = build_network(circuit, false);
    const std::vector<Complex> ref = canonical_amplitudes(plain, oracle_contract(plain));
    double err = 0.0;
    for (std::size_t k = 0; k < got.size(); ++k) err = std::max(err, std::abs(got[k] - ref[k]));
    if (circuit.mode == SimMode::State) {
      const std::vector<Complex> sv = oracle_statevector(circuit);
      for (std::size_t k = 0; k < got.size(); ++k) err = std::max(err, std::abs(got[k] - sv[k]));
    }
    report.verify_error = err;
    report.verified = err <= 1e-10;
  }
  return report;
}

}  // namespace tddsim
