#include <charconv>
#include <map>
#include <sstream>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"

namespace tddsim {

namespace {

bool to_int(const std::string& s, long& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

Circuit parse_rqc(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  long n = -1;
  std::map<long, std::vector<Gate>> cycles;

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> words;
    for (std::string w; ls >> w;) words.push_back(w);
    if (words.empty()) continue;

    if (n < 0) {
      if (words.size() != 1 || !to_int(words[0], n) || n <= 0) {
        throw ParseError("first line must be the qubit count", lineno, 0);
      }
      continue;
    }
    if (words.size() < 3) throw ParseError("expected 'cycle gate qubit [qubit]'", lineno, 0);

    long cycle = 0;
    if (!to_int(words[0], cycle) || cycle < 0) throw ParseError("bad cycle number '" + words[0] + "'", lineno, 0);

    const std::string& name = words[1];
    GateType type;
    if (name == "h") type = GateType::H;
    else if (name == "t") type = GateType::T;
    else if (name == "x_1_2") type = GateType::SX;
    else if (name == "y_1_2") type = GateType::SY;
    else if (name == "cz") type = GateType::CZ;
    else throw UnsupportedGateError(name, lineno, 0);

    if (static_cast<int>(words.size()) != 2 + arity(type)) {
      throw ParseError("gate '" + name + "' expects " + std::to_string(arity(type)) + " qubit(s)", lineno, 0);
    }
    Gate g{{type, {}}, {}};
    for (std::size_t i = 2; i < words.size(); ++i) {
      long q = 0;
      if (!to_int(words[i], q)) throw ParseError("bad qubit '" + words[i] + "'", lineno, 0);
      if (q < 0 || q >= n) throw QubitRangeError("qubit " + words[i] + " out of range", lineno, 0);
      for (int prev : g.qubits) {
        if (prev == q) throw ParseError("repeated qubit", lineno, 0);
      }
      g.qubits.push_back(static_cast<int>(q));
    }
    for (const Gate& other : cycles[cycle]) {
      for (int q : other.qubits) {
        for (int p : g.qubits) {
          if (p == q) throw ParseError("qubit " + std::to_string(q) + " used twice in cycle", lineno, 0);
        }
      }
    }
    cycles[cycle].push_back(std::move(g));
  }
  if (n < 0) throw ParseError("missing qubit count", lineno + 1, 0);

  // Cycles become layers in ascending order; gaps are dropped.
  Circuit c;
  c.num_qubits = static_cast<int>(n);
  for (auto& [cycle, gates] : cycles) {
    for (Gate& g : gates) g.layer = static_cast<int>(c.layers.size());
    c.layers.push_back(std::move(gates));
  }
  return c;
}

}  // namespace tddsim
