#include "tddsim/gate.hpp"

#include <cmath>
#include <numbers>

#include "tddsim/error.hpp"

namespace tddsim {

int arity(GateType type) {
  switch (type) {
    case GateType::CZ:
    case GateType::CX:
    case GateType::CP:
    case GateType::SWAP:
      return 2;
    default:
      return 1;
  }
}

int param_count(GateType type) {
  switch (type) {
    case GateType::RX:
    case GateType::RY:
    case GateType::RZ:
    case GateType::P:
    case GateType::CP:
      return 1;
    default:
      return 0;
  }
}

bool is_diagonal(GateType type) {
  switch (type) {
    case GateType::Z:
    case GateType::S:
    case GateType::T:
    case GateType::RZ:
    case GateType::P:
    case GateType::CZ:
    case GateType::CP:
      return true;
    default:
      return false;
  }
}

std::string_view gate_name(GateType type) {
  switch (type) {
    case GateType::H: return "h";
    case GateType::X: return "x";
    case GateType::Y: return "y";
    case GateType::Z: return "z";
    case GateType::S: return "s";
    case GateType::T: return "t";
    case GateType::SX: return "sx";
    case GateType::SY: return "sy";
    case GateType::RX: return "rx";
    case GateType::RY: return "ry";
    case GateType::RZ: return "rz";
    case GateType::P: return "p";
    case GateType::CZ: return "cz";
    case GateType::CX: return "cx";
    case GateType::CP: return "cp";
    case GateType::SWAP: return "swap";
  }
  return "?";
}

std::vector<Complex> gate_matrix(const GateKind& kind) {
  if (static_cast<int>(kind.params.size()) != param_count(kind.type)) {
    throw Error("gate '" + std::string(gate_name(kind.type)) + "' expects " +
                std::to_string(param_count(kind.type)) + " parameter(s)");
  }
  using namespace std::complex_literals;
  const double r = std::numbers::sqrt2 / 2.0;
  const double theta = kind.params.empty() ? 0.0 : kind.params[0];
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  switch (kind.type) {
    case GateType::H: return {r, r, r, -r};
    case GateType::X: return {0.0, 1.0, 1.0, 0.0};
    case GateType::Y: return {0.0, -1i, 1i, 0.0};
    case GateType::Z: return {1.0, 0.0, 0.0, -1.0};
    case GateType::S: return {1.0, 0.0, 0.0, 1i};
    case GateType::T: return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0)};
    case GateType::SX: return {0.5 + 0.5i, 0.5 - 0.5i, 0.5 - 0.5i, 0.5 + 0.5i};
    case GateType::SY: return {0.5 + 0.5i, -0.5 - 0.5i, 0.5 + 0.5i, 0.5 + 0.5i};
    case GateType::RX: return {c, -1i * s, -1i * s, c};
    case GateType::RY: return {c, -s, s, c};
    case GateType::RZ: return {std::polar(1.0, -theta / 2.0), 0.0, 0.0, std::polar(1.0, theta / 2.0)};
    case GateType::P: return {1.0, 0.0, 0.0, std::polar(1.0, theta)};
    case GateType::CZ:
      return {1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 1, 0,
              0, 0, 0, -1};
    case GateType::CX:
      return {1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 0, 1,
              0, 0, 1, 0};
    case GateType::CP:
      return {1, 0, 0, 0,
              0, 1, 0, 0,
              0, 0, 1, 0,
              0, 0, 0, std::polar(1.0, theta)};
    case GateType::SWAP:
      return {1, 0, 0, 0,
              0, 0, 1, 0,
              0, 1, 0, 0,
              0, 0, 0, 1};
  }
  throw Error("unknown gate type");
}

}  // namespace tddsim
