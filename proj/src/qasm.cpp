#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>

#include "tddsim/circuit.hpp"
#include "tddsim/error.hpp"

namespace tddsim {

namespace {

enum class Tok { Ident, Number, String, Symbol, Arrow, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 0;
  std::size_t col = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space();
    Token t;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
        advance();
      }
      t.kind = Tok::Ident;
      t.text = std::string(src_.substr(start, pos_ - start));
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.')) {
        advance();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        advance();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
      }
      t.kind = Tok::Number;
      t.text = std::string(src_.substr(start, pos_ - start));
    } else if (c == '"') {
      advance();
      std::size_t start = pos_;
      while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
      if (pos_ >= src_.size() || src_[pos_] != '"') throw ParseError("unterminated string", t.line, t.col);
      t.kind = Tok::String;
      t.text = std::string(src_.substr(start, pos_ - start));
      advance();
    } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      t.kind = Tok::Arrow;
      t.text = "->";
    } else {
      advance();
      t.kind = Tok::Symbol;
      t.text = std::string(1, c);
    }
    return t;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct GateSpec {
  GateType type;
  int params;
  int qubits;
};

const std::map<std::string, GateSpec, std::less<>>& gate_table() {
  static const std::map<std::string, GateSpec, std::less<>> table = [] {
    std::map<std::string, GateSpec, std::less<>> m;
    for (GateType t : {GateType::H, GateType::X, GateType::Y, GateType::Z, GateType::S, GateType::T,
                       GateType::SX, GateType::SY, GateType::RX, GateType::RY, GateType::RZ, GateType::P,
                       GateType::CZ, GateType::CX, GateType::CP, GateType::SWAP}) {
      m.emplace(std::string(gate_name(t)), GateSpec{t, param_count(t), arity(t)});
    }
    m.emplace("u1", GateSpec{GateType::P, 1, 1});
    m.emplace("cu1", GateSpec{GateType::CP, 1, 2});
    m.emplace("phase", GateSpec{GateType::P, 1, 1});
    m.emplace("cphase", GateSpec{GateType::CP, 1, 2});
    m.emplace("cnot", GateSpec{GateType::CX, 0, 2});
    return m;
  }();
  return table;
}

class Parser {
 public:
  Parser(std::string_view text, std::vector<std::string>* warnings) : lex_(text), warnings_(warnings) {
    tok_ = lex_.next();
  }

  Circuit run() {
    while (tok_.kind != Tok::End) statement();
    if (!circuit_) circuit_.emplace();
    return std::move(*circuit_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, tok_.line, tok_.col); }

  void bump() { tok_ = lex_.next(); }

  bool is_symbol(char c) const { return tok_.kind == Tok::Symbol && tok_.text[0] == c; }

  void expect_symbol(char c) {
    if (!is_symbol(c)) fail(std::string("expected '") + c + "'");
    bump();
  }

  std::string expect_ident() {
    if (tok_.kind != Tok::Ident) fail("expected identifier");
    std::string s = tok_.text;
    bump();
    return s;
  }

  long expect_int() {
    if (tok_.kind != Tok::Number || tok_.text.find_first_not_of("0123456789") != std::string::npos) {
      fail("expected integer");
    }
    long v = std::stol(tok_.text);
    bump();
    return v;
  }

  void skip_to_semicolon() {
    while (tok_.kind != Tok::End && !is_symbol(';')) bump();
    expect_symbol(';');
  }

  void statement() {
    if (tok_.kind != Tok::Ident) fail("expected statement");
    const Token head = tok_;
    const std::string word = expect_ident();
    if (word == "OPENQASM" || word == "include" || word == "creg") {
      skip_to_semicolon();
    } else if (word == "qreg") {
      if (circuit_) throw ParseError("only one quantum register is supported", head.line, head.col);
      reg_ = expect_ident();
      expect_symbol('[');
      const long n = expect_int();
      expect_symbol(']');
      expect_symbol(';');
      if (n <= 0) throw ParseError("register size must be positive", head.line, head.col);
      circuit_.emplace();
      circuit_->num_qubits = static_cast<int>(n);
    } else if (word == "measure" || word == "barrier") {
      if (warnings_) {
        warnings_->push_back("line " + std::to_string(head.line) + ": skipping '" + word + "'");
      }
      skip_to_semicolon();
    } else {
      application(word, head);
    }
  }

  void application(const std::string& name, const Token& head) {
    auto it = gate_table().find(name);
    if (it == gate_table().end()) throw UnsupportedGateError(name, head.line, head.col);
    const GateSpec spec = it->second;
    if (!circuit_) throw ParseError("gate before qreg declaration", head.line, head.col);

    std::vector<double> params;
    if (is_symbol('(')) {
      bump();
      if (!is_symbol(')')) {
        params.push_back(expr());
        while (is_symbol(',')) {
          bump();
          params.push_back(expr());
        }
      }
      expect_symbol(')');
    }
    if (static_cast<int>(params.size()) != spec.params) {
      throw ParseError("gate '" + name + "' expects " + std::to_string(spec.params) + " parameter(s)", head.line,
                       head.col);
    }

    std::vector<std::optional<int>> args;
    args.push_back(qubit_arg());
    while (is_symbol(',')) {
      bump();
      args.push_back(qubit_arg());
    }
    expect_symbol(';');
    if (static_cast<int>(args.size()) != spec.qubits) {
      throw ParseError("gate '" + name + "' expects " + std::to_string(spec.qubits) + " qubit(s)", head.line,
                       head.col);
    }

    const GateKind kind{spec.type, params};
    bool whole = false;
    for (const auto& a : args) whole = whole || !a;
    if (!whole) {
      std::vector<int> qs;
      for (const auto& a : args) qs.push_back(*a);
      for (std::size_t i = 0; i < qs.size(); ++i) {
        for (std::size_t j = i + 1; j < qs.size(); ++j) {
          if (qs[i] == qs[j]) throw ParseError("repeated qubit in gate '" + name + "'", head.line, head.col);
        }
      }
      circuit_->append({kind, std::move(qs)});
      return;
    }
    if (spec.qubits != 1) throw ParseError("register broadcast only supported for one-qubit gates", head.line, head.col);
    for (int q = 0; q < circuit_->num_qubits; ++q) circuit_->append({kind, {q}});
  }

  // Empty optional means the whole register.
  std::optional<int> qubit_arg() {
    const Token at = tok_;
    const std::string reg = expect_ident();
    if (reg != reg_) throw ParseError("unknown register '" + reg + "'", at.line, at.col);
    if (!is_symbol('[')) return std::nullopt;
    bump();
    const Token num = tok_;
    const long q = expect_int();
    expect_symbol(']');
    if (q < 0 || q >= circuit_->num_qubits) {
      throw QubitRangeError("qubit index " + std::to_string(q) + " out of range", num.line, num.col);
    }
    return static_cast<int>(q);
  }

  double expr() {
    double v = term();
    while (is_symbol('+') || is_symbol('-')) {
      const bool plus = is_symbol('+');
      bump();
      const double rhs = term();
      v = plus ? v + rhs : v - rhs;
    }
    return v;
  }

  double term() {
    double v = unary();
    while (is_symbol('*') || is_symbol('/')) {
      const bool mul = is_symbol('*');
      bump();
      const double rhs = unary();
      if (!mul && rhs == 0.0) fail("division by zero");
      v = mul ? v * rhs : v / rhs;
    }
    return v;
  }

  double unary() {
    if (is_symbol('-')) {
      bump();
      return -unary();
    }
    if (is_symbol('+')) {
      bump();
      return unary();
    }
    return primary();
  }

  double primary() {
    if (is_symbol('(')) {
      bump();
      const double v = expr();
      expect_symbol(')');
      return v;
    }
    if (tok_.kind == Tok::Ident && tok_.text == "pi") {
      bump();
      return std::numbers::pi;
    }
    if (tok_.kind == Tok::Number) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok_.text, &used);
      } catch (const std::exception&) {
        fail("bad number '" + tok_.text + "'");
      }
      if (used != tok_.text.size()) fail("bad number '" + tok_.text + "'");
      bump();
      return v;
    }
    fail("expected angle expression");
  }

  Lexer lex_;
  Token tok_;
  std::vector<std::string>* warnings_;
  std::optional<Circuit> circuit_;
  std::string reg_;
};

}  // namespace

Circuit parse_qasm(std::string_view text, std::vector<std::string>* warnings) {
  Parser parser(text, warnings);
  return parser.run();
}

Circuit parse_qasm(std::string_view text) { return parse_qasm(text, nullptr); }

std::string emit_qasm(const Circuit& circuit) {
  std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  out += "qreg q[" + std::to_string(circuit.num_qubits) + "];\n";
  char buf[64];
  for (const auto& layer : circuit.layers) {
    for (const Gate& g : layer) {
      out += gate_name(g.kind.type);
      if (!g.kind.params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < g.kind.params.size(); ++i) {
          if (i) out += ',';
          std::snprintf(buf, sizeof buf, "%.17g", g.kind.params[i]);
          out += buf;
        }
        out += ')';
      }
      for (std::size_t i = 0; i < g.qubits.size(); ++i) {
        out += i ? "," : " ";
        out += "q[" + std::to_string(g.qubits[i]) + "]";
      }
      out += ";\n";
    }
  }
  return out;
}

}  // namespace tddsim
