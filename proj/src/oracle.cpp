#include "tddsim/oracle.hpp"

#include <algorithm>
#include <map>

#include "tddsim/error.hpp"

namespace tddsim {

namespace {

struct Factor {
  std::vector<int> vars;  // index ids, vars[0] is the most significant bit
  std::vector<Complex> values;
};

int bit_of(std::size_t assignment, std::size_t width, std::size_t pos) {
  return static_cast<int>((assignment >> (width - 1 - pos)) & 1);
}

// Product of the given factors over the union of their variables, with
// `drop` (if >= 0) summed out. Plain loops over full assignments.
Factor multiply_and_sum(const std::vector<const Factor*>& fs, int drop) {
  std::vector<int> all;
  for (const Factor* f : fs) {
    for (int v : f->vars) {
      if (std::find(all.begin(), all.end(), v) == all.end()) all.push_back(v);
    }
  }
  std::vector<int> keep;
  for (int v : all) {
    if (v != drop) keep.push_back(v);
  }
  if (static_cast<int>(all.size()) > kOracleMaxRank) throw GuardError("oracle factor exceeds the rank guard");

  Factor out{keep, std::vector<Complex>(std::size_t{1} << keep.size())};
  const std::size_t width = all.size();
  // Where each factor variable sits in `all`.
  std::vector<std::vector<std::size_t>> where;
  for (const Factor* f : fs) {
    std::vector<std::size_t> w;
    for (int v : f->vars) w.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), v) - all.begin()));
    where.push_back(std::move(w));
  }
  std::vector<std::size_t> keep_pos;
  for (int v : keep) keep_pos.push_back(static_cast<std::size_t>(std::find(all.begin(), all.end(), v) - all.begin()));

  for (std::size_t x = 0; x < (std::size_t{1} << width); ++x) {
    Complex prod{1.0, 0.0};
    for (std::size_t f = 0; f < fs.size(); ++f) {
      std::size_t off = 0;
      for (std::size_t p : where[f]) off = (off << 1) | static_cast<std::size_t>(bit_of(x, width, p));
      prod *= fs[f]->values[off];
    }
    std::size_t o = 0;
    for (std::size_t p : keep_pos) o = (o << 1) | static_cast<std::size_t>(bit_of(x, width, p));
    out.values[o] += prod;
  }
  return out;
}

}  // namespace

Tensor oracle_contract(const TensorNetwork& net) {
  if (static_cast<int>(net.open_indices.size()) > kOracleMaxRank) {
    throw GuardError("oracle limited to " + std::to_string(kOracleMaxRank) + " open indices");
  }
  std::vector<Factor> factors;
  for (const Tensor& t : net.tensors) {
    Factor f;
    for (IndexId i : t.indices) f.vars.push_back(i.id);
    f.values = t.data;
    factors.push_back(std::move(f));
  }
  std::vector<bool> open(net.labels.size(), false);
  for (IndexId i : net.open_indices) open[i.id] = true;

  // Eliminate every closed index exactly once, hyper-edges included.
  for (int v = 0; v < static_cast<int>(net.labels.size()); ++v) {
    if (open[v]) continue;
    std::vector<const Factor*> bucket;
    std::vector<Factor> rest;
    for (const Factor& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), v) != f.vars.end()) bucket.push_back(&f);
    }
    if (bucket.empty()) continue;
    Factor merged = multiply_and_sum(bucket, v);
    for (Factor& f : factors) {
      if (std::find(f.vars.begin(), f.vars.end(), v) == f.vars.end()) rest.push_back(std::move(f));
    }
    rest.push_back(std::move(merged));
    factors = std::move(rest);
  }

  std::vector<const Factor*> remaining;
  for (const Factor& f : factors) remaining.push_back(&f);
  Factor all = remaining.empty() ? Factor{{}, {Complex{1.0, 0.0}}} : multiply_and_sum(remaining, -1);

  // Spread onto the open indices in order; absent ones are constant.
  const std::size_t m = net.open_indices.size();
  Tensor out(net.open_indices, std::vector<Complex>(std::size_t{1} << m));
  for (std::size_t x = 0; x < out.data.size(); ++x) {
    std::size_t off = 0;
    for (int v : all.vars) {
      const auto pos = static_cast<std::size_t>(
          std::find(net.open_indices.begin(), net.open_indices.end(), IndexId{v}) - net.open_indices.begin());
      off = (off << 1) | static_cast<std::size_t>(bit_of(x, m, pos));
    }
    out.data[x] = all.values[off];
  }
  return out;
}

std::vector<Complex> oracle_statevector(const Circuit& circuit) {
  if (circuit.mode != SimMode::State) throw Error("state-vector oracle needs a state-mode circuit");
  const int n = circuit.num_qubits;
  if (n > kOracleMaxQubits) throw GuardError("state-vector oracle limited to 20 qubits");
  circuit.validate();
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Complex> psi(dim);
  psi[0] = 1.0;

  for (const auto& layer : circuit.layers) {
    for (const Gate& g : layer) {
      const std::vector<Complex> u = gate_matrix(g.kind);
      const int a = static_cast<int>(g.qubits.size());
      const std::size_t sub = std::size_t{1} << a;
      std::vector<std::size_t> mask(a);
      for (int k = 0; k < a; ++k) mask[k] = std::size_t{1} << (n - 1 - g.qubits[k]);
      std::size_t all_mask = 0;
      for (std::size_t m : mask) all_mask |= m;

      std::vector<Complex> in(sub), out(sub);
      std::vector<std::size_t> pos(sub);
      for (std::size_t base = 0; base < dim; ++base) {
        if (base & all_mask) continue;
        for (std::size_t s = 0; s < sub; ++s) {
          std::size_t idx = base;
          for (int k = 0; k < a; ++k) {
            if ((s >> (a - 1 - k)) & 1) idx |= mask[k];
          }
          pos[s] = idx;
          in[s] = psi[idx];
        }
        for (std::size_t r = 0; r < sub; ++r) {
          Complex acc{0.0, 0.0};
          for (std::size_t c = 0; c < sub; ++c) acc += u[r * sub + c] * in[c];
          out[r] = acc;
        }
        for (std::size_t s = 0; s < sub; ++s) psi[pos[s]] = out[s];
      }
    }
  }
  return psi;
}

}  // namespace tddsim
