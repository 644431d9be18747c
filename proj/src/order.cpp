#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <random>
#include <sstream>
#include <tuple>

#include "tddsim/error.hpp"
#include "tddsim/network.hpp"

namespace tddsim {

namespace {

// Mirror of the working list a pairwise replay maintains: tensors are
// referred to by stable ids, positions are recomputed on demand.
class Replay {
 public:
  explicit Replay(const TensorNetwork& net)
      : open_(net.labels.size(), false), ref_(net.index_refcount()) {
    for (IndexId i : net.open_indices) open_[i.id] = true;
    for (const Tensor& t : net.tensors) {
      std::vector<int> ids;
      for (IndexId i : t.indices) ids.push_back(i.id);
      std::sort(ids.begin(), ids.end());
      sets_.push_back(std::move(ids));
      list_.push_back(static_cast<int>(sets_.size()) - 1);
    }
  }

  std::size_t size() const { return list_.size(); }
  const std::vector<int>& at(std::size_t pos) const { return sets_[list_[pos]]; }

  std::vector<int> result_of(std::size_t i, std::size_t j) const {
    const auto& a = at(i);
    const auto& b = at(j);
    std::vector<int> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    std::erase_if(out, [&](int x) {
      const bool shared = std::binary_search(a.begin(), a.end(), x) && std::binary_search(b.begin(), b.end(), x);
      return shared && !open_[x] && ref_[x] <= 2;
    });
    return out;
  }

  std::size_t union_size(std::size_t i, std::size_t j) const {
    const auto& a = at(i);
    const auto& b = at(j);
    std::size_t common = 0;
    for (int x : a) common += std::binary_search(b.begin(), b.end(), x) ? 1 : 0;
    return a.size() + b.size() - common;
  }

  void apply(std::size_t i, std::size_t j) {
    std::vector<int> c = result_of(i, j);
    for (int x : at(i)) --ref_[x];
    for (int x : at(j)) --ref_[x];
    for (int x : c) ++ref_[x];
    sets_.push_back(std::move(c));
    list_.erase(list_.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
    list_.erase(list_.begin() + static_cast<std::ptrdiff_t>(std::min(i, j)));
    list_.push_back(static_cast<int>(sets_.size()) - 1);
  }

  // Position pairs (i < j) whose tensors share at least one index.
  std::vector<std::pair<int, int>> sharing_pairs() const {
    std::vector<std::vector<int>> where(ref_.size());
    for (std::size_t p = 0; p < list_.size(); ++p) {
      for (int x : at(p)) where[x].push_back(static_cast<int>(p));
    }
    std::vector<std::pair<int, int>> pairs;
    for (const auto& ps : where) {
      for (std::size_t a = 0; a < ps.size(); ++a) {
        for (std::size_t b = a + 1; b < ps.size(); ++b) pairs.emplace_back(ps[a], ps[b]);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    return pairs;
  }

 private:
  std::vector<bool> open_;
  std::vector<int> ref_;
  std::vector<std::vector<int>> sets_;
  std::vector<int> list_;
};

std::vector<std::pair<int, int>> candidate_pairs(const Replay& r) {
  auto pairs = r.sharing_pairs();
  if (pairs.empty()) {
    for (int i = 0; i < static_cast<int>(r.size()); ++i) {
      for (int j = i + 1; j < static_cast<int>(r.size()); ++j) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

}  // namespace

ContractionOrder order_sequential(const TensorNetwork& net) {
  ContractionOrder order;
  // Each result is appended at the end, so folding left means pairing the
  // next unconsumed tensor (position 0) with the last entry.
  for (std::size_t len = net.tensors.size(); len > 1; --len) {
    order.pairs.emplace_back(0, order.pairs.empty() ? 1 : static_cast<int>(len) - 1);
  }
  return order;
}

ContractionOrder order_greedy(const TensorNetwork& net) {
  ContractionOrder order;
  Replay r(net);
  while (r.size() > 1) {
    std::tuple<std::size_t, double, int, int> best{std::numeric_limits<std::size_t>::max(), 0.0, 0, 0};
    for (auto [i, j] : candidate_pairs(r)) {
      const std::size_t rank = r.result_of(i, j).size();
      const double flops = 8.0 * std::ldexp(1.0, static_cast<int>(r.union_size(i, j)));
      best = std::min(best, std::tuple{rank, flops, i, j});
    }
    const int i = std::get<2>(best);
    const int j = std::get<3>(best);
    order.pairs.emplace_back(i, j);
    r.apply(i, j);
  }
  return order;
}

ContractionOrder order_random(const TensorNetwork& net, std::uint64_t seed) {
  ContractionOrder order;
  std::mt19937_64 rng(seed);
  Replay r(net);
  while (r.size() > 1) {
    const auto pairs = candidate_pairs(r);
    std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
    auto [i, j] = pairs[pick(rng)];
    if (rng() & 1) std::swap(i, j);
    order.pairs.emplace_back(i, j);
    r.apply(i, j);
  }
  return order;
}

void validate_order(const ContractionOrder& order, std::size_t tensor_count) {
  const std::size_t want = tensor_count > 0 ? tensor_count - 1 : 0;
  if (order.pairs.size() != want) {
    throw OrderError("order has " + std::to_string(order.pairs.size()) + " pairs, network needs " +
                     std::to_string(want));
  }
  std::size_t len = tensor_count;
  for (std::size_t k = 0; k < order.pairs.size(); ++k) {
    const auto [i, j] = order.pairs[k];
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= len || static_cast<std::size_t>(j) >= len || i == j) {
      throw OrderError("pair " + std::to_string(k) + " (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") is out of range for a list of " + std::to_string(len));
    }
    --len;
  }
}

ContractionOrder parse_order_json(const std::string& text, const TensorNetwork& net) {
  ContractionOrder order;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (!j.is_array()) throw OrderError("order file must hold a JSON array");
    for (const auto& p : j) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer()) {
        throw OrderError("every order entry must be a pair of integers");
      }
      order.pairs.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw OrderError(std::string("malformed order JSON: ") + e.what());
  }
  validate_order(order, net.tensors.size());
  return order;
}

ContractionOrder order_import(const std::string& path, const TensorNetwork& net) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open order file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_order_json(buf.str(), net);
}

double order_flops(const TensorNetwork& net, const ContractionOrder& order) {
  validate_order(order, net.tensors.size());
  Replay r(net);
  double total = 0.0;
  for (auto [i, j] : order.pairs) {
    total += 8.0 * std::ldexp(1.0, static_cast<int>(r.union_size(i, j)));
    r.apply(i, j);
  }
  return total;
}

int order_max_rank(const TensorNetwork& net, const ContractionOrder& order) {
  validate_order(order, net.tensors.size());
  Replay r(net);
  int worst = 0;
  for (const Tensor& t : net.tensors) worst = std::max(worst, t.rank());
  for (auto [i, j] : order.pairs) {
    worst = std::max(worst, static_cast<int>(r.result_of(i, j).size()));
    r.apply(i, j);
  }
  return worst;
}

}  // namespace tddsim
