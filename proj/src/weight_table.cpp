#include "tddsim/weight_table.hpp"

#include <cmath>

namespace tddsim {

namespace {

// Beyond this magnitude cell numbers would overflow; such weights never
// occur after normalisation, so they pass through unchanged.
constexpr double kMaxInterned = 1e6;

std::uint64_t mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

}  // namespace

WeightTable::WeightTable(double tol) : tol_(tol), heads_(1 << 12, -1) {
  intern(Complex{0.0, 0.0});
  intern(Complex{1.0, 0.0});
}

std::size_t WeightTable::slot(std::int64_t cre, std::int64_t cim) const {
  const std::uint64_t h = mix(static_cast<std::uint64_t>(cre) * 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(cim));
  return static_cast<std::size_t>(h & (heads_.size() - 1));
}

void WeightTable::grow() {
  heads_.assign(heads_.size() * 2, -1);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const std::size_t s = slot(entries_[k].cre, entries_[k].cim);
    entries_[k].next = heads_[s];
    heads_[s] = static_cast<std::int32_t>(k);
  }
}

Complex WeightTable::intern(Complex v) {
  double re = v.real();
  double im = v.imag();
  if (std::abs(re) > kMaxInterned || std::abs(im) > kMaxInterned || !std::isfinite(re) || !std::isfinite(im)) {
    return v;
  }
  if (std::abs(re) < tol_) re = 0.0;
  if (std::abs(im) < tol_) im = 0.0;
  const auto cre = static_cast<std::int64_t>(std::floor(re / tol_));
  const auto cim = static_cast<std::int64_t>(std::floor(im / tol_));

  std::int32_t best = -1;
  for (std::int64_t dr = -1; dr <= 1; ++dr) {
    for (std::int64_t di = -1; di <= 1; ++di) {
      for (std::int32_t k = heads_[slot(cre + dr, cim + di)]; k >= 0; k = entries_[k].next) {
        const Entry& e = entries_[k];
        if (e.cre != cre + dr || e.cim != cim + di) continue;
        if (std::abs(e.value.real() - re) <= tol_ && std::abs(e.value.imag() - im) <= tol_) {
          if (best < 0 || k < best) best = k;
        }
      }
    }
  }
  if (best >= 0) return entries_[best].value;

  if (entries_.size() >= heads_.size()) grow();
  const std::size_t s = slot(cre, cim);
  entries_.push_back({Complex{re, im}, cre, cim, heads_[s]});
  heads_[s] = static_cast<std::int32_t>(entries_.size() - 1);
  return Complex{re, im};
}

}  // namespace tddsim
