#pragma once

#include <cstdint>
#include <vector>

#include "tddsim/gate.hpp"

namespace tddsim {

/// Interns complex weights so that values within `tol` (componentwise) of an
/// earlier value are replaced by that earlier value. Afterwards equality and
/// hashing can be exact on the returned representatives.
///
/// Values are bucketed into cells of width `tol`; a lookup probes the 3x3
/// neighbourhood and, when several candidates qualify, returns the oldest.
/// Because new entries are always younger, a value keeps mapping to the same
/// representative for the lifetime of the table.
class WeightTable {
 public:
  explicit WeightTable(double tol = 1e-12);

  Complex intern(Complex v);

  double tolerance() const { return tol_; }
  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    Complex value;
    std::int64_t cre;
    std::int64_t cim;
    std::int32_t next;
  };

  std::size_t slot(std::int64_t cre, std::int64_t cim) const;
  void grow();

  double tol_;
  std::vector<Entry> entries_;
  std::vector<std::int32_t> heads_;
};

}  // namespace tddsim
