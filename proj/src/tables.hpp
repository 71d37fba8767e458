#pragma once

// Dense table helpers. Every table in the library is stored row-major over
// its scope with the LAST scope variable fastest; these helpers are the one
// place that convention is spelled out.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "error.hpp"
#include "logsum.hpp"

namespace tcbo {

inline std::size_t table_size(const std::vector<int>& cards) {
  std::size_t n = 1;
  for (int c : cards) n *= static_cast<std::size_t>(c);
  return n;
}

// strides[k] = product of cards after position k (last variable fastest).
inline std::vector<std::size_t> table_strides(const std::vector<int>& cards) {
  std::vector<std::size_t> s(cards.size());
  std::size_t acc = 1;
  for (std::size_t k = cards.size(); k-- > 0;) {
    s[k] = acc;
    acc *= static_cast<std::size_t>(cards[k]);
  }
  return s;
}

// Iterates all joint states of `cards` in table order. `digits` holds the
// current state; returns false once the space is exhausted.
class Odometer {
 public:
  explicit Odometer(std::vector<int> cards)
      : cards_(std::move(cards)), digits_(cards_.size(), 0), done_(false) {
    for (int c : cards_)
      if (c <= 0) done_ = true;
  }
  bool done() const { return done_; }
  const std::vector<int>& digits() const { return digits_; }
  void advance() {
    for (std::size_t k = digits_.size(); k-- > 0;) {
      if (++digits_[k] < cards_[k]) return;
      digits_[k] = 0;
    }
    done_ = true;
  }

 private:
  std::vector<int> cards_;
  std::vector<int> digits_;
  bool done_;
};

// For each joint state of `outer` (scope + per-variable cards), the table
// index of its restriction to `inner`. Every inner variable must appear in
// outer. Used to project parent-region tables onto child scopes.
std::vector<std::uint32_t> restriction_map(const std::vector<int>& outer_scope,
                                           const std::vector<int>& outer_cards,
                                           const std::vector<int>& inner_scope,
                                           const std::vector<int>& inner_cards);

// Mode of every projection/bound in the library: marginalization either
// sums probability mass or maximizes it.
enum class Mode { sum, max };

// Log-domain projection of `table` (over the outer scope) onto the inner
// scope through `map` (from restriction_map): lse-groups in sum mode,
// max-groups in max mode. `out_size` is the inner table size.
std::vector<double> project_logtable(const std::vector<double>& table,
                                     const std::vector<std::uint32_t>& map,
                                     std::size_t out_size, Mode mode);

}  // namespace tcbo
