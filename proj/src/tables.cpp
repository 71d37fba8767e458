#include "tables.hpp"

#include <cmath>

namespace tcbo {

std::vector<std::uint32_t> restriction_map(const std::vector<int>& outer_scope,
                                           const std::vector<int>& outer_cards,
                                           const std::vector<int>& inner_scope,
                                           const std::vector<int>& inner_cards) {
  // Position of each inner variable inside the outer scope.
  std::vector<std::size_t> pos(inner_scope.size());
  for (std::size_t i = 0; i < inner_scope.size(); ++i) {
    std::size_t p = outer_scope.size();
    for (std::size_t k = 0; k < outer_scope.size(); ++k)
      if (outer_scope[k] == inner_scope[i]) p = k;
    if (p == outer_scope.size())
      fail(ErrorKind::invalid_argument,
           "restriction_map: inner scope variable not contained in outer scope");
    pos[i] = p;
  }
  const auto inner_strides = table_strides(inner_cards);
  std::vector<std::uint32_t> map(table_size(outer_cards));
  Odometer od(outer_cards);
  for (std::size_t idx = 0; !od.done(); od.advance(), ++idx) {
    std::size_t inner_idx = 0;
    for (std::size_t i = 0; i < inner_scope.size(); ++i)
      inner_idx += inner_strides[i] * static_cast<std::size_t>(od.digits()[pos[i]]);
    map[idx] = static_cast<std::uint32_t>(inner_idx);
  }
  return map;
}

std::vector<double> project_logtable(const std::vector<double>& table,
                                     const std::vector<std::uint32_t>& map,
                                     std::size_t out_size, Mode mode) {
  std::vector<double> mx(out_size, kNegInf);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::uint32_t t = map[i];
    if (table[i] > mx[t]) mx[t] = table[i];
  }
  if (mode == Mode::max) return mx;
  std::vector<double> acc(out_size, 0.0);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const std::uint32_t t = map[i];
    if (mx[t] != kNegInf) acc[t] += std::exp(table[i] - mx[t]);
  }
  std::vector<double> out(out_size);
  for (std::size_t t = 0; t < out_size; ++t)
    out[t] = (mx[t] == kNegInf) ? kNegInf : mx[t] + std::log(acc[t]);
  return out;
}

}  // namespace tcbo
