#pragma once

#include <numeric>
#include <string>
#include <vector>

namespace pwalk {

using MultiIndex = std::vector<int>;

inline int order(const MultiIndex& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

/// All multi-indices of length `dim` with |alpha| == degree, in lexicographically descending order.
inline std::vector<MultiIndex> multi_indices_of_degree(int dim, int degree) {
  std::vector<MultiIndex> out;
  MultiIndex cur(static_cast<std::size_t>(dim), 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.push_back(cur);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      cur[static_cast<std::size_t>(pos)] = k;
      self(self, pos + 1, remaining - k);
    }
  };
  if (dim > 0 && degree >= 0) rec(rec, 0, degree);
  return out;
}

inline std::string to_string(const MultiIndex& alpha) {
  std::string s = "(";
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(alpha[i]);
  }
  return s + ")";
}

}  // namespace pwalk
