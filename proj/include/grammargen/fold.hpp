#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grammargen/rna.hpp"

namespace grammargen {

/// Maximum base-pair folding. best(i,j) is the largest number of
/// non-crossing complementary pairs inside [i,j] with every pair spanning
/// more than `min_loop`:
///   best(i,j) = max(best(i,j-1), max_k best(i,k-1) + 1 + best(k+1,j-1))
/// over i <= k < j - min_loop with (k,j) complementary.
/// Traceback pairs j with the smallest optimal k and only leaves j unpaired
/// when no pairing reaches the optimum.
inline RnaStructure nussinov_fold(std::string_view sequence, const RnaRules& rules = {}) {
  validate_sequence(sequence);
  const std::size_t n = sequence.size();
  if (n == 0) throw Error(ErrorKind::invalid_argument, "cannot fold an empty sequence");

  // best[i][j] for j >= i; empty intervals read as 0 through at().
  std::vector<std::vector<int>> best(n, std::vector<int>(n, 0));
  auto at = [&](std::size_t i, std::size_t j) -> int {
    if (i >= n || j >= n || i > j) return 0;
    return best[i][j];
  };
  auto can_pair = [&](std::size_t k, std::size_t j) {
    return j > k + rules.min_loop && complementary(sequence[k], sequence[j], rules.allow_wobble);
  };

  for (std::size_t span = 1; span < n; ++span) {
    for (std::size_t i = 0; i + span < n; ++i) {
      const std::size_t j = i + span;
      int value = at(i, j - 1);
      for (std::size_t k = i; k < j; ++k) {
        if (!can_pair(k, j)) continue;
        const int left = k == 0 ? 0 : at(i, k - 1);
        value = std::max(value, left + 1 + at(k + 1, j - 1));
      }
      best[i][j] = value;
    }
  }

  RnaStructure out;
  out.sequence.assign(sequence);
  std::vector<std::pair<std::size_t, std::size_t>> work{{0, n - 1}};
  while (!work.empty()) {
    auto [i, j] = work.back();
    work.pop_back();
    if (i >= j || at(i, j) == 0) continue;
    bool paired = false;
    for (std::size_t k = i; k < j; ++k) {
      if (!can_pair(k, j)) continue;
      const int left = k == 0 ? 0 : at(i, k - 1);
      if (left + 1 + at(k + 1, j - 1) == best[i][j]) {
        out.pairs.push_back({k, j});
        if (k > i) work.emplace_back(i, k - 1);
        work.emplace_back(k + 1, j - 1);
        paired = true;
        break;
      }
    }
    if (!paired) work.emplace_back(i, j - 1);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

}  // namespace grammargen
