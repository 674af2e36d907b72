#pragma once

// Breadth-first search for a derivation of the empty word using free
// reduction and relator rewriting: a subword equal to a prefix of a relator
// may be replaced by the inverse of the matching suffix. Independent of the
// normal-form machinery; only usable for short words.

#include <deque>
#include <set>
#include <vector>

#include "vnlab/square_group.hpp"

namespace oracle {

using Word = std::vector<vnlab::square::GeneratorSymbol>;

inline bool bfs_trivial(const Word& start, const std::vector<vnlab::square::Quadruple>& relators,
                        int max_depth, std::size_t max_len) {
  const Word w0 = vnlab::square::free_reduce(start);
  if (w0.empty()) return true;
  std::set<Word> seen{w0};
  std::deque<std::pair<Word, int>> queue{{w0, 0}};
  while (!queue.empty()) {
    auto [w, depth] = queue.front();
    queue.pop_front();
    if (depth == max_depth) continue;
    for (std::size_t i = 0; i < w.size(); ++i) {
      for (const auto& q : relators) {
        for (std::size_t k = 1; k <= 4 && i + k <= w.size(); ++k) {
          if (w[i + k - 1] != q[k - 1]) break;
          // q[0..k) = (q[k..4))^{-1}
          Word next(w.begin(), w.begin() + i);
          for (std::size_t t = 4; t > k; --t) next.push_back(q[t - 1].inverse());
          next.insert(next.end(), w.begin() + i + k, w.end());
          next = vnlab::square::free_reduce(next);
          if (next.empty()) return true;
          if (next.size() > max_len) continue;
          if (seen.insert(next).second) queue.emplace_back(std::move(next), depth + 1);
        }
      }
    }
  }
  return false;
}

}  // namespace oracle
