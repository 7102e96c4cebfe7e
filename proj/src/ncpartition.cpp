#include "freeprob/ncpartition.hpp"

#include <functional>
#include <mutex>
#include <stdexcept>

namespace freeprob {

long catalan(int n) {
  long c = 1;
  for (int i = 0; i < n; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

namespace {

void finalize(Partition& p, int ell) {
  p.block_of.assign(ell, -1);
  for (int b = 0; b < static_cast<int>(p.blocks.size()); ++b)
    for (int pos : p.blocks[b]) p.block_of[pos] = b;
}

// Recursive first-block decomposition: the block containing 0 splits the
// rest into independent gaps, each filled by a smaller non-crossing
// partition. Gap contents shift into place.
std::vector<Partition> build(int ell, const std::vector<std::vector<Partition>>& smaller) {
  std::vector<Partition> out;
  if (ell == 0) {
    out.emplace_back();
    return out;
  }
  std::vector<int> V{0};
  std::function<void(int)> place = [&](int next) {
    // V is complete; gaps are the open runs between and after its elements.
    std::vector<std::pair<int, int>> gaps;  // (start, length)
    for (size_t i = 0; i + 1 < V.size(); ++i)
      gaps.emplace_back(V[i] + 1, V[i + 1] - V[i] - 1);
    gaps.emplace_back(V.back() + 1, ell - 1 - V.back());

    std::vector<const Partition*> pick(gaps.size());
    std::function<void(size_t)> fill = [&](size_t g) {
      if (g == gaps.size()) {
        Partition p;
        p.blocks.push_back(V);
        for (size_t i = 0; i < gaps.size(); ++i)
          for (const auto& blk : pick[i]->blocks) {
            std::vector<int> shifted;
            shifted.reserve(blk.size());
            for (int pos : blk) shifted.push_back(pos + gaps[i].first);
            p.blocks.push_back(std::move(shifted));
          }
        std::sort(p.blocks.begin(), p.blocks.end());
        finalize(p, ell);
        out.push_back(std::move(p));
        return;
      }
      for (const auto& sub : smaller[gaps[g].second]) {
        pick[g] = &sub;
        fill(g + 1);
      }
    };
    fill(0);

    for (int v = next; v < ell; ++v) {
      V.push_back(v);
      place(v + 1);
      V.pop_back();
    }
  };
  place(1);
  return out;
}

}  // namespace

const std::vector<Partition>& nc_partitions(int ell) {
  if (ell < 0 || ell > 12) throw std::out_of_range("nc_partitions supports 0 <= ell <= 12");
  static std::mutex mu;
  static std::vector<std::vector<Partition>> cache;
  std::lock_guard<std::mutex> lock(mu);
  while (static_cast<int>(cache.size()) <= ell)
    cache.push_back(build(static_cast<int>(cache.size()), cache));
  return cache[ell];
}

}  // namespace freeprob
