#include <set>

#include "doctest.h"
#include "freeprob/ncpartition.hpp"

using namespace freeprob;

namespace {

// Independent crossing check: blocks a < b cross iff they interleave.
bool has_crossing(const Partition& p) {
  for (std::size_t a = 0; a < p.blocks.size(); ++a)
    for (std::size_t b = a + 1; b < p.blocks.size(); ++b)
      for (int x1 : p.blocks[a])
        for (int x2 : p.blocks[a])
          for (int y1 : p.blocks[b])
            for (int y2 : p.blocks[b])
              if (x1 < y1 && y1 < x2 && x2 < y2) return true;
  return false;
}

}  // namespace

TEST_CASE("catalan numbers") {
  const long want[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};
  for (int n = 0; n < 10; ++n) CHECK(catalan(n) == want[n]);
}

TEST_CASE("non-crossing partitions are counted by catalan numbers") {
  for (int ell = 1; ell <= 8; ++ell) {
    const auto& parts = nc_partitions(ell);
    CHECK(static_cast<long>(parts.size()) == catalan(ell));
    std::set<std::vector<std::vector<int>>> seen;
    for (const auto& p : parts) {
      CHECK_FALSE(has_crossing(p));
      seen.insert(p.blocks);
      // every element appears exactly once and block_of is consistent
      std::vector<int> count(ell, 0);
      for (std::size_t b = 0; b < p.blocks.size(); ++b)
        for (int x : p.blocks[b]) {
          ++count[x];
          CHECK(p.block_of[x] == static_cast<int>(b));
        }
      for (int c : count) CHECK(c == 1);
    }
    CHECK(seen.size() == parts.size());
  }
}

TEST_CASE("blocks are ordered by least element and sorted inside") {
  for (const auto& p : nc_partitions(6)) {
    for (std::size_t b = 1; b < p.blocks.size(); ++b)
      CHECK(p.blocks[b - 1][0] < p.blocks[b][0]);
    for (const auto& blk : p.blocks)
      for (std::size_t i = 1; i < blk.size(); ++i) CHECK(blk[i - 1] < blk[i]);
  }
}

TEST_CASE("order bound is enforced") {
  CHECK_THROWS((void)nc_partitions(13));
}
