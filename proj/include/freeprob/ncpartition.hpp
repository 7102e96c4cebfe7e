#pragma once

#include <vector>

namespace freeprob {

// Partition of {0, ..., ell-1} into blocks, each block sorted ascending,
// blocks ordered by their least element.
struct Partition {
  std::vector<std::vector<int>> blocks;
  std::vector<int> block_of;
};

// All non-crossing partitions of {0, ..., ell-1}, memoized. Catalan(ell)
// entries; supported up to ell = 12.
const std::vector<Partition>& nc_partitions(int ell);

long catalan(int n);

}  // namespace freeprob
