#include "cherimm/sepalg.hpp"

#include <algorithm>

namespace cherimm {

bool disjoint(const Heap& a, const Heap& b) {
  const auto& small = a.blocks().size() <= b.blocks().size() ? a : b;
  const auto& large = a.blocks().size() <= b.blocks().size() ? b : a;
  for (const auto& [id, block] : small.blocks()) {
    if (large.blocks().count(id) != 0) return false;
  }
  return true;
}

std::optional<Heap> compose(const Heap& a, const Heap& b) {
  if (a.cap_size() != b.cap_size()) return std::nullopt;
  if (!disjoint(a, b)) return std::nullopt;
  std::map<std::int64_t, BlockState> blocks = a.blocks();
  blocks.insert(b.blocks().begin(), b.blocks().end());
  return Heap(a.cap_size(), std::move(blocks),
              std::max(a.next_block(), b.next_block()));
}

}  // namespace cherimm
