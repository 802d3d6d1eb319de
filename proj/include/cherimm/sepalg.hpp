#pragma once

#include <optional>

#include "cherimm/heap.hpp"

namespace cherimm {

/// True iff the two heaps own disjoint block-id sets.
bool disjoint(const Heap& a, const Heap& b);

/// Disjoint union.  Defined only for disjoint heaps of the same capability
/// size; the composite allocation counter is the larger of the two.
std::optional<Heap> compose(const Heap& a, const Heap& b);

}  // namespace cherimm
