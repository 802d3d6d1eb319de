#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cherimm/capability.hpp"
#include "cherimm/error.hpp"
#include "cherimm/value.hpp"

namespace cherimm {

inline constexpr std::uint32_t kDefaultCapSize = 16;

/// One allocation: either already freed, or a pair of partial maps from
/// block-relative offsets to cells, and from capability-aligned offsets to
/// tag bits.  Absent cell entries are uninitialized memory.
struct BlockState {
  bool freed = false;
  std::map<std::uint64_t, MemCell> cells;
  std::map<std::uint64_t, bool> tags;

  static BlockState live() { return BlockState{}; }
  static BlockState freed_block() { return BlockState{true, {}, {}}; }

  bool operator==(const BlockState&) const = default;
};

/// The block-offset heap.  Heaps are values: copy freely, compare with ==.
/// Actions either mutate in place and return Succ, or fail before touching
/// anything.
class Heap {
 public:
  explicit Heap(std::uint32_t cap_size = kDefaultCapSize);
  Heap(std::uint32_t cap_size, std::map<std::int64_t, BlockState> blocks,
       std::int64_t next_block);

  std::uint32_t cap_size() const { return cap_size_; }
  const std::map<std::int64_t, BlockState>& blocks() const { return blocks_; }
  std::int64_t next_block() const { return next_block_; }
  const BlockState* find_block(std::int64_t id) const;

  /// Never fails: returns a fresh tagged capability with bounds [0, size)
  /// and all permissions over a brand-new uninitialized block.
  Result<Capability> alloc(std::uint64_t size);

  /// Marks the capability's block freed and hands back the capability with
  /// its tag invalidated.  Check order: cleared tag, offset outside
  /// [base, base+length], offset not at the allocation start, then the block
  /// itself (absent / already freed).
  Result<Capability> free(const Capability& c);

  /// Reads a value of type t at the capability's offset.  Capability-typed
  /// loads additionally require cap-size alignment, and only pick up the
  /// stored tag when the loading capability has the CAP_LOAD permission.
  /// Uninitialized or ill-shaped cell contents load as Undef.
  Result<CheriValue> load(const Capability& c, CheriType t) const;

  /// Writes a value at the capability's offset.  Byte-level writes clear
  /// every tag slot they overlap; capability writes require alignment and,
  /// when the value's tag is set, the CAP_STORE permission.
  Result<Unit> store(const Capability& c, const CheriValue& v);

  /// Copies n bytes from src to dst with snapshot (memmove) semantics.
  /// Tags transfer only for destination slots fully inside the window when
  /// the copy is phase-aligned and both sides carry the capability
  /// permissions; every other touched slot is invalidated.  n = 0 is a
  /// complete no-op, checks included.
  Result<Unit> memcpy(const Capability& dst, const Capability& src,
                      std::uint64_t n);

  /// Well-formedness: all tag keys of live blocks are cap-size aligned and
  /// the allocation counter exceeds every block id.
  bool wf() const;

  bool operator==(const Heap&) const = default;

 private:
  Result<Unit> store_checks(const Capability& c, const CheriValue& v,
                            std::uint64_t* size_out) const;
  void clear_overlapped_tags(BlockState& block, std::uint64_t begin,
                             std::uint64_t size);

  std::uint32_t cap_size_;
  std::map<std::int64_t, BlockState> blocks_;
  std::int64_t next_block_ = 0;
};

Heap empty_heap(std::uint32_t cap_size = kDefaultCapSize);

std::string to_string(const Heap& h);

}  // namespace cherimm
