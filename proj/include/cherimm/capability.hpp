#pragma once

#include <cstdint>
#include <string>

#include "cherimm/error.hpp"

namespace cherimm {

/// The four access rights a capability can hold.  CAP_LOAD / CAP_STORE gate
/// whether tags flow through loads and stores of capability-sized values.
enum class Perm : std::uint8_t {
  Load = 1u << 0,
  Store = 1u << 1,
  CapLoad = 1u << 2,
  CapStore = 1u << 3,
};

/// A subset of the four-permission universe.
class PermSet {
 public:
  constexpr PermSet() = default;

  static constexpr PermSet all() { return PermSet(0b1111); }
  static constexpr PermSet none() { return PermSet(0); }
  static constexpr PermSet of(Perm p) { return PermSet(static_cast<std::uint8_t>(p)); }
  static constexpr PermSet from_raw(std::uint8_t bits) { return PermSet(bits & 0b1111); }

  constexpr bool contains(Perm p) const {
    return (bits_ & static_cast<std::uint8_t>(p)) != 0;
  }
  constexpr bool is_subset_of(PermSet other) const {
    return (bits_ & ~other.bits_) == 0;
  }
  constexpr PermSet operator&(PermSet other) const { return PermSet(bits_ & other.bits_); }
  constexpr PermSet operator|(PermSet other) const { return PermSet(bits_ | other.bits_); }
  constexpr PermSet without(Perm p) const {
    return PermSet(bits_ & ~static_cast<std::uint8_t>(p));
  }
  constexpr std::uint8_t raw() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }

  bool operator==(const PermSet&) const = default;

 private:
  constexpr explicit PermSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

/// Bounds and permissions.  base and base + length are block-relative byte
/// addresses; base + length never overflows 64 bits.
struct Metadata {
  std::uint64_t base = 0;
  std::uint64_t length = 0;
  PermSet perms;

  bool operator==(const Metadata&) const = default;
};

/// A capability as it sits in memory, without its tag bit.  The offset is a
/// signed integer: out-of-bounds addresses, including negative ones, are
/// representable and only rejected when dereferenced.
struct MemCapability {
  std::int64_t block = 0;
  std::int64_t offset = 0;
  Metadata meta;

  bool operator==(const MemCapability&) const = default;
};

/// A memory capability plus its out-of-band validity tag.
struct Capability {
  MemCapability mcap;
  bool tag = false;

  std::int64_t block() const { return mcap.block; }
  std::int64_t offset() const { return mcap.offset; }
  const Metadata& meta() const { return mcap.meta; }
  PermSet perms() const { return mcap.meta.perms; }

  bool operator==(const Capability&) const = default;
};

/// Tag invalid, bounds empty, no permissions, block 0, offset 0.
Capability null_cap();

/// Offset arithmetic; every other field, including the tag, is untouched.
Capability cap_arith(Capability c, std::int64_t delta);

bool tag_get(const Capability& c);
Capability tag_clear(Capability c);

/// Intersects the permission set with a mask.  Cannot grant anything.
Capability perms_and(Capability c, PermSet mask);

/// Narrows bounds to [new_base, new_base + new_length).  Fails with
/// LengthViolation unless the requested range is a sub-range of the current
/// one.  Offset, permissions and tag are untouched.
Result<Capability> bounds_set(Capability c, std::uint64_t new_base,
                              std::uint64_t new_length);

/// Read-only projection of the capability fields.
struct CapQuery {
  std::int64_t address = 0;
  std::uint64_t base = 0;
  std::uint64_t length = 0;
  PermSet perms;
  bool tag = false;

  bool operator==(const CapQuery&) const = default;
};

CapQuery cap_query(const Capability& c);

enum class AccessKind { Load, Store };

/// Individual check predicates, exposed so actions with interleaved extra
/// checks (store's capability-store permission) can keep the fixed order.
bool has_perm(const Capability& c, Perm p);
bool in_bounds(const Capability& c, std::uint64_t size);
bool cap_aligned(const Capability& c, std::uint32_t cap_size);

/// The hardware check sequence shared by load- and store-style accesses.
/// Checks run in a fixed order and the first failure wins:
///   1. cleared tag            -> TagViolation
///   2. missing permission     -> PermitLoadViolation / PermitStoreViolation
///   3. window outside bounds  -> LengthViolation
///   4. misaligned (optional)  -> Unaligned
Result<Unit> check_access(const Capability& c, AccessKind kind,
                          std::uint64_t size, bool require_cap_align,
                          std::uint32_t cap_size);

std::string to_string(const Capability& c);

}  // namespace cherimm
