#include "cherimm/capability.hpp"

#include <sstream>

namespace cherimm {

Capability null_cap() {
  return Capability{MemCapability{0, 0, Metadata{0, 0, PermSet::none()}}, false};
}

Capability cap_arith(Capability c, std::int64_t delta) {
  // Wrapping two's-complement addition; abstract capabilities have no
  // representable-range limit, so the tag survives.
  c.mcap.offset = static_cast<std::int64_t>(
      static_cast<std::uint64_t>(c.mcap.offset) + static_cast<std::uint64_t>(delta));
  return c;
}

bool tag_get(const Capability& c) { return c.tag; }

Capability tag_clear(Capability c) {
  c.tag = false;
  return c;
}

Capability perms_and(Capability c, PermSet mask) {
  c.mcap.meta.perms = c.mcap.meta.perms & mask;
  return c;
}

Result<Capability> bounds_set(Capability c, std::uint64_t new_base,
                              std::uint64_t new_length) {
  const Metadata& m = c.mcap.meta;
  // [new_base, new_base + new_length) must be contained in the current
  // range; the empty range is contained anywhere.  Comparisons are arranged
  // so that nothing overflows.
  if (new_length != 0) {
    if (new_base < m.base || new_length > m.length ||
        new_base - m.base > m.length - new_length) {
      return MemErr::LengthViolation;
    }
  }
  c.mcap.meta.base = new_base;
  c.mcap.meta.length = new_length;
  return c;
}

CapQuery cap_query(const Capability& c) {
  return CapQuery{c.offset(), c.meta().base, c.meta().length, c.perms(), c.tag};
}

bool has_perm(const Capability& c, Perm p) { return c.perms().contains(p); }

bool in_bounds(const Capability& c, std::uint64_t size) {
  const std::int64_t off = c.offset();
  const Metadata& m = c.meta();
  if (off < 0) return false;
  const std::uint64_t uoff = static_cast<std::uint64_t>(off);
  if (uoff < m.base) return false;
  if (size > m.length) return false;
  return uoff - m.base <= m.length - size;
}

bool cap_aligned(const Capability& c, std::uint32_t cap_size) {
  const std::int64_t off = c.offset();
  const std::int64_t cs = static_cast<std::int64_t>(cap_size);
  return ((off % cs) + cs) % cs == 0;
}

Result<Unit> check_access(const Capability& c, AccessKind kind,
                          std::uint64_t size, bool require_cap_align,
                          std::uint32_t cap_size) {
  if (!c.tag) return MemErr::TagViolation;
  if (kind == AccessKind::Load) {
    if (!has_perm(c, Perm::Load)) return MemErr::PermitLoadViolation;
  } else {
    if (!has_perm(c, Perm::Store)) return MemErr::PermitStoreViolation;
  }
  if (!in_bounds(c, size)) return MemErr::LengthViolation;
  if (require_cap_align && !cap_aligned(c, cap_size)) return MemErr::Unaligned;
  return Unit{};
}

std::string to_string(const Capability& c) {
  std::ostringstream os;
  os << "cap{block=" << c.block() << ", offset=" << c.offset()
     << ", base=" << c.meta().base << ", length=" << c.meta().length
     << ", perms=0x" << std::hex << static_cast<int>(c.perms().raw()) << std::dec
     << ", tag=" << (c.tag ? "1" : "0") << "}";
  return os.str();
}

}  // namespace cherimm
