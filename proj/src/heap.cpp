#include "cherimm/heap.hpp"

#include <cassert>
#include <optional>
#include <sstream>
#include <vector>

namespace cherimm {

Heap::Heap(std::uint32_t cap_size) : cap_size_(cap_size) {
  assert(cap_size == 16 || cap_size == 32);
}

Heap::Heap(std::uint32_t cap_size, std::map<std::int64_t, BlockState> blocks,
           std::int64_t next_block)
    : cap_size_(cap_size), blocks_(std::move(blocks)), next_block_(next_block) {
  assert(cap_size == 16 || cap_size == 32);
}

const BlockState* Heap::find_block(std::int64_t id) const {
  auto it = blocks_.find(id);
  return it == blocks_.end() ? nullptr : &it->second;
}

Heap empty_heap(std::uint32_t cap_size) { return Heap(cap_size); }

Result<Capability> Heap::alloc(std::uint64_t size) {
  const std::int64_t id = next_block_;
  blocks_.emplace(id, BlockState::live());
  ++next_block_;
  return Capability{MemCapability{id, 0, Metadata{0, size, PermSet::all()}}, true};
}

Result<Capability> Heap::free(const Capability& c) {
  if (!c.tag) return MemErr::TagViolation;
  // Bounds are inclusive at the top here: freeing checks the offset is
  // within the capability, not that a byte is accessible.
  const std::int64_t off = c.offset();
  const Metadata& m = c.meta();
  const bool below = off < 0 || static_cast<std::uint64_t>(off) < m.base;
  const bool above = off >= 0 && static_cast<std::uint64_t>(off) - m.base > m.length;
  if (below || above) return MemErr::LengthViolation;
  if (off != 0) return MemErr::InvalidFree;
  auto it = blocks_.find(c.block());
  if (it == blocks_.end()) return MemErr::MissingResource;
  if (it->second.freed) return MemErr::UseAfterFree;
  it->second = BlockState::freed_block();
  return tag_clear(c);
}

Result<CheriValue> Heap::load(const Capability& c, CheriType t) const {
  const std::uint64_t size = size_of(t, cap_size_);
  if (auto checked = check_access(c, AccessKind::Load, size,
                                  /*require_cap_align=*/t == CheriType::Cap,
                                  cap_size_);
      !checked) {
    return checked.error();
  }
  const BlockState* block = find_block(c.block());
  if (block == nullptr) return MemErr::MissingResource;
  if (block->freed) return MemErr::UseAfterFree;

  const std::uint64_t begin = static_cast<std::uint64_t>(c.offset());
  std::vector<MemCell> cells;
  cells.reserve(size);
  for (std::uint64_t i = 0; i < size; ++i) {
    auto it = block->cells.find(begin + i);
    if (it == block->cells.end()) return CheriValue{Undef{}};
    cells.push_back(it->second);
  }
  if (t == CheriType::Cap) {
    bool tag = false;
    if (has_perm(c, Perm::CapLoad)) {
      auto it = block->tags.find(begin);
      tag = it != block->tags.end() && it->second;
    }
    return reassemble_cap(cells, tag);
  }
  return decode_prim(t, cells);
}

Result<Unit> Heap::store_checks(const Capability& c, const CheriValue& v,
                                std::uint64_t* size_out) const {
  if (!c.tag) return MemErr::TagViolation;
  if (!has_perm(c, Perm::Store)) return MemErr::PermitStoreViolation;
  if (const auto* cv = std::get_if<CapValue>(&v)) {
    if (cv->cap.tag && !has_perm(c, Perm::CapStore)) {
      return MemErr::PermitStoreCapViolation;
    }
  }
  const auto t = type_of(v);
  if (!t.has_value()) return MemErr::WrongArgType;
  const std::uint64_t size = size_of(*t, cap_size_);
  if (!in_bounds(c, size)) return MemErr::LengthViolation;
  if (std::holds_alternative<CapValue>(v) && !cap_aligned(c, cap_size_)) {
    return MemErr::Unaligned;
  }
  *size_out = size;
  return Unit{};
}

void Heap::clear_overlapped_tags(BlockState& block, std::uint64_t begin,
                                 std::uint64_t size) {
  const std::uint64_t cs = cap_size_;
  const std::uint64_t first_slot = (begin / cs) * cs;
  for (std::uint64_t slot = first_slot; slot < begin + size; slot += cs) {
    block.tags[slot] = false;
  }
}

Result<Unit> Heap::store(const Capability& c, const CheriValue& v) {
  std::uint64_t size = 0;
  if (auto checked = store_checks(c, v, &size); !checked) return checked.error();
  auto it = blocks_.find(c.block());
  if (it == blocks_.end()) return MemErr::MissingResource;
  if (it->second.freed) return MemErr::UseAfterFree;

  BlockState& block = it->second;
  const std::uint64_t begin = static_cast<std::uint64_t>(c.offset());
  if (const auto* iv = std::get_if<IntValue>(&v)) {
    auto cells = encode_prim(*iv);
    for (std::uint64_t i = 0; i < size; ++i) block.cells[begin + i] = cells[i];
    clear_overlapped_tags(block, begin, size);
  } else if (const auto* fv = std::get_if<CapFragValue>(&v)) {
    // The fragment's own tag is stripped by construction: cells carry only
    // the memory capability.
    block.cells[begin] = CapFragCell{fv->cap.mcap, fv->index};
    clear_overlapped_tags(block, begin, 1);
  } else {
    const auto& cv = std::get<CapValue>(v);
    auto [cells, tag] = split_cap(cv, cap_size_);
    for (std::uint64_t i = 0; i < size; ++i) block.cells[begin + i] = cells[i];
    block.tags[begin] = tag;
  }
  return Unit{};
}

Result<Unit> Heap::memcpy(const Capability& dst, const Capability& src,
                          std::uint64_t n) {
  if (n == 0) return Unit{};
  if (auto checked = check_access(src, AccessKind::Load, n, false, cap_size_);
      !checked) {
    return checked.error();
  }
  if (auto checked = check_access(dst, AccessKind::Store, n, false, cap_size_);
      !checked) {
    return checked.error();
  }
  auto src_it = blocks_.find(src.block());
  if (src_it == blocks_.end()) return MemErr::MissingResource;
  if (src_it->second.freed) return MemErr::UseAfterFree;
  auto dst_it = blocks_.find(dst.block());
  if (dst_it == blocks_.end()) return MemErr::MissingResource;
  if (dst_it->second.freed) return MemErr::UseAfterFree;

  const std::uint64_t s = static_cast<std::uint64_t>(src.offset());
  const std::uint64_t d = static_cast<std::uint64_t>(dst.offset());

  // Snapshot the source window first: src and dst may overlap.
  std::vector<std::optional<MemCell>> window(n);
  const BlockState& src_block = src_it->second;
  for (std::uint64_t k = 0; k < n; ++k) {
    auto it = src_block.cells.find(s + k);
    if (it != src_block.cells.end()) window[k] = it->second;
  }
  const std::map<std::uint64_t, bool> src_tags = src_block.tags;

  BlockState& dst_block = dst_it->second;
  for (std::uint64_t k = 0; k < n; ++k) {
    if (window[k].has_value()) {
      dst_block.cells[d + k] = *window[k];
    } else {
      dst_block.cells.erase(d + k);
    }
  }

  const std::uint64_t cs = cap_size_;
  const bool phase_aligned = (s % cs) == (d % cs);
  const bool tags_transfer = phase_aligned && has_perm(src, Perm::CapLoad) &&
                             has_perm(dst, Perm::CapStore);
  const std::uint64_t first_slot = (d / cs) * cs;
  for (std::uint64_t slot = first_slot; slot < d + n; slot += cs) {
    const bool fully_covered = slot >= d && slot + cs <= d + n;
    if (fully_covered && tags_transfer) {
      auto it = src_tags.find(slot - d + s);
      dst_block.tags[slot] = it != src_tags.end() && it->second;
    } else {
      dst_block.tags[slot] = false;
    }
  }
  return Unit{};
}

bool Heap::wf() const {
  for (const auto& [id, block] : blocks_) {
    if (id >= next_block_) return false;
    if (block.freed) continue;
    for (const auto& [key, tag] : block.tags) {
      if (key % cap_size_ != 0) return false;
    }
  }
  return true;
}

std::string to_string(const Heap& h) {
  std::ostringstream os;
  os << "heap{cap_size=" << h.cap_size() << ", next=" << h.next_block();
  for (const auto& [id, block] : h.blocks()) {
    os << ", " << id << (block.freed ? "->freed" : "->live(")
       << (block.freed ? "" : std::to_string(block.cells.size()) + " cells)");
  }
  os << "}";
  return os.str();
}

}  // namespace cherimm
