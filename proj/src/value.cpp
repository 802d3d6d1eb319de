#include "cherimm/value.hpp"

#include <cassert>
#include <sstream>

namespace cherimm {

std::uint64_t size_of(CheriType t, std::uint32_t cap_size) {
  assert(cap_size == 16 || cap_size == 32);
  switch (t) {
    case CheriType::U8:
    case CheriType::S8:
      return 1;
    case CheriType::U16:
    case CheriType::S16:
      return 2;
    case CheriType::U32:
    case CheriType::S32:
      return 4;
    case CheriType::U64:
    case CheriType::S64:
      return 8;
    case CheriType::Cap:
      return cap_size;
  }
  return 0;
}

std::string_view type_name(CheriType t) {
  switch (t) {
    case CheriType::U8: return "u8";
    case CheriType::S8: return "s8";
    case CheriType::U16: return "u16";
    case CheriType::S16: return "s16";
    case CheriType::U32: return "u32";
    case CheriType::S32: return "s32";
    case CheriType::U64: return "u64";
    case CheriType::S64: return "s64";
    case CheriType::Cap: return "cap";
  }
  return "?";
}

std::optional<CheriType> type_from_name(std::string_view name) {
  for (CheriType t : {CheriType::U8, CheriType::S8, CheriType::U16, CheriType::S16,
                      CheriType::U32, CheriType::S32, CheriType::U64, CheriType::S64,
                      CheriType::Cap}) {
    if (type_name(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

std::uint64_t width_mask(CheriType t) {
  switch (size_of(t, 16)) {
    case 1: return 0xffu;
    case 2: return 0xffffu;
    case 4: return 0xffffffffu;
    default: return ~std::uint64_t{0};
  }
}

}  // namespace

IntValue make_int(CheriType t, std::uint64_t bits) {
  assert(t != CheriType::Cap);
  return IntValue{t, bits & width_mask(t)};
}

std::int64_t int_value_as_i64(const IntValue& v) {
  if (!is_signed_type(v.type)) return static_cast<std::int64_t>(v.bits);
  const std::uint64_t width = size_of(v.type, 16) * 8;
  if (width == 64) return static_cast<std::int64_t>(v.bits);
  const std::uint64_t sign_bit = std::uint64_t{1} << (width - 1);
  if (v.bits & sign_bit) {
    return static_cast<std::int64_t>(v.bits | ~width_mask(v.type));
  }
  return static_cast<std::int64_t>(v.bits);
}

std::optional<CheriType> type_of(const CheriValue& v) {
  if (std::holds_alternative<IntValue>(v)) return std::get<IntValue>(v).type;
  if (std::holds_alternative<CapValue>(v)) return CheriType::Cap;
  if (std::holds_alternative<CapFragValue>(v)) return CheriType::U8;
  return std::nullopt;
}

std::vector<MemCell> encode_prim(const IntValue& v) {
  const std::uint64_t n = size_of(v.type, 16);
  std::vector<MemCell> cells;
  cells.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    cells.push_back(ByteCell{static_cast<std::uint8_t>(v.bits >> (8 * i))});
  }
  return cells;
}

CheriValue decode_prim(CheriType t, std::span<const MemCell> cells) {
  assert(t != CheriType::Cap);
  assert(cells.size() == size_of(t, 16));
  if (cells.size() == 1 && std::holds_alternative<CapFragCell>(cells[0])) {
    const auto& frag = std::get<CapFragCell>(cells[0]);
    return CapFragValue{Capability{frag.mcap, false}, frag.index};
  }
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (!std::holds_alternative<ByteCell>(cells[i])) return Undef{};
    bits |= std::uint64_t{std::get<ByteCell>(cells[i]).value} << (8 * i);
  }
  return IntValue{t, bits};
}

std::pair<std::vector<MemCell>, bool> split_cap(const CapValue& v,
                                                std::uint32_t cap_size) {
  std::vector<MemCell> cells;
  cells.reserve(cap_size);
  for (std::uint32_t k = 0; k < cap_size; ++k) {
    cells.push_back(CapFragCell{v.cap.mcap, k});
  }
  return {std::move(cells), v.cap.tag};
}

CheriValue reassemble_cap(std::span<const MemCell> cells, bool tag) {
  if (cells.empty()) return Undef{};
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!std::holds_alternative<CapFragCell>(cells[k])) return Undef{};
    const auto& frag = std::get<CapFragCell>(cells[k]);
    if (frag.index != k) return Undef{};
    if (frag.mcap != std::get<CapFragCell>(cells[0]).mcap) return Undef{};
  }
  return CapValue{Capability{std::get<CapFragCell>(cells[0]).mcap, tag}};
}

std::string to_string(const CheriValue& v) {
  std::ostringstream os;
  if (const auto* i = std::get_if<IntValue>(&v)) {
    os << type_name(i->type) << ":" << i->bits;
  } else if (const auto* c = std::get_if<CapValue>(&v)) {
    os << to_string(c->cap);
  } else if (const auto* f = std::get_if<CapFragValue>(&v)) {
    os << "frag[" << f->index << "] of " << to_string(f->cap);
  } else {
    os << "undef";
  }
  return os.str();
}

}  // namespace cherimm
