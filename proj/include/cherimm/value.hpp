#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cherimm/capability.hpp"

namespace cherimm {

/// Language-level types.  Cap is sized by the configured capability width
/// (16 or 32 bytes); everything else is a fixed-width integer.
enum class CheriType : std::uint8_t { U8, S8, U16, S16, U32, S32, U64, S64, Cap };

constexpr bool is_signed_type(CheriType t) {
  return t == CheriType::S8 || t == CheriType::S16 || t == CheriType::S32 ||
         t == CheriType::S64;
}

/// Size in bytes; cap_size must be 16 or 32.
std::uint64_t size_of(CheriType t, std::uint32_t cap_size);

std::string_view type_name(CheriType t);
std::optional<CheriType> type_from_name(std::string_view name);

/// A sized integer value.  bits always fits the declared width; signed
/// variants read the same bits as two's complement.
struct IntValue {
  CheriType type = CheriType::U8;
  std::uint64_t bits = 0;

  bool operator==(const IntValue&) const = default;
};

/// Constructs an IntValue, truncating bits to the type's width.
IntValue make_int(CheriType t, std::uint64_t bits);

/// Reads an IntValue as a 64-bit integer: sign-extended for signed types,
/// zero-extended otherwise.
std::int64_t int_value_as_i64(const IntValue& v);

struct CapValue {
  Capability cap;

  bool operator==(const CapValue&) const = default;
};

/// The index-th byte of a capability.  Byte-sized; loads may type it as
/// either u8 or s8.
struct CapFragValue {
  Capability cap;
  std::uint32_t index = 0;

  bool operator==(const CapFragValue&) const = default;
};

struct Undef {
  bool operator==(const Undef&) const = default;
};

using CheriValue = std::variant<IntValue, CapValue, CapFragValue, Undef>;

/// Memory-level cells: a raw byte, or one byte-slice of a memory capability.
struct ByteCell {
  std::uint8_t value = 0;

  bool operator==(const ByteCell&) const = default;
};

struct CapFragCell {
  MemCapability mcap;
  std::uint32_t index = 0;

  bool operator==(const CapFragCell&) const = default;
};

using MemCell = std::variant<ByteCell, CapFragCell>;

/// Undef has no type; fragments canonically answer U8.
std::optional<CheriType> type_of(const CheriValue& v);

/// Little-endian byte serialization of an integer value.
std::vector<MemCell> encode_prim(const IntValue& v);

/// Inverse of encode_prim over Byte cells; a lone fragment cell decodes to a
/// CapFragValue when a byte-sized type was requested, anything else is Undef.
/// cells.size() must equal size_of(t, ...); t must not be Cap.
CheriValue decode_prim(CheriType t, std::span<const MemCell> cells);

/// Splits a capability value into cap_size in-order fragments plus its tag.
std::pair<std::vector<MemCell>, bool> split_cap(const CapValue& v,
                                                std::uint32_t cap_size);

/// Rebuilds a capability from cells.  All cells must be fragments of one
/// shared memory capability with indices exactly 0..n-1 in order; any other
/// arrangement yields Undef.
CheriValue reassemble_cap(std::span<const MemCell> cells, bool tag);

std::string to_string(const CheriValue& v);

}  // namespace cherimm
