#pragma once

#include <cstdint>
#include <string_view>
#include <variant>

namespace cherimm {

/// Everything a failing memory action can report.  The first five are
/// capability-check faults (hardware exceptions); the rest are faults the
/// language runtime detects.
enum class MemErr : std::uint8_t {
  TagViolation,
  PermitLoadViolation,
  PermitStoreViolation,
  PermitStoreCapViolation,
  LengthViolation,
  UseAfterFree,
  MissingResource,
  Unaligned,
  InvalidFree,
  WrongArgType,
};

constexpr bool is_cap_error(MemErr e) {
  return e <= MemErr::LengthViolation;
}

constexpr bool is_logic_error(MemErr e) {
  return !is_cap_error(e);
}

constexpr std::string_view error_name(MemErr e) {
  switch (e) {
    case MemErr::TagViolation: return "TagViolation";
    case MemErr::PermitLoadViolation: return "PermitLoadViolation";
    case MemErr::PermitStoreViolation: return "PermitStoreViolation";
    case MemErr::PermitStoreCapViolation: return "PermitStoreCapViolation";
    case MemErr::LengthViolation: return "LengthViolation";
    case MemErr::UseAfterFree: return "UseAfterFree";
    case MemErr::MissingResource: return "MissingResource";
    case MemErr::Unaligned: return "Unaligned";
    case MemErr::InvalidFree: return "InvalidFree";
    case MemErr::WrongArgType: return "WrongArgType";
  }
  return "?";
}

struct Unit {
  bool operator==(const Unit&) const = default;
};

/// Success-or-error return of every memory action.  A failed result carries
/// no payload: operations that fail leave their heap untouched.
template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(MemErr err) : state_(err) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  const T& value() const& { return std::get<T>(state_); }
  T& value() & { return std::get<T>(state_); }
  T&& take() && { return std::get<T>(std::move(state_)); }
  MemErr error() const { return std::get<MemErr>(state_); }

  bool operator==(const Result& other) const = default;

 private:
  std::variant<T, MemErr> state_;
};

}  // namespace cherimm
