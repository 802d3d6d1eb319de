#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "cherimm/value.hpp"

namespace cherimm {

enum class BinOp : std::uint8_t { Add, Sub, Mul, Eq, Lt, Le };

struct Expr;

struct IntLit {
  std::int64_t value = 0;
};
struct VarRef {
  std::string name;
};
struct BinExpr {
  BinOp op = BinOp::Add;
  std::shared_ptr<const Expr> lhs;
  std::shared_ptr<const Expr> rhs;
};

/// Expressions: integer literals, variables, and binary operators.
/// Arithmetic is untyped 64-bit; + and - also accept a capability on one
/// side and an integer on the other.
struct Expr {
  std::variant<IntLit, VarRef, BinExpr> node;
};

enum class Intrinsic : std::uint8_t {
  TagGet,
  TagClear,
  PermsAnd,
  BoundsSet,
  AddressGet,
  BaseGet,
  LengthGet,
};

std::string_view intrinsic_name(Intrinsic i);

struct AssignInstr {
  std::string var;
  Expr value;
};
struct AllocInstr {
  std::string var;
  Expr size;
};
struct FreeInstr {
  std::string var;
  Expr cap;
};
struct LoadInstr {
  std::string var;
  CheriType type = CheriType::U8;
  Expr addr;
};
struct StoreInstr {
  CheriType type = CheriType::U8;
  Expr addr;
  Expr value;
};
struct MemcpyInstr {
  Expr dst;
  Expr src;
  Expr count;
};
struct IntrinsicInstr {
  std::string var;
  Intrinsic which = Intrinsic::TagGet;
  std::vector<Expr> args;
};
struct AssertInstr {
  Expr cond;
};
struct GotoInstr {
  std::string label;
  std::size_t target = 0;
};
struct IfGotoInstr {
  Expr cond;
  std::string label;
  std::size_t target = 0;
};
struct HaltInstr {};
struct FailInstr {
  std::string message;
};

using Instr =
    std::variant<AssignInstr, AllocInstr, FreeInstr, LoadInstr, StoreInstr,
                 MemcpyInstr, IntrinsicInstr, AssertInstr, GotoInstr,
                 IfGotoInstr, HaltInstr, FailInstr>;

struct Program {
  std::vector<Instr> instrs;
  /// Trimmed source text of each instruction, for traces and diagnostics.
  std::vector<std::string> source;
  std::map<std::string, std::size_t> labels;
};

struct ParseError {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  std::string message;
};

class ParseResult {
 public:
  ParseResult(Program p) : state_(std::move(p)) {}
  ParseResult(ParseError e) : state_(std::move(e)) {}

  bool ok() const { return std::holds_alternative<Program>(state_); }
  const Program& program() const { return std::get<Program>(state_); }
  Program&& take_program() && { return std::get<Program>(std::move(state_)); }
  const ParseError& error() const { return std::get<ParseError>(state_); }

 private:
  std::variant<Program, ParseError> state_;
};

/// Parses the line-oriented program text.  One instruction per line, `#`
/// starts a comment, `name:` on its own line defines a label.  Every label
/// referenced by goto/ifgoto must be defined exactly once.
ParseResult parse_program(std::string_view text);

}  // namespace cherimm
