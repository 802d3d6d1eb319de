#include <cctype>
#include <charconv>
#include <optional>
#include <set>
#include <utility>

#include "cherimm/program.hpp"

namespace cherimm {

std::string_view intrinsic_name(Intrinsic i) {
  switch (i) {
    case Intrinsic::TagGet: return "cheri_tag_get";
    case Intrinsic::TagClear: return "cheri_tag_clear";
    case Intrinsic::PermsAnd: return "cheri_perms_and";
    case Intrinsic::BoundsSet: return "cheri_bounds_set";
    case Intrinsic::AddressGet: return "cheri_address_get";
    case Intrinsic::BaseGet: return "cheri_base_get";
    case Intrinsic::LengthGet: return "cheri_length_get";
  }
  return "?";
}

namespace {

struct IntrinsicSpec {
  Intrinsic which;
  std::size_t arity;
};

std::optional<IntrinsicSpec> intrinsic_from_name(std::string_view name) {
  if (name == "cheri_tag_get") return IntrinsicSpec{Intrinsic::TagGet, 1};
  if (name == "cheri_tag_clear") return IntrinsicSpec{Intrinsic::TagClear, 1};
  if (name == "cheri_perms_and") return IntrinsicSpec{Intrinsic::PermsAnd, 2};
  if (name == "cheri_bounds_set") return IntrinsicSpec{Intrinsic::BoundsSet, 2};
  if (name == "cheri_address_get") return IntrinsicSpec{Intrinsic::AddressGet, 1};
  if (name == "cheri_base_get") return IntrinsicSpec{Intrinsic::BaseGet, 1};
  if (name == "cheri_length_get") return IntrinsicSpec{Intrinsic::LengthGet, 1};
  return std::nullopt;
}

bool is_reserved(std::string_view word) {
  static const std::set<std::string_view> kReserved = {
      "alloc", "free", "load", "store", "memcpy", "assert", "goto",
      "ifgoto", "halt",  "fail", "u8",   "s8",    "u16",    "s16",
      "u32",   "s32",   "u64",  "s64",  "cap"};
  return kReserved.count(word) != 0 || intrinsic_from_name(word).has_value();
}

enum class TokKind { Ident, Number, Op, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  std::int64_t number = 0;
  std::size_t column = 0;  // 1-based
};

class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no)
      : line_(line), line_no_(line_no) {}

  ParseError error_at(std::size_t column, std::string message) const {
    return ParseError{line_no_, column, std::move(message)};
  }

  bool tokenize(ParseError* err) {
    std::size_t i = 0;
    while (i < line_.size()) {
      const char ch = line_[i];
      if (ch == '#') break;
      if (std::isspace(static_cast<unsigned char>(ch))) {
        ++i;
        continue;
      }
      const std::size_t col = i + 1;
      if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
        std::size_t j = i;
        while (j < line_.size() &&
               (std::isalnum(static_cast<unsigned char>(line_[j])) || line_[j] == '_')) {
          ++j;
        }
        tokens_.push_back({TokKind::Ident, std::string(line_.substr(i, j - i)), 0, col});
        i = j;
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        std::size_t j = i;
        int base = 10;
        if (line_[i] == '0' && i + 1 < line_.size() &&
            (line_[i + 1] == 'x' || line_[i + 1] == 'X')) {
          base = 16;
          j = i + 2;
          while (j < line_.size() &&
                 std::isxdigit(static_cast<unsigned char>(line_[j]))) {
            ++j;
          }
          if (j == i + 2) {
            *err = error_at(col, "malformed hex literal");
            return false;
          }
        } else {
          while (j < line_.size() && std::isdigit(static_cast<unsigned char>(line_[j]))) {
            ++j;
          }
        }
        std::uint64_t value = 0;
        const char* first = line_.data() + i + (base == 16 ? 2 : 0);
        const char* last = line_.data() + j;
        auto [ptr, ec] = std::from_chars(first, last, value, base);
        if (ec != std::errc() || ptr != last) {
          *err = error_at(col, "integer literal out of range");
          return false;
        }
        tokens_.push_back(
            {TokKind::Number, std::string(line_.substr(i, j - i)),
             static_cast<std::int64_t>(value), col});
        i = j;
        continue;
      }
      // Multi-character operators first.
      if (ch == ':' && i + 1 < line_.size() && line_[i + 1] == '=') {
        tokens_.push_back({TokKind::Op, ":=", 0, col});
        i += 2;
        continue;
      }
      if (ch == '<' && i + 1 < line_.size() && line_[i + 1] == '=') {
        tokens_.push_back({TokKind::Op, "<=", 0, col});
        i += 2;
        continue;
      }
      if (ch == ':' || ch == '=' || ch == '<' || ch == '+' || ch == '-' ||
          ch == '*' || ch == '(' || ch == ')') {
        tokens_.push_back({TokKind::Op, std::string(1, ch), 0, col});
        ++i;
        continue;
      }
      *err = error_at(col, std::string("unexpected character '") + ch + "'");
      return false;
    }
    tokens_.push_back({TokKind::End, "", 0, line_.size() + 1});
    return true;
  }

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == TokKind::End; }

  bool accept_op(std::string_view op) {
    if (peek().kind == TokKind::Op && peek().text == op) {
      next();
      return true;
    }
    return false;
  }

  bool expect_op(std::string_view op, ParseError* err) {
    if (accept_op(op)) return true;
    *err = error_at(peek().column, "expected '" + std::string(op) + "'");
    return false;
  }

  // expr     := additive (('=' | '<' | '<=') additive)?
  // additive := term (('+' | '-') term)*
  // term     := unary ('*' unary)*
  // unary    := '-' unary | primary
  // primary  := number | ident | '(' expr ')'
  bool parse_expr(Expr* out, ParseError* err) {
    if (!parse_additive(out, err)) return false;
    if (peek().kind == TokKind::Op &&
        (peek().text == "=" || peek().text == "<" || peek().text == "<=")) {
      const std::string op = next().text;
      Expr rhs;
      if (!parse_additive(&rhs, err)) return false;
      const BinOp bin = op == "=" ? BinOp::Eq : op == "<" ? BinOp::Lt : BinOp::Le;
      *out = make_bin(bin, std::move(*out), std::move(rhs));
    }
    return true;
  }

 private:
  static Expr make_bin(BinOp op, Expr lhs, Expr rhs) {
    Expr e;
    e.node = BinExpr{op, std::make_shared<Expr>(std::move(lhs)),
                       std::make_shared<Expr>(std::move(rhs))};
    return e;
  }

  bool parse_additive(Expr* out, ParseError* err) {
    if (!parse_term(out, err)) return false;
    while (peek().kind == TokKind::Op &&
           (peek().text == "+" || peek().text == "-")) {
      const BinOp op = next().text == "+" ? BinOp::Add : BinOp::Sub;
      Expr rhs;
      if (!parse_term(&rhs, err)) return false;
      *out = make_bin(op, std::move(*out), std::move(rhs));
    }
    return true;
  }

  bool parse_term(Expr* out, ParseError* err) {
    if (!parse_unary(out, err)) return false;
    while (peek().kind == TokKind::Op && peek().text == "*") {
      next();
      Expr rhs;
      if (!parse_unary(&rhs, err)) return false;
      *out = make_bin(BinOp::Mul, std::move(*out), std::move(rhs));
    }
    return true;
  }

  bool parse_unary(Expr* out, ParseError* err) {
    if (peek().kind == TokKind::Op && peek().text == "-") {
      next();
      Expr inner;
      if (!parse_unary(&inner, err)) return false;
      if (const auto* lit = std::get_if<IntLit>(&inner.node)) {
        out->node = IntLit{static_cast<std::int64_t>(
            -static_cast<std::uint64_t>(lit->value))};
        return true;
      }
      Expr zero;
      zero.node = IntLit{0};
      *out = make_bin(BinOp::Sub, std::move(zero), std::move(inner));
      return true;
    }
    return parse_primary(out, err);
  }

  bool parse_primary(Expr* out, ParseError* err) {
    const Token& t = peek();
    if (t.kind == TokKind::Number) {
      out->node = IntLit{t.number};
      next();
      return true;
    }
    if (t.kind == TokKind::Ident) {
      if (is_reserved(t.text)) {
        *err = error_at(t.column, "'" + t.text + "' is a reserved word");
        return false;
      }
      out->node = VarRef{t.text};
      next();
      return true;
    }
    if (accept_op("(")) {
      if (!parse_expr(out, err)) return false;
      return expect_op(")", err);
    }
    *err = error_at(t.column, "expected an expression");
    return false;
  }

  std::string_view line_;
  std::size_t line_no_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string instruction_text(std::string_view line) {
  const std::size_t hash = line.find('#');
  return trim(hash == std::string_view::npos ? line : line.substr(0, hash));
}

}  // namespace

ParseResult parse_program(std::string_view text) {
  Program program;
  ParseError err;
  std::size_t line_no = 0;
  std::size_t start = 0;

  struct PendingJump {
    std::size_t instr_index;
    std::size_t line;
    std::size_t column;
  };
  std::vector<PendingJump> pending;

  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(start, end - start);
    ++line_no;
    const std::size_t next_start = end + 1;

    LineParser lp(raw, line_no);
    if (!lp.tokenize(&err)) return err;
    if (lp.at_end()) {
      if (next_start > text.size()) break;
      start = next_start;
      continue;
    }

    // Label definition: `name:` alone on the line.
    if (lp.peek().kind == TokKind::Ident && lp.peek(1).kind == TokKind::Op &&
        lp.peek(1).text == ":") {
      const std::string name = lp.next().text;
      lp.next();
      if (!lp.at_end()) {
        return lp.error_at(lp.peek().column, "label must be alone on its line");
      }
      if (program.labels.count(name) != 0) {
        return lp.error_at(1, "duplicate label '" + name + "'");
      }
      program.labels[name] = program.instrs.size();
      if (next_start > text.size()) break;
      start = next_start;
      continue;
    }

    Instr instr;
    const Token& head = lp.peek();
    if (head.kind != TokKind::Ident) {
      return lp.error_at(head.column, "expected an instruction");
    }

    auto parse_type = [&](CheriType* out) -> bool {
      const Token& t = lp.peek();
      if (t.kind == TokKind::Ident) {
        if (auto ty = type_from_name(t.text)) {
          *out = *ty;
          lp.next();
          return true;
        }
      }
      err = lp.error_at(t.column, "expected a type (u8..s64, cap)");
      return false;
    };

    if (head.text == "store") {
      lp.next();
      StoreInstr si;
      if (!parse_type(&si.type)) return err;
      if (!lp.parse_expr(&si.addr, &err)) return err;
      if (!lp.parse_expr(&si.value, &err)) return err;
      instr = std::move(si);
    } else if (head.text == "memcpy") {
      lp.next();
      MemcpyInstr mi;
      if (!lp.parse_expr(&mi.dst, &err)) return err;
      if (!lp.parse_expr(&mi.src, &err)) return err;
      if (!lp.parse_expr(&mi.count, &err)) return err;
      instr = std::move(mi);
    } else if (head.text == "assert") {
      lp.next();
      AssertInstr ai;
      if (!lp.parse_expr(&ai.cond, &err)) return err;
      instr = std::move(ai);
    } else if (head.text == "goto") {
      lp.next();
      const Token& lab = lp.peek();
      if (lab.kind != TokKind::Ident) {
        return lp.error_at(lab.column, "expected a label after 'goto'");
      }
      lp.next();
      pending.push_back({program.instrs.size(), line_no, lab.column});
      instr = GotoInstr{lab.text, 0};
    } else if (head.text == "ifgoto") {
      lp.next();
      IfGotoInstr igi;
      if (!lp.parse_expr(&igi.cond, &err)) return err;
      const Token& lab = lp.peek();
      if (lab.kind != TokKind::Ident) {
        return lp.error_at(lab.column, "expected a label after the condition");
      }
      lp.next();
      igi.label = lab.text;
      pending.push_back({program.instrs.size(), line_no, lab.column});
      instr = std::move(igi);
    } else if (head.text == "halt") {
      lp.next();
      instr = HaltInstr{};
    } else if (head.text == "fail") {
      lp.next();
      instr = FailInstr{""};
    } else {
      // Assignment forms: `x := ...`
      if (is_reserved(head.text)) {
        return lp.error_at(head.column,
                           "'" + head.text + "' cannot start an instruction");
      }
      const std::string var = lp.next().text;
      if (!lp.expect_op(":=", &err)) return err;
      const Token& rhs = lp.peek();
      if (rhs.kind == TokKind::Ident && rhs.text == "alloc") {
        lp.next();
        AllocInstr ai{var, {}};
        if (!lp.parse_expr(&ai.size, &err)) return err;
        instr = std::move(ai);
      } else if (rhs.kind == TokKind::Ident && rhs.text == "free") {
        lp.next();
        FreeInstr fi{var, {}};
        if (!lp.parse_expr(&fi.cap, &err)) return err;
        instr = std::move(fi);
      } else if (rhs.kind == TokKind::Ident && rhs.text == "load") {
        lp.next();
        LoadInstr li;
        li.var = var;
        if (!parse_type(&li.type)) return err;
        if (!lp.parse_expr(&li.addr, &err)) return err;
        instr = std::move(li);
      } else if (rhs.kind == TokKind::Ident &&
                 intrinsic_from_name(rhs.text).has_value()) {
        const IntrinsicSpec spec = *intrinsic_from_name(rhs.text);
        lp.next();
        IntrinsicInstr ii;
        ii.var = var;
        ii.which = spec.which;
        for (std::size_t i = 0; i < spec.arity; ++i) {
          Expr arg;
          if (!lp.parse_expr(&arg, &err)) return err;
          ii.args.push_back(std::move(arg));
        }
        instr = std::move(ii);
      } else {
        AssignInstr ai{var, {}};
        if (!lp.parse_expr(&ai.value, &err)) return err;
        instr = std::move(ai);
      }
    }

    if (!lp.at_end()) {
      return lp.error_at(lp.peek().column, "trailing tokens after instruction");
    }
    program.instrs.push_back(std::move(instr));
    program.source.push_back(instruction_text(raw));

    if (next_start > text.size()) break;
    start = next_start;
  }

  for (const PendingJump& jump : pending) {
    Instr& in = program.instrs[jump.instr_index];
    const std::string& label = std::holds_alternative<GotoInstr>(in)
                                   ? std::get<GotoInstr>(in).label
                                   : std::get<IfGotoInstr>(in).label;
    auto it = program.labels.find(label);
    if (it == program.labels.end()) {
      return ParseError{jump.line, jump.column, "undefined label '" + label + "'"};
    }
    if (auto* g = std::get_if<GotoInstr>(&in)) {
      g->target = it->second;
    } else {
      std::get<IfGotoInstr>(in).target = it->second;
    }
  }
  return program;
}

}  // namespace cherimm
