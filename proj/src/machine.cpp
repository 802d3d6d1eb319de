#include "cherimm/machine.hpp"

#include <cassert>

namespace cherimm {

namespace {

std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) +
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) -
                                   static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) *
                                   static_cast<std::uint64_t>(b));
}

EnvValue from_cheri_value(const CheriValue& v) {
  if (const auto* iv = std::get_if<IntValue>(&v)) return int_value_as_i64(*iv);
  if (const auto* cv = std::get_if<CapValue>(&v)) return cv->cap;
  if (const auto* fv = std::get_if<CapFragValue>(&v)) return *fv;
  return Undef{};
}

}  // namespace

Machine::Machine(const Program& program, RunConfig config)
    : program_(program), config_(config), heap_(config.cap_size) {}

void Machine::set_trace_sink(
    std::function<void(std::size_t, const std::string&)> sink) {
  trace_sink_ = std::move(sink);
}

const EnvValue* Machine::lookup(const std::string& var) const {
  auto it = env_.find(var);
  return it == env_.end() ? nullptr : &it->second;
}

void Machine::fault(MemErr err) {
  status_ = Status{StatusKind::Faulted, 0, err, pc_};
}

Result<EnvValue> Machine::eval(const Expr& e) const {
  if (const auto* lit = std::get_if<IntLit>(&e.node)) {
    return EnvValue{lit->value};
  }
  if (const auto* var = std::get_if<VarRef>(&e.node)) {
    const EnvValue* v = lookup(var->name);
    if (v == nullptr) return MemErr::WrongArgType;
    return *v;
  }
  const auto& bin = std::get<BinExpr>(e.node);
  auto lhs = eval(*bin.lhs);
  if (!lhs) return lhs.error();
  auto rhs = eval(*bin.rhs);
  if (!rhs) return rhs.error();

  const auto* li = std::get_if<std::int64_t>(&lhs.value());
  const auto* ri = std::get_if<std::int64_t>(&rhs.value());
  if (li != nullptr && ri != nullptr) {
    switch (bin.op) {
      case BinOp::Add: return EnvValue{wrap_add(*li, *ri)};
      case BinOp::Sub: return EnvValue{wrap_sub(*li, *ri)};
      case BinOp::Mul: return EnvValue{wrap_mul(*li, *ri)};
      case BinOp::Eq: return EnvValue{std::int64_t{*li == *ri}};
      case BinOp::Lt: return EnvValue{std::int64_t{*li < *ri}};
      case BinOp::Le: return EnvValue{std::int64_t{*li <= *ri}};
    }
  }
  // Capability arithmetic: cap + int, int + cap, cap - int.
  const auto* lc = std::get_if<Capability>(&lhs.value());
  const auto* rc = std::get_if<Capability>(&rhs.value());
  if (bin.op == BinOp::Add) {
    if (lc != nullptr && ri != nullptr) return EnvValue{cap_arith(*lc, *ri)};
    if (li != nullptr && rc != nullptr) return EnvValue{cap_arith(*rc, *li)};
  }
  if (bin.op == BinOp::Sub && lc != nullptr && ri != nullptr) {
    return EnvValue{cap_arith(*lc, wrap_sub(0, *ri))};
  }
  return MemErr::WrongArgType;
}

Result<std::int64_t> Machine::eval_int(const Expr& e) const {
  auto v = eval(e);
  if (!v) return v.error();
  if (const auto* i = std::get_if<std::int64_t>(&v.value())) return *i;
  return MemErr::WrongArgType;
}

Result<Capability> Machine::eval_cap(const Expr& e) const {
  auto v = eval(e);
  if (!v) return v.error();
  if (const auto* c = std::get_if<Capability>(&v.value())) return *c;
  return MemErr::WrongArgType;
}

void Machine::step() {
  assert(running());
  if (pc_ >= program_.instrs.size()) {
    status_ = Status{StatusKind::Halted, 0, MemErr::TagViolation, pc_};
    return;
  }
  if (trace_sink_) trace_sink_(pc_, program_.source[pc_]);
  ++steps_;
  const Instr& instr = program_.instrs[pc_];

  if (const auto* assign = std::get_if<AssignInstr>(&instr)) {
    auto v = eval(assign->value);
    if (!v) return fault(v.error());
    env_[assign->var] = std::move(v).take();
    ++pc_;
  } else if (const auto* al = std::get_if<AllocInstr>(&instr)) {
    auto n = eval_int(al->size);
    if (!n) return fault(n.error());
    if (n.value() < 0) return fault(MemErr::WrongArgType);
    auto cap = heap_.alloc(static_cast<std::uint64_t>(n.value()));
    env_[al->var] = cap.value();
    ++pc_;
  } else if (const auto* fr = std::get_if<FreeInstr>(&instr)) {
    auto cap = eval_cap(fr->cap);
    if (!cap) return fault(cap.error());
    auto freed = heap_.free(cap.value());
    if (!freed) return fault(freed.error());
    env_[fr->var] = freed.value();
    ++pc_;
  } else if (const auto* ld = std::get_if<LoadInstr>(&instr)) {
    auto cap = eval_cap(ld->addr);
    if (!cap) return fault(cap.error());
    auto loaded = heap_.load(cap.value(), ld->type);
    if (!loaded) return fault(loaded.error());
    env_[ld->var] = from_cheri_value(loaded.value());
    ++pc_;
  } else if (const auto* st = std::get_if<StoreInstr>(&instr)) {
    auto cap = eval_cap(st->addr);
    if (!cap) return fault(cap.error());
    auto v = eval(st->value);
    if (!v) return fault(v.error());
    CheriValue to_store = Undef{};
    if (const auto* i = std::get_if<std::int64_t>(&v.value())) {
      if (st->type == CheriType::Cap) return fault(MemErr::WrongArgType);
      to_store = make_int(st->type, static_cast<std::uint64_t>(*i));
    } else if (const auto* c = std::get_if<Capability>(&v.value())) {
      if (st->type != CheriType::Cap) return fault(MemErr::WrongArgType);
      to_store = CapValue{*c};
    } else if (const auto* f = std::get_if<CapFragValue>(&v.value())) {
      if (st->type != CheriType::U8 && st->type != CheriType::S8) {
        return fault(MemErr::WrongArgType);
      }
      to_store = *f;
    }
    auto stored = heap_.store(cap.value(), to_store);
    if (!stored) return fault(stored.error());
    ++pc_;
  } else if (const auto* mc = std::get_if<MemcpyInstr>(&instr)) {
    auto dst = eval_cap(mc->dst);
    if (!dst) return fault(dst.error());
    auto src = eval_cap(mc->src);
    if (!src) return fault(src.error());
    auto n = eval_int(mc->count);
    if (!n) return fault(n.error());
    if (n.value() < 0) return fault(MemErr::WrongArgType);
    auto copied =
        heap_.memcpy(dst.value(), src.value(), static_cast<std::uint64_t>(n.value()));
    if (!copied) return fault(copied.error());
    ++pc_;
  } else if (const auto* in = std::get_if<IntrinsicInstr>(&instr)) {
    auto cap = eval_cap(in->args[0]);
    if (!cap) return fault(cap.error());
    switch (in->which) {
      case Intrinsic::TagGet:
        env_[in->var] = std::int64_t{tag_get(cap.value()) ? 1 : 0};
        break;
      case Intrinsic::TagClear:
        env_[in->var] = tag_clear(cap.value());
        break;
      case Intrinsic::PermsAnd: {
        auto mask = eval_int(in->args[1]);
        if (!mask) return fault(mask.error());
        env_[in->var] = perms_and(
            cap.value(),
            PermSet::from_raw(static_cast<std::uint8_t>(mask.value())));
        break;
      }
      case Intrinsic::BoundsSet: {
        // Hardware-style: the new base is the current address.
        auto len = eval_int(in->args[1]);
        if (!len) return fault(len.error());
        if (len.value() < 0 || cap.value().offset() < 0) {
          return fault(MemErr::LengthViolation);
        }
        auto narrowed = bounds_set(
            cap.value(), static_cast<std::uint64_t>(cap.value().offset()),
            static_cast<std::uint64_t>(len.value()));
        if (!narrowed) return fault(narrowed.error());
        env_[in->var] = narrowed.value();
        break;
      }
      case Intrinsic::AddressGet:
        env_[in->var] = cap_query(cap.value()).address;
        break;
      case Intrinsic::BaseGet:
        env_[in->var] = static_cast<std::int64_t>(cap_query(cap.value()).base);
        break;
      case Intrinsic::LengthGet:
        env_[in->var] = static_cast<std::int64_t>(cap_query(cap.value()).length);
        break;
    }
    ++pc_;
  } else if (const auto* as = std::get_if<AssertInstr>(&instr)) {
    auto cond = eval_int(as->cond);
    if (!cond) return fault(cond.error());
    if (cond.value() == 0) {
      status_ = Status{StatusKind::AssertFailed, 0, MemErr::TagViolation, pc_};
      return;
    }
    ++pc_;
  } else if (const auto* go = std::get_if<GotoInstr>(&instr)) {
    pc_ = go->target;
  } else if (const auto* ifgo = std::get_if<IfGotoInstr>(&instr)) {
    auto cond = eval_int(ifgo->cond);
    if (!cond) return fault(cond.error());
    pc_ = cond.value() != 0 ? ifgo->target : pc_ + 1;
  } else if (std::holds_alternative<HaltInstr>(instr)) {
    status_ = Status{StatusKind::Halted, 0, MemErr::TagViolation, pc_};
    return;
  } else {
    assert(std::holds_alternative<FailInstr>(instr));
    status_ = Status{StatusKind::AssertFailed, 0, MemErr::TagViolation, pc_};
    return;
  }
  // Falling off the end of the program is a normal halt.
  if (pc_ >= program_.instrs.size()) {
    status_ = Status{StatusKind::Halted, 0, MemErr::TagViolation, pc_};
  }
}

std::string format_trace_line(std::size_t pc, const std::string& text) {
  return "pc=" + std::to_string(pc) + " " + text;
}

RunOutcome run_program(const Program& program, const RunConfig& config) {
  Machine machine(program, config);
  RunOutcome outcome;
  if (config.trace) {
    machine.set_trace_sink([&outcome](std::size_t pc, const std::string& text) {
      outcome.trace.push_back(format_trace_line(pc, text));
    });
  }
  while (machine.running() && machine.steps_taken() < config.max_steps) {
    machine.step();
  }
  outcome.status = machine.status();
  outcome.out_of_steps = machine.running();
  outcome.steps = machine.steps_taken();
  return outcome;
}

}  // namespace cherimm
