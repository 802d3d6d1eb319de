#include "cherimm.h"

#include <cstring>
#include <new>
#include <string>

#include "cherimm/heap.hpp"
#include "cherimm/machine.hpp"
#include "cherimm/program.hpp"

using namespace cherimm;

struct chmm_heap {
  Heap heap;
};

struct chmm_program {
  Program program;
};

namespace {

chmm_status to_status(MemErr e) {
  switch (e) {
    case MemErr::TagViolation: return CHMM_ERR_TAG_VIOLATION;
    case MemErr::PermitLoadViolation: return CHMM_ERR_PERMIT_LOAD_VIOLATION;
    case MemErr::PermitStoreViolation: return CHMM_ERR_PERMIT_STORE_VIOLATION;
    case MemErr::PermitStoreCapViolation:
      return CHMM_ERR_PERMIT_STORE_CAP_VIOLATION;
    case MemErr::LengthViolation: return CHMM_ERR_LENGTH_VIOLATION;
    case MemErr::UseAfterFree: return CHMM_ERR_USE_AFTER_FREE;
    case MemErr::MissingResource: return CHMM_ERR_MISSING_RESOURCE;
    case MemErr::Unaligned: return CHMM_ERR_UNALIGNED;
    case MemErr::InvalidFree: return CHMM_ERR_INVALID_FREE;
    case MemErr::WrongArgType: return CHMM_ERR_WRONG_ARG_TYPE;
  }
  return CHMM_ERR_BAD_ARGUMENT;
}

chmm_cap to_c_cap(const Capability& c) {
  return chmm_cap{c.block(), c.offset(), c.meta().base, c.meta().length,
                  c.perms().raw(), c.tag ? std::uint8_t{1} : std::uint8_t{0}};
}

Capability from_c_cap(const chmm_cap& c) {
  return Capability{
      MemCapability{c.block, c.offset,
                    Metadata{c.base, c.length,
                             PermSet::from_raw(static_cast<std::uint8_t>(c.perms))}},
      c.tag != 0};
}

bool valid_type(chmm_type t) { return t >= CHMM_TYPE_U8 && t <= CHMM_TYPE_CAP; }

CheriType from_c_type(chmm_type t) { return static_cast<CheriType>(t); }

chmm_value to_c_value(const CheriValue& v) {
  chmm_value out{};
  if (const auto* iv = std::get_if<IntValue>(&v)) {
    out.kind = CHMM_VAL_INT;
    out.type = static_cast<chmm_type>(iv->type);
    out.bits = iv->bits;
  } else if (const auto* cv = std::get_if<CapValue>(&v)) {
    out.kind = CHMM_VAL_CAP;
    out.cap = to_c_cap(cv->cap);
  } else if (const auto* fv = std::get_if<CapFragValue>(&v)) {
    out.kind = CHMM_VAL_CAP_FRAG;
    out.cap = to_c_cap(fv->cap);
    out.frag_index = fv->index;
  } else {
    out.kind = CHMM_VAL_UNDEF;
  }
  return out;
}

bool from_c_value(const chmm_value& v, std::uint32_t cap_size, CheriValue* out) {
  switch (v.kind) {
    case CHMM_VAL_INT:
      if (!valid_type(v.type) || v.type == CHMM_TYPE_CAP) return false;
      *out = make_int(from_c_type(v.type), v.bits);
      return true;
    case CHMM_VAL_CAP:
      *out = CapValue{from_c_cap(v.cap)};
      return true;
    case CHMM_VAL_CAP_FRAG:
      if (v.frag_index >= cap_size) return false;
      *out = CapFragValue{from_c_cap(v.cap), v.frag_index};
      return true;
    case CHMM_VAL_UNDEF:
      *out = Undef{};
      return true;
  }
  return false;
}

}  // namespace

extern "C" {

int chmm_status_is_cap_error(chmm_status s) {
  return s >= CHMM_ERR_TAG_VIOLATION && s <= CHMM_ERR_LENGTH_VIOLATION;
}

int chmm_status_is_logic_error(chmm_status s) {
  return s >= CHMM_ERR_USE_AFTER_FREE && s <= CHMM_ERR_WRONG_ARG_TYPE;
}

const char* chmm_status_name(chmm_status s) {
  switch (s) {
    case CHMM_OK: return "Ok";
    case CHMM_ERR_TAG_VIOLATION: return "TagViolation";
    case CHMM_ERR_PERMIT_LOAD_VIOLATION: return "PermitLoadViolation";
    case CHMM_ERR_PERMIT_STORE_VIOLATION: return "PermitStoreViolation";
    case CHMM_ERR_PERMIT_STORE_CAP_VIOLATION: return "PermitStoreCapViolation";
    case CHMM_ERR_LENGTH_VIOLATION: return "LengthViolation";
    case CHMM_ERR_USE_AFTER_FREE: return "UseAfterFree";
    case CHMM_ERR_MISSING_RESOURCE: return "MissingResource";
    case CHMM_ERR_UNALIGNED: return "Unaligned";
    case CHMM_ERR_INVALID_FREE: return "InvalidFree";
    case CHMM_ERR_WRONG_ARG_TYPE: return "WrongArgType";
    case CHMM_ERR_BAD_ARGUMENT: return "BadArgument";
  }
  return "Unknown";
}

chmm_heap* chmm_heap_new(uint32_t cap_size) {
  if (cap_size != 16 && cap_size != 32) return nullptr;
  return new (std::nothrow) chmm_heap{Heap(cap_size)};
}

chmm_heap* chmm_heap_clone(const chmm_heap* h) {
  if (h == nullptr) return nullptr;
  return new (std::nothrow) chmm_heap{h->heap};
}

void chmm_heap_destroy(chmm_heap* h) { delete h; }

uint32_t chmm_heap_cap_size(const chmm_heap* h) {
  return h == nullptr ? 0 : h->heap.cap_size();
}

int chmm_heap_wf(const chmm_heap* h) {
  return h != nullptr && h->heap.wf() ? 1 : 0;
}

chmm_status chmm_alloc(chmm_heap* h, uint64_t size, chmm_cap* out) {
  if (h == nullptr || out == nullptr) return CHMM_ERR_BAD_ARGUMENT;
  auto cap = h->heap.alloc(size);
  *out = to_c_cap(cap.value());
  return CHMM_OK;
}

chmm_status chmm_free(chmm_heap* h, const chmm_cap* cap, chmm_cap* out) {
  if (h == nullptr || cap == nullptr) return CHMM_ERR_BAD_ARGUMENT;
  auto freed = h->heap.free(from_c_cap(*cap));
  if (!freed) return to_status(freed.error());
  if (out != nullptr) *out = to_c_cap(freed.value());
  return CHMM_OK;
}

chmm_status chmm_load(const chmm_heap* h, const chmm_cap* cap, chmm_type type,
                      chmm_value* out) {
  if (h == nullptr || cap == nullptr || out == nullptr || !valid_type(type)) {
    return CHMM_ERR_BAD_ARGUMENT;
  }
  auto loaded = h->heap.load(from_c_cap(*cap), from_c_type(type));
  if (!loaded) return to_status(loaded.error());
  *out = to_c_value(loaded.value());
  return CHMM_OK;
}

chmm_status chmm_store(chmm_heap* h, const chmm_cap* cap,
                       const chmm_value* value) {
  if (h == nullptr || cap == nullptr || value == nullptr) {
    return CHMM_ERR_BAD_ARGUMENT;
  }
  CheriValue v;
  if (!from_c_value(*value, h->heap.cap_size(), &v)) return CHMM_ERR_BAD_ARGUMENT;
  auto stored = h->heap.store(from_c_cap(*cap), v);
  if (!stored) return to_status(stored.error());
  return CHMM_OK;
}

chmm_status chmm_memcpy(chmm_heap* h, const chmm_cap* dst, const chmm_cap* src,
                        uint64_t n) {
  if (h == nullptr || dst == nullptr || src == nullptr) {
    return CHMM_ERR_BAD_ARGUMENT;
  }
  auto copied = h->heap.memcpy(from_c_cap(*dst), from_c_cap(*src), n);
  if (!copied) return to_status(copied.error());
  return CHMM_OK;
}

void chmm_cap_null(chmm_cap* out) {
  if (out != nullptr) *out = to_c_cap(null_cap());
}

void chmm_cap_arith(const chmm_cap* cap, int64_t delta, chmm_cap* out) {
  if (cap == nullptr || out == nullptr) return;
  *out = to_c_cap(cap_arith(from_c_cap(*cap), delta));
}

int chmm_cap_tag_get(const chmm_cap* cap) {
  return cap != nullptr && cap->tag != 0 ? 1 : 0;
}

void chmm_cap_tag_clear(const chmm_cap* cap, chmm_cap* out) {
  if (cap == nullptr || out == nullptr) return;
  *out = to_c_cap(tag_clear(from_c_cap(*cap)));
}

void chmm_cap_perms_and(const chmm_cap* cap, uint32_t mask, chmm_cap* out) {
  if (cap == nullptr || out == nullptr) return;
  *out = to_c_cap(
      perms_and(from_c_cap(*cap), PermSet::from_raw(static_cast<std::uint8_t>(mask))));
}

chmm_status chmm_cap_bounds_set(const chmm_cap* cap, uint64_t new_base,
                                uint64_t new_length, chmm_cap* out) {
  if (cap == nullptr || out == nullptr) return CHMM_ERR_BAD_ARGUMENT;
  auto narrowed = bounds_set(from_c_cap(*cap), new_base, new_length);
  if (!narrowed) return to_status(narrowed.error());
  *out = to_c_cap(narrowed.value());
  return CHMM_OK;
}

chmm_program* chmm_program_parse(const char* text, chmm_parse_error* err) {
  if (text == nullptr) {
    if (err != nullptr) {
      *err = chmm_parse_error{0, 0, {}};
      std::strncpy(err->message, "null program text", sizeof(err->message) - 1);
    }
    return nullptr;
  }
  ParseResult result = parse_program(text);
  if (!result.ok()) {
    if (err != nullptr) {
      *err = chmm_parse_error{result.error().line, result.error().column, {}};
      std::strncpy(err->message, result.error().message.c_str(),
                   sizeof(err->message) - 1);
    }
    return nullptr;
  }
  return new (std::nothrow) chmm_program{std::move(result).take_program()};
}

void chmm_program_destroy(chmm_program* p) { delete p; }

uint64_t chmm_program_length(const chmm_program* p) {
  return p == nullptr ? 0 : p->program.instrs.size();
}

const char* chmm_program_instr_text(const chmm_program* p, uint64_t index) {
  if (p == nullptr || index >= p->program.source.size()) return nullptr;
  return p->program.source[index].c_str();
}

chmm_status chmm_run(const chmm_program* p, const chmm_run_config* config,
                     chmm_trace_fn trace, void* user, chmm_run_result* out) {
  if (p == nullptr || config == nullptr || out == nullptr) {
    return CHMM_ERR_BAD_ARGUMENT;
  }
  if ((config->cap_size != 16 && config->cap_size != 32) ||
      config->max_steps == 0) {
    return CHMM_ERR_BAD_ARGUMENT;
  }
  RunConfig rc{config->cap_size, config->trace != 0, config->max_steps};
  Machine machine(p->program, rc);
  if (rc.trace && trace != nullptr) {
    machine.set_trace_sink([trace, user](std::size_t pc, const std::string& text) {
      trace(user, pc, format_trace_line(pc, text).c_str());
    });
  }
  while (machine.running() && machine.steps_taken() < rc.max_steps) {
    machine.step();
  }
  const Status& status = machine.status();
  chmm_run_result result{};
  result.steps = machine.steps_taken();
  result.pc = status.pc;
  result.halt_code = status.halt_code;
  result.error = CHMM_OK;
  switch (status.kind) {
    case StatusKind::Running:
      result.outcome = CHMM_RUN_OUT_OF_STEPS;
      result.pc = machine.pc();
      break;
    case StatusKind::Halted:
      result.outcome = CHMM_RUN_HALTED;
      break;
    case StatusKind::Faulted:
      result.outcome = CHMM_RUN_FAULTED;
      result.error = to_status(status.error);
      break;
    case StatusKind::AssertFailed:
      result.outcome = CHMM_RUN_ASSERT_FAILED;
      break;
  }
  *out = result;
  return CHMM_OK;
}

}  // extern "C"
