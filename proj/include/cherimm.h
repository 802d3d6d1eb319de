/*
 * C API for the cherimm capability memory model.
 *
 * The library models a CHERI-style heap: allocations are (block, offset)
 * capabilities carrying bounds, permissions and an out-of-band tag bit, and
 * the four memory actions (alloc / free / load / store) plus memcpy perform
 * the full hardware-style check sequence before touching memory.  A small
 * GOTO-style program format and runner are exposed for whole-program use.
 *
 * All handles are opaque; every fallible call returns a chmm_status.
 */
#ifndef CHERIMM_H
#define CHERIMM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct chmm_heap chmm_heap;
typedef struct chmm_program chmm_program;

/* Permission bits for chmm_cap.perms. */
enum {
  CHMM_PERM_LOAD = 1u << 0,
  CHMM_PERM_STORE = 1u << 1,
  CHMM_PERM_CAP_LOAD = 1u << 2,
  CHMM_PERM_CAP_STORE = 1u << 3,
  CHMM_PERM_ALL = 0xF,
};

/* A capability, by value.  offset may be out of bounds; only dereferences
 * check it. */
typedef struct chmm_cap {
  int64_t block;
  int64_t offset;
  uint64_t base;
  uint64_t length;
  uint32_t perms;
  uint8_t tag;
} chmm_cap;

typedef enum chmm_status {
  CHMM_OK = 0,
  /* capability check faults */
  CHMM_ERR_TAG_VIOLATION = 1,
  CHMM_ERR_PERMIT_LOAD_VIOLATION = 2,
  CHMM_ERR_PERMIT_STORE_VIOLATION = 3,
  CHMM_ERR_PERMIT_STORE_CAP_VIOLATION = 4,
  CHMM_ERR_LENGTH_VIOLATION = 5,
  /* logical faults */
  CHMM_ERR_USE_AFTER_FREE = 6,
  CHMM_ERR_MISSING_RESOURCE = 7,
  CHMM_ERR_UNALIGNED = 8,
  CHMM_ERR_INVALID_FREE = 9,
  CHMM_ERR_WRONG_ARG_TYPE = 10,
  /* API misuse (never produced by the model itself) */
  CHMM_ERR_BAD_ARGUMENT = 100,
} chmm_status;

int chmm_status_is_cap_error(chmm_status s);
int chmm_status_is_logic_error(chmm_status s);
const char* chmm_status_name(chmm_status s);

typedef enum chmm_type {
  CHMM_TYPE_U8 = 0,
  CHMM_TYPE_S8 = 1,
  CHMM_TYPE_U16 = 2,
  CHMM_TYPE_S16 = 3,
  CHMM_TYPE_U32 = 4,
  CHMM_TYPE_S32 = 5,
  CHMM_TYPE_U64 = 6,
  CHMM_TYPE_S64 = 7,
  CHMM_TYPE_CAP = 8,
} chmm_type;

typedef enum chmm_value_kind {
  CHMM_VAL_INT = 0,
  CHMM_VAL_CAP = 1,
  CHMM_VAL_CAP_FRAG = 2,
  CHMM_VAL_UNDEF = 3,
} chmm_value_kind;

typedef struct chmm_value {
  chmm_value_kind kind;
  chmm_type type;      /* CHMM_VAL_INT: the integer's type */
  uint64_t bits;       /* CHMM_VAL_INT: value, truncated to the width */
  chmm_cap cap;        /* CHMM_VAL_CAP / CHMM_VAL_CAP_FRAG */
  uint32_t frag_index; /* CHMM_VAL_CAP_FRAG */
} chmm_value;

/* ---- heap lifecycle ---------------------------------------------------- */

/* cap_size must be 16 or 32 (bytes per capability). */
chmm_heap* chmm_heap_new(uint32_t cap_size);
chmm_heap* chmm_heap_clone(const chmm_heap* h);
void chmm_heap_destroy(chmm_heap* h);
uint32_t chmm_heap_cap_size(const chmm_heap* h);
int chmm_heap_wf(const chmm_heap* h);

/* ---- memory actions ---------------------------------------------------- */

chmm_status chmm_alloc(chmm_heap* h, uint64_t size, chmm_cap* out);
chmm_status chmm_free(chmm_heap* h, const chmm_cap* cap, chmm_cap* out);
chmm_status chmm_load(const chmm_heap* h, const chmm_cap* cap, chmm_type type,
                      chmm_value* out);
chmm_status chmm_store(chmm_heap* h, const chmm_cap* cap,
                       const chmm_value* value);
chmm_status chmm_memcpy(chmm_heap* h, const chmm_cap* dst,
                        const chmm_cap* src, uint64_t n);

/* ---- capability operations (pure) -------------------------------------- */

void chmm_cap_null(chmm_cap* out);
void chmm_cap_arith(const chmm_cap* cap, int64_t delta, chmm_cap* out);
int chmm_cap_tag_get(const chmm_cap* cap);
void chmm_cap_tag_clear(const chmm_cap* cap, chmm_cap* out);
void chmm_cap_perms_and(const chmm_cap* cap, uint32_t mask, chmm_cap* out);
chmm_status chmm_cap_bounds_set(const chmm_cap* cap, uint64_t new_base,
                                uint64_t new_length, chmm_cap* out);

/* ---- programs ----------------------------------------------------------- */

typedef struct chmm_parse_error {
  uint64_t line;   /* 1-based */
  uint64_t column; /* 1-based */
  char message[240];
} chmm_parse_error;

/* Returns NULL on parse failure and fills *err when given. */
chmm_program* chmm_program_parse(const char* text, chmm_parse_error* err);
void chmm_program_destroy(chmm_program* p);
uint64_t chmm_program_length(const chmm_program* p);
/* Source text of one instruction; NULL when index is out of range.  The
 * pointer stays valid for the lifetime of the program. */
const char* chmm_program_instr_text(const chmm_program* p, uint64_t index);

typedef struct chmm_run_config {
  uint32_t cap_size; /* 16 or 32 */
  int trace;         /* nonzero: invoke the trace callback per instruction */
  uint64_t max_steps;
} chmm_run_config;

typedef enum chmm_run_outcome {
  CHMM_RUN_HALTED = 0,
  CHMM_RUN_FAULTED = 1,
  CHMM_RUN_ASSERT_FAILED = 2,
  CHMM_RUN_OUT_OF_STEPS = 3,
} chmm_run_outcome;

typedef struct chmm_run_result {
  chmm_run_outcome outcome;
  int32_t halt_code;
  chmm_status error; /* valid when outcome == CHMM_RUN_FAULTED */
  uint64_t pc;       /* fault / failed-assert instruction index */
  uint64_t steps;
} chmm_run_result;

/* Called before each executed instruction with the formatted trace line
 * ("pc=<n> <instruction text>"). */
typedef void (*chmm_trace_fn)(void* user, uint64_t pc, const char* line);

chmm_status chmm_run(const chmm_program* p, const chmm_run_config* config,
                     chmm_trace_fn trace, void* user, chmm_run_result* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CHERIMM_H */
