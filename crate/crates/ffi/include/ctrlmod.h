#ifndef CTRLMOD_H
#define CTRLMOD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes shared by every entry point.
typedef enum CtrlmodStatus {
  CTRLMOD_STATUS_OK = 0,
  // A null pointer or non-UTF-8 string was passed.
  CTRLMOD_STATUS_INVALID_ARGUMENT = 1,
  // The task text is malformed, violates the schema or an invariant.
  CTRLMOD_STATUS_INVALID_TASK = 2,
  // A referenced file could not be read.
  CTRLMOD_STATUS_IO = 3,
  // The computation was rejected, e.g. a window too small or an unsupported family.
  CTRLMOD_STATUS_COMPUTATION = 4,
  // A Rust panic was caught at the boundary.
  CTRLMOD_STATUS_INTERNAL = 5,
} CtrlmodStatus;

// The outcome of running a task.
typedef struct CtrlmodReport CtrlmodReport;

// A parsed, fully resolved task.
typedef struct CtrlmodTask CtrlmodTask;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ctrlmod_version(void);

// Message for the last failing call on this thread, or null. Valid until the next call.
const char *ctrlmod_last_error(void);

// Parses task JSON. Relative module paths resolve against `base_dir` (may be null),
// then the corpus root.
//
// # Safety
// `json` and `base_dir` must be null or valid NUL-terminated strings; `out` must be writable.
enum CtrlmodStatus ctrlmod_task_parse(const char *json,
                                      const char *base_dir,
                                      struct CtrlmodTask **out);

// Overrides the window radius; rejected when a constant would exceed it.
//
// # Safety
// `task` must come from [`ctrlmod_task_parse`].
enum CtrlmodStatus ctrlmod_task_set_window(struct CtrlmodTask *task, uint32_t window);

// Overrides the sampling seed.
//
// # Safety
// `task` must come from [`ctrlmod_task_parse`].
enum CtrlmodStatus ctrlmod_task_set_seed(struct CtrlmodTask *task, uint64_t seed);

// # Safety
// `task` must be null or come from [`ctrlmod_task_parse`], and not be used afterwards.
void ctrlmod_task_free(struct CtrlmodTask *task);

// Runs a task. A failed property still returns `Ok`; see [`ctrlmod_report_passed`].
//
// # Safety
// `task` must come from [`ctrlmod_task_parse`]; `out` must be writable.
enum CtrlmodStatus ctrlmod_task_run(const struct CtrlmodTask *task, struct CtrlmodReport **out);

// 1 when every certificate passed, 0 otherwise (also for null).
//
// # Safety
// `report` must be null or come from [`ctrlmod_task_run`].
int32_t ctrlmod_report_passed(const struct CtrlmodReport *report);

// Report JSON, owned by the report.
//
// # Safety
// `report` must be null or come from [`ctrlmod_task_run`].
const char *ctrlmod_report_json(const struct CtrlmodReport *report);

// The resolution chain of a resolve task as a fresh string, or null. Free it with
// [`ctrlmod_string_free`].
//
// # Safety
// `report` must be null or come from [`ctrlmod_task_run`].
char *ctrlmod_report_chain(const struct CtrlmodReport *report);

// # Safety
// `report` must be null or come from [`ctrlmod_task_run`], and not be used afterwards.
void ctrlmod_report_free(struct CtrlmodReport *report);

// # Safety
// `s` must be null or a string returned by this library for the caller to free.
void ctrlmod_string_free(char *s);

// Number of elements of the ball of radius `r` about the identity.
//
// # Safety
// `group` must be a valid NUL-terminated string such as `"F2"`; `out` must be writable.
enum CtrlmodStatus ctrlmod_ball_size(const char *group, uint32_t r, uint64_t *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CTRLMOD_H */
