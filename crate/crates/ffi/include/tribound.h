#ifndef TRIBOUND_H
#define TRIBOUND_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  TB_STATUS_INVALID_INPUT = 3,
  // A membership test rejected its input; the result is still written.
  TB_STATUS_REJECT = 4,
  TB_STATUS_BUFFER_TOO_SMALL = 5,
  TB_STATUS_INTERNAL = 6,
  TB_STATUS_PANIC = 7,
} TbStatus;

// Opaque triangle handle.
typedef struct TbTriangle TbTriangle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *tb_last_error(void);

// Library version as a static string.
const char *tb_version(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void tb_string_free(char *s);

// Builds a triangle from a JSON spec such as
// `{"name":"q-pascal","params":{"q":"1/2"}}`.
//
// # Safety
// `spec_json` must be a NUL-terminated string; `out` must be writable.
enum TbStatus tb_triangle_from_json(const char *spec_json, struct TbTriangle **out);

// New handle for the transposed triangle.
//
// # Safety
// `tri` must be a live handle; `out` must be writable.
enum TbStatus tb_triangle_transpose(const struct TbTriangle *tri, struct TbTriangle **out);

// Releases a triangle handle. Null is ignored.
//
// # Safety
// `tri` must come from this library and not have been freed.
void tb_triangle_free(struct TbTriangle *tri);

// Short label such as `q-pascal(q=1/2)`.
//
// # Safety
// `tri` must be a live handle; `out` must be writable.
enum TbStatus tb_triangle_describe(const struct TbTriangle *tri, char **out);

// Dimension table as JSON with exact `"p/q"` entries.
//
// # Safety
// `tri` must be a live handle; `out` must be writable.
enum TbStatus tb_dimensions_json(const struct TbTriangle *tri, uintptr_t depth, char **out);

// Exact Martin kernel `V^{nk}` as JSON.
//
// # Safety
// `tri` must be a live handle; `out` must be writable.
enum TbStatus tb_martin_kernel_json(const struct TbTriangle *tri,
                                    uintptr_t n,
                                    uintptr_t k,
                                    char **out);

// Floating Martin kernel on levels `0..=depth`, written row by row into
// `buf` (`(depth+1)(depth+2)/2` entries). `rel_error` may be null.
//
// # Safety
// `tri` must be a live handle; `buf` must hold `len` doubles.
enum TbStatus tb_martin_kernel_float(const struct TbTriangle *tri,
                                     uintptr_t n,
                                     uintptr_t k,
                                     uintptr_t depth,
                                     double *buf,
                                     uintptr_t len,
                                     double *rel_error);

// Closed-form extreme kernel at a boundary point (`"x=1/3"`, `"m=2"`,
// `"m=inf"`, `"s=5/2"`, `"trivial-0"`, `"trivial-inf"`), with its coordinate.
//
// # Safety
// `tri` must be a live handle; `point` NUL-terminated; `out` writable.
enum TbStatus tb_extreme_kernel_json(const struct TbTriangle *tri,
                                     const char *point,
                                     uintptr_t depth,
                                     char **out);

// Complete-monotonicity test of a comma-separated first column.
// Returns `Reject` (with the JSON report written) when a negative entry
// appears.
//
// # Safety
// `tri` must be a live handle; `seq` NUL-terminated; `out` writable.
enum TbStatus tb_cm_check_json(const struct TbTriangle *tri, const char *seq, char **out);

// Backward transition law out of node `(n, k)` as JSON.
//
// # Safety
// `tri` must be a live handle; `out` must be writable.
enum TbStatus tb_backward_transition_json(const struct TbTriangle *tri,
                                          uintptr_t n,
                                          uintptr_t k,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRIBOUND_H */
