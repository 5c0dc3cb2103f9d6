#ifndef DODECA_H
#define DODECA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DodecaOutcome {
  DODECA_OUTCOME_PASS = 0,
  DODECA_OUTCOME_FAIL = 1,
  DODECA_OUTCOME_INCONCLUSIVE = 2,
} DodecaOutcome;

typedef enum DodecaStatus {
  DODECA_STATUS_OK = 0,
  DODECA_STATUS_NULL_ARGUMENT = 1,
  DODECA_STATUS_INVALID_UTF8 = 2,
  DODECA_STATUS_PARSE = 3,
  /**
   * The orbit met a piece boundary, the table, or left the wedge.
   */
  DODECA_STATUS_BOUNDARY = 4,
  /**
   * An iteration cap ran out before an answer was reached.
   */
  DODECA_STATUS_INCONCLUSIVE = 5,
  DODECA_STATUS_FAILED = 6,
  DODECA_STATUS_OUT_OF_RANGE = 7,
  DODECA_STATUS_PANIC = 8,
} DodecaStatus;

/**
 * A periodic component of the induced map.
 */
typedef struct DodecaComponent DodecaComponent;

/**
 * Sorted periods up to a bound.
 */
typedef struct DodecaPeriodSet DodecaPeriodSet;

/**
 * The wedge, its six pieces and the induced map.
 */
typedef struct DodecaWedge DodecaWedge;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static string.
 */
const char *dodeca_version(void);

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call or `dodeca_clear_error`.
 */
const char *dodeca_last_error_message(void);

void dodeca_clear_error(void);

/**
 * # Safety
 * `s` is NULL or a string returned by this library and not yet freed.
 */
void dodeca_string_free(char *s);

/**
 * # Safety
 * `out` is a valid pointer.
 */
enum DodecaStatus dodeca_wedge_new(struct DodecaWedge **out);

/**
 * # Safety
 * `wedge` is NULL or a handle from `dodeca_wedge_new` not yet freed.
 */
void dodeca_wedge_free(struct DodecaWedge *wedge);

/**
 * Writes the fixed point `O_k`, `k` in `1..=5`, as a literal.
 *
 * # Safety
 * `wedge` is a live handle and `out` a valid pointer.
 */
enum DodecaStatus dodeca_wedge_fixed_point(const struct DodecaWedge *wedge, uint32_t k, char **out);

/**
 * One step of the induced map, forward or backward. `out_piece` may be
 * NULL; otherwise it receives the index of the piece used.
 *
 * # Safety
 * `wedge` is a live handle, `point` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum DodecaStatus dodeca_wedge_step(const struct DodecaWedge *wedge,
                                    const char *point,
                                    bool backward,
                                    char **out,
                                    uint32_t *out_piece);

/**
 * Exact period of `point` under the induced map. Returns
 * `DODECA_STATUS_INCONCLUSIVE` when the orbit does not close within `cap`.
 *
 * # Safety
 * `wedge` is a live handle, `point` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum DodecaStatus dodeca_wedge_period(const struct DodecaWedge *wedge,
                                      const char *point,
                                      uint64_t cap,
                                      uint64_t *out);

/**
 * The periodic component containing `point`.
 *
 * # Safety
 * `wedge` is a live handle, `point` a NUL-terminated string and `out` a
 * valid pointer.
 */
enum DodecaStatus dodeca_component_find(const struct DodecaWedge *wedge,
                                        const char *point,
                                        uint64_t max_iter,
                                        struct DodecaComponent **out);

/**
 * # Safety
 * `component` is NULL or a handle from `dodeca_component_find` not yet
 * freed.
 */
void dodeca_component_free(struct DodecaComponent *component);

/**
 * Period of the component's center under the induced map; 0 for NULL.
 *
 * # Safety
 * `component` is NULL or a live handle.
 */
uint64_t dodeca_component_tprime_period(const struct DodecaComponent *component);

/**
 * Period of a generic point of the component under the outer billiard map;
 * 0 for NULL.
 *
 * # Safety
 * `component` is NULL or a live handle.
 */
uint64_t dodeca_component_billiard_period(const struct DodecaComponent *component);

/**
 * # Safety
 * `component` is NULL or a live handle.
 */
size_t dodeca_component_vertex_count(const struct DodecaComponent *component);

/**
 * # Safety
 * `component` is a live handle and `out` a valid pointer.
 */
enum DodecaStatus dodeca_component_vertex(const struct DodecaComponent *component,
                                          size_t index,
                                          char **out);

/**
 * Exact area as a field literal `a+b*s3`.
 *
 * # Safety
 * `component` is a live handle and `out` a valid pointer.
 */
enum DodecaStatus dodeca_component_area(const struct DodecaComponent *component, char **out);

/**
 * Enumerates every possible period up to `bound`.
 *
 * # Safety
 * `out` is a valid pointer.
 */
enum DodecaStatus dodeca_periods_new(uint64_t bound, struct DodecaPeriodSet **out);

/**
 * # Safety
 * `set` is NULL or a handle from `dodeca_periods_new` not yet freed.
 */
void dodeca_periods_free(struct DodecaPeriodSet *set);

/**
 * # Safety
 * `set` is NULL or a live handle.
 */
size_t dodeca_periods_len(const struct DodecaPeriodSet *set);

/**
 * Copies the sorted periods into `buf` of capacity `cap` and returns how
 * many were written.
 *
 * # Safety
 * `set` is NULL or a live handle; `buf` holds at least `cap` elements.
 */
size_t dodeca_periods_copy(const struct DodecaPeriodSet *set, uint64_t *buf, size_t cap);

/**
 * # Safety
 * `set` is NULL or a live handle.
 */
bool dodeca_periods_contains(const struct DodecaPeriodSet *set, uint64_t period);

/**
 * Runs acceptance criterion `id` (1 to 10) with default options. The
 * detail line is written to `out_detail` unless it is NULL.
 *
 * # Safety
 * `out` is a valid pointer; `out_detail` is NULL or valid.
 */
enum DodecaStatus dodeca_verify(uint8_t id, enum DodecaOutcome *out, char **out_detail);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DODECA_H */
