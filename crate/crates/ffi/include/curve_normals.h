#ifndef CURVE_NORMALS_H
#define CURVE_NORMALS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of an ABI call. The discriminants match the CLI exit codes:
 * non-generic inputs (perturb and retry) and exhausted searches are
 * distinguished from hard errors.
 */
typedef enum CnStatus {
  CN_STATUS_OK = 0,
  CN_STATUS_ERROR = 1,
  CN_STATUS_NON_GENERIC = 2,
  CN_STATUS_SEARCH_FAILED = 3,
  CN_STATUS_BAD_ARGUMENT = 4,
} CnStatus;

/**
 * Opaque curve handle. Create with [`cn_curve_parse_json`], release
 * with [`cn_curve_free`]. A handle is immutable and may be shared
 * across threads.
 */
typedef struct CnCurve CnCurve;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent failure on the calling thread.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *cn_last_error(void);

/**
 * Parse a curve from its JSON description and store a handle in
 * `out`. The schema matches the CLI curve files: either
 * `{"type": "pl", "vertices": [[x,y,z], ...]}` or
 * `{"type": "fourier", "order": m, "coeffs": {...}}`, optionally with
 * a `"knotted"` flag.
 *
 * # Safety
 *
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CnStatus cn_curve_parse_json(const char *text, struct CnCurve **out);

/**
 * Release a curve handle. Passing NULL is a no-op.
 *
 * # Safety
 *
 * `curve` must come from [`cn_curve_parse_json`] and must not be used
 * afterwards.
 */
void cn_curve_free(struct CnCurve *curve);

/**
 * Census of normals from the base point `(x, y, z)` as canonical
 * JSON. `grid` overrides the sample grid for smooth root isolation;
 * pass 0 for the default. Polylines ignore `grid`.
 *
 * # Safety
 *
 * `curve` must be a live handle and `out` a valid pointer. On success
 * the caller owns `*out` and releases it with [`cn_string_free`].
 */
enum CnStatus cn_normals_json(const struct CnCurve *curve,
                              double x,
                              double y,
                              double z,
                              uintptr_t grid,
                              char **out);

/**
 * Search for a witness point with many normals and return it as
 * canonical JSON (`y`, `n`, `method`, `census`). Polylines run the
 * structural search and ignore `budget` and `seed`; Fourier curves
 * run the seeded ascent within `budget` census evaluations.
 *
 * # Safety
 *
 * `curve` must be a live handle and `out` a valid pointer. On success
 * the caller owns `*out` and releases it with [`cn_string_free`].
 */
enum CnStatus cn_witness_json(const struct CnCurve *curve,
                              uintptr_t budget,
                              uint64_t seed,
                              char **out);

/**
 * Upper bound on the number of complex critical points of the squared
 * distance function for a generic degree-`(d1, d2)` curve.
 *
 * # Safety
 *
 * `out` must be a valid pointer.
 */
enum CnStatus cn_ed_degree_bound(uint32_t d1, uint32_t d2, uint64_t *out);

/**
 * Release a string returned by this library. Passing NULL is a no-op.
 *
 * # Safety
 *
 * `text` must come from this library and must not be used afterwards.
 */
void cn_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CURVE_NORMALS_H */
