/* C interface for the borel-core library. Regenerated by build.rs; do not edit. */

#pragma once

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// The call succeeded.
#define BOREL_OK 0

// Invalid input: malformed document, degenerate or ill-conditioned data.
#define BOREL_ERR_INVALID_INPUT 1

// The computation refused to proceed (failed maximality certificate,
// non-equivariant boundary map, unsupported cocycle kind).
#define BOREL_ERR_REFUSED 2

// Numerical failure: a tolerance could not be met.
#define BOREL_ERR_NUMERICAL 3

// A required pointer argument was NULL.
#define BOREL_ERR_NULL_ARGUMENT 4

// An internal panic was caught at the ABI boundary. This indicates a bug;
// the stored error message contains the panic payload.
#define BOREL_ERR_PANIC 5

// Largest ambient dimension `n` accepted by the flag constructors. `B_n`
// evaluation costs O(n^6) per tuple, so larger handles are refused rather
// than allocated.
#define BOREL_MAX_DIMENSION 64

// An immutable 4-tuple of complete flags in `C^n`. Opaque; create with
// `borel_flags_new` or `borel_flags_veronese` and release with
// `borel_flags_free`.
typedef struct BorelFlags BorelFlags;

// Optional overrides for the document runners. Zero-valued fields keep the
// value from the document (or the library default); pass NULL instead of a
// struct to keep everything.
typedef struct {
  // Sample count; 0 keeps the document's `estimator.samples` or the
  // default. For `borel_run_trivialize` this is the per-slice count.
  size_t samples;
  // Nonzero if `seed` should override the document seed.
  uint8_t has_seed;
  // RNG seed, used when `has_seed` is nonzero.
  uint64_t seed;
  // Worker threads; 0 keeps the default of 1.
  size_t workers;
  // Tolerance; values <= 0 keep the default of 1e-6.
  double tol;
} BorelRunParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the most recent failing call on this thread, as a
// NUL-terminated UTF-8 string. Empty if the most recent call succeeded.
// The pointer stays valid until the next library call on the same thread;
// do not free it.
const char *borel_last_error_message(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must be a pointer previously returned through a `char**` out
// parameter of this library, or NULL. It must not be used afterwards.
void borel_string_free(char *s);

// The volume of the regular ideal tetrahedron, `nu_3 = D(e^{i pi/3})`.
double borel_nu3(void);

// The sharp bound `C(n+1,3) * nu_3` on `|B_n|`. Returns 0 for n < 2.
double borel_bound(size_t n);

// Bloch-Wigner dilogarithm `D(z)` of `z = re + i*im`, written to `out`.
//
// # Safety
// `out` must be NULL or a valid pointer to a double.
int32_t borel_bloch_wigner(double re, double im, double *out);

// Signed volume of the ideal tetrahedron spanned by four boundary points.
//
// `points` holds 16 doubles: for each of the four points, its homogeneous
// coordinates (x_re, x_im, y_re, y_im). A tuple with a repeated point has
// volume exactly 0.
//
// # Safety
// `points` must be NULL or point to at least 16 doubles; `out` must be
// NULL or a valid pointer to a double.
int32_t borel_ideal_volume(const double *points, double *out);

// Builds a flag 4-tuple from explicit bases.
//
// `data` holds `4*n*n*2` doubles: four n-by-n complex matrices in
// row-major order with interleaved (re, im) entries. Column j of each
// matrix spans the j-th flag level together with the columns before it,
// so each matrix must be invertible (well-conditioned).
//
// # Safety
// `data` must be NULL or point to at least `4*n*n*2` doubles; `out` must
// be NULL or a valid pointer.
int32_t borel_flags_new(size_t n, const double *data, BorelFlags **out);

// Builds the Veronese flag 4-tuple `(V_n(p_0), ..., V_n(p_3))` of four
// boundary points, using the same 16-double point layout as
// `borel_ideal_volume`.
//
// # Safety
// `points` must be NULL or point to at least 16 doubles; `out` must be
// NULL or a valid pointer.
int32_t borel_flags_veronese(size_t n, const double *points, BorelFlags **out);

// Releases a flag handle. NULL is ignored.
//
// # Safety
// `flags` must be a handle from this library or NULL, and must not be
// used afterwards.
void borel_flags_free(BorelFlags *flags);

// Ambient dimension `n` of a flag handle; 0 if the handle is NULL.
//
// # Safety
// `flags` must be a live handle from this library or NULL.
size_t borel_flags_dimension(const BorelFlags *flags);

// Evaluates the Borel cocycle `B_n` on the tuple and writes it to `out`.
//
// # Safety
// `flags` must be a live handle from this library or NULL; `out` must be
// NULL or a valid pointer to a double.
int32_t borel_flags_value(const BorelFlags *flags, double *out);

// Classifies the tuple: writes +1 to `out` when `B_n` is within `tol` of
// `C(n+1,3)*nu_3`, -1 when within `tol` of the negated bound, 0 otherwise.
//
// # Safety
// `flags` must be a live handle from this library or NULL; `out` must be
// NULL or a valid pointer.
int32_t borel_flags_is_maximal(const BorelFlags *flags, double tol, int8_t *out);

// Runs the empirical Borel-invariant estimator on an experiment document
// and returns the report as a JSON string (same schema as the CLI's
// `invariant --output`).
//
// # Safety
// `doc_json` must be NULL or a NUL-terminated string; `params` must be
// NULL or a valid `BorelRunParams`; `out_json` must be NULL or a valid
// pointer. On success `*out_json` must be released with
// `borel_string_free`.
int32_t borel_run_invariant(const char *doc_json, const BorelRunParams *params, char **out_json);

// Certifies maximality of an experiment document's cocycle and recovers
// the trivializing map `f`, returned as a JSON string (same schema as the
// CLI's `trivialize --output`). Returns `BOREL_ERR_REFUSED` when the
// maximality certificate fails.
//
// # Safety
// Same contract as `borel_run_invariant`.
int32_t borel_run_trivialize(const char *doc_json, const BorelRunParams *params, char **out_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus
