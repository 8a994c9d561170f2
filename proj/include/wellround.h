/* wellround: graded shortest-vector geometry of unimodular lattices,
 * closed diagonal-group orbits, and grid-scale cover certification.
 *
 * C interface to the shared library. All objects are opaque handles created
 * and destroyed through these functions; every operation returns a status
 * code and reports details through wr_last_error(). Structured results are
 * returned as JSON strings allocated by the library; release them with
 * wr_string_free().
 */

#ifndef WELLROUND_H
#define WELLROUND_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define WR_API __declspec(dllexport)
#else
#define WR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wr_status {
  WR_OK = 0,
  WR_ERR_INVALID_ARGUMENT = 1,
  WR_ERR_SINGULAR_BASIS = 2,
  WR_ERR_DIMENSION_MISMATCH = 3,
  WR_ERR_ENUM_BUDGET = 4,
  WR_ERR_NOT_WELL_ROUNDED = 5,
  WR_ERR_NOT_GENERIC_WELL_ROUNDED = 6,
  WR_ERR_RANK_DEFICIENT = 7,
  WR_ERR_INDEX_OUT_OF_RANGE = 8,
  WR_ERR_SINGULAR_MINOR = 9,
  WR_ERR_NOT_SQUAREFREE = 10,
  WR_ERR_NOT_A_COVER = 11,
  WR_ERR_UNBOUNDED_ELEMENT = 12,
  WR_ERR_HYPOTHESIS_VIOLATED = 13,
  WR_ERR_DECLARATION_FALSE = 14,
  WR_ERR_WINDOW_TOO_SMALL = 15,
  WR_ERR_PARSE = 16,
  WR_ERR_IO = 17,
  WR_ERR_UNKNOWN = 18
} wr_status;

typedef struct wr_lattice wr_lattice;
typedef struct wr_orbit wr_orbit;
typedef struct wr_cover wr_cover;

/* Library version string. */
WR_API const char* wr_version(void);

/* Message for the most recent failure on this thread. */
WR_API const char* wr_last_error(void);

/* Frees any string returned by this library. */
WR_API void wr_string_free(char* s);

/* ---- lattices and the diagonal action ---------------------------------- */

/* JSON {"dim": n, "basis": [[...], ...]}; the basis is normalized to
 * covolume 1 on load. */
WR_API wr_status wr_lattice_from_json(const char* json, wr_lattice** out);
WR_API wr_status wr_lattice_from_basis(int n, const double* row_major, wr_lattice** out);
WR_API void wr_lattice_free(wr_lattice* x);
WR_API int wr_lattice_dim(const wr_lattice* x);
WR_API wr_status wr_lattice_to_json(const wr_lattice* x, char** json_out);
/* log_coords: n values summing to zero. */
WR_API wr_status wr_lattice_apply(const wr_lattice* x, const double* log_coords,
                                  wr_lattice** out);

/* Short-vector report {"alpha", "vectors", "breakpoints"}; budget 0 means the
 * default enumeration budget. */
WR_API wr_status wr_short_vectors(const wr_lattice* x, double delta_max, uint64_t budget,
                                  char** json_out);
WR_API wr_status wr_dim_delta(const wr_lattice* x, double delta, int* out);
WR_API wr_status wr_cover_membership(const wr_lattice* x, const double* log_coords, double eps,
                                     char** json_out);
WR_API wr_status wr_is_well_rounded(const wr_lattice* x, double tol, int* out);
WR_API wr_status wr_is_generic_well_rounded(const wr_lattice* x, double tol, int* out);
WR_API wr_status wr_transversality_rank(const wr_lattice* x, int* out);
WR_API wr_status wr_spread(const wr_lattice* x, double* out);

/* ---- exterior algebra --------------------------------------------------- */

/* rows: d x n row-major independent vectors. Returns the wedge class JSON
 * {"n","d","coeffs":[{"J":[...],"c":...}]}. */
WR_API wr_status wr_wedge_of_group(int d, int n, const double* rows, char** json_out);
WR_API wr_status wr_covolume(int d, int n, const double* rows, double* out);
/* {"n": ..., "supports": [[...], ...]} -> {"dimension", "basis"} */
WR_API wr_status wr_stabilizer_subspace(const char* json, char** json_out);
/* {"n": ..., "rows": [[...], ...]} (complete chain flag) ->
 * {"nested", "codim", "satisfies", "stabilizer_dim"} */
WR_API wr_status wr_flag_analyze(const char* json, char** json_out);

/* ---- closed orbits and the well-rounded search -------------------------- */

/* {"blocks":[{"type":"unit"}|{"type":"quadratic","D":...}]} */
WR_API wr_status wr_orbit_from_spec_json(const char* json, wr_orbit** out);
WR_API wr_status wr_orbit_compact_from_quadratic(int64_t d, wr_orbit** out);
WR_API void wr_orbit_free(wr_orbit* o);
WR_API wr_status wr_orbit_to_json(const wr_orbit* o, char** json_out);
WR_API wr_status wr_orbit_lattice(const wr_orbit* o, wr_lattice** out);
/* result_json: {"a_star","lattice","spread","evaluations","converged"};
 * trace_csv_out may be NULL when no trace is wanted. */
WR_API wr_status wr_orbit_search(const wr_orbit* o, uint64_t budget, uint64_t seed,
                                 double target_tol, char** result_json, char** trace_csv_out);

/* ---- covers ------------------------------------------------------------- */

/* {"domain": {...}, "elements": [{"label","boxes":[[lo,hi],...]}...]} */
WR_API wr_status wr_cover_from_json(const char* json, wr_cover** out);
WR_API void wr_cover_free(wr_cover* c);
/* Runs the KKM check when the domain has type "kkm", otherwise the
 * multiplicity certification. heatmap_csv_out may be NULL. */
WR_API wr_status wr_cover_certify(const wr_cover* c, int check_hypotheses, char** report_json,
                                  char** heatmap_csv_out);
/* window: 2*dim values lo_1..lo_dim, hi_1..hi_dim. */
WR_API wr_status wr_cover_unfold(const wr_cover* c, const double* window, int resolution,
                                 char** report_json);
/* Triangle-fold s coordinates into the unit CFK simplex (ascending). */
WR_API wr_status wr_fold_point(int s, const double* in, double* out);

#ifdef __cplusplus
}
#endif

#endif /* WELLROUND_H */
