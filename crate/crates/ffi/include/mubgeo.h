#ifndef MUBGEO_H
#define MUBGEO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Basis label of the computational basis.
 */
#define MUBGEO_BASIS_CB -1

typedef enum MubgeoGeometryKind {
  MUBGEO_GEOMETRY_KIND_APG = 0,
  MUBGEO_GEOMETRY_KIND_DAPG = 1,
  MUBGEO_GEOMETRY_KIND_FPP = 2,
} MubgeoGeometryKind;

typedef enum MubgeoProtocol {
  MUBGEO_PROTOCOL_MEAN_KING = 0,
  MUBGEO_PROTOCOL_TRACKING = 1,
} MubgeoProtocol;

typedef enum MubgeoStatus {
  MUBGEO_STATUS_OK = 0,
  MUBGEO_STATUS_NOT_ODD_PRIME = 1,
  MUBGEO_STATUS_INVALID_ARGUMENT = 2,
  MUBGEO_STATUS_INVALID_INPUT = 3,
  MUBGEO_STATUS_INVARIANT_FAILURE = 4,
  MUBGEO_STATUS_NULL_POINTER = 5,
  MUBGEO_STATUS_BUFFER_TOO_SMALL = 6,
  MUBGEO_STATUS_PANIC = 7,
} MubgeoStatus;

/**
 * Opaque simulator with precomputed states.
 */
typedef struct MubgeoGame MubgeoGame;

/**
 * Opaque incidence structure.
 */
typedef struct MubgeoGeometry MubgeoGeometry;

typedef struct MubgeoSummary {
  uint64_t rounds;
  uint64_t correct;
  uint64_t undetermined;
  double failure_rate;
} MubgeoSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Free with
 * [`mubgeo_string_free`].
 */
char *mubgeo_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mubgeo_string_free(char *s);

/**
 * Whether `d` is an odd prime.
 */
bool mubgeo_is_odd_prime(uint64_t d);

/**
 * Builds a geometry; free it with [`mubgeo_geometry_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MubgeoStatus mubgeo_geometry_new(enum MubgeoGeometryKind kind,
                                      uint64_t d,
                                      struct MubgeoGeometry **out);

/**
 * # Safety
 * `g` must come from [`mubgeo_geometry_new`] and not have been freed.
 */
void mubgeo_geometry_free(struct MubgeoGeometry *g);

/**
 * # Safety
 * `g` must be a live geometry handle.
 */
size_t mubgeo_geometry_num_points(const struct MubgeoGeometry *g);

/**
 * # Safety
 * `g` must be a live geometry handle.
 */
size_t mubgeo_geometry_num_lines(const struct MubgeoGeometry *g);

/**
 * # Safety
 * `g` must be a live geometry handle and `out` valid.
 */
enum MubgeoStatus mubgeo_geometry_is_member(const struct MubgeoGeometry *g,
                                            size_t point,
                                            size_t line,
                                            bool *out);

/**
 * Runs every axiom for the geometry's kind; `out` receives whether all passed.
 *
 * # Safety
 * `g` must be a live geometry handle and `out` valid.
 */
enum MubgeoStatus mubgeo_geometry_check_axioms(const struct MubgeoGeometry *g, bool *out);

/**
 * JSON export; free with [`mubgeo_string_free`]. NULL on a null handle.
 *
 * # Safety
 * `g` must be a live geometry handle.
 */
char *mubgeo_geometry_to_json(const struct MubgeoGeometry *g);

/**
 * MUB vector `|m;b⟩` into `out` (`2d` doubles).
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum MubgeoStatus mubgeo_mub_state(uint64_t d, int32_t b, uint32_t m, double *out, size_t len);

/**
 * Projector `|m;b⟩⟨m;b|` into `out` (`2d²` doubles).
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum MubgeoStatus mubgeo_projector(uint64_t d, int32_t b, uint32_t m, double *out, size_t len);

/**
 * Line operator `L_(m̈, m₀)` of family `(r, s)` into `out` (`2d²` doubles);
 * `(1, 0)` is the symmetric family.
 *
 * # Safety
 * `out` must hold `len` doubles.
 */
enum MubgeoStatus mubgeo_line_operator(uint64_t d,
                                       uint32_t r,
                                       uint32_t s,
                                       uint32_t m_ddot,
                                       uint32_t m0,
                                       double *out,
                                       size_t len);

/**
 * Wigner table of the density matrix `rho` (`2d²` doubles) into `out`
 * (`d²` doubles, `m̈` outer). Fails with `InvalidInput` unless `rho` is
 * Hermitian, unit-trace and positive semidefinite within `tol`.
 *
 * # Safety
 * `rho` must hold `rho_len` doubles and `out` must hold `len` doubles.
 */
enum MubgeoStatus mubgeo_wigner(uint64_t d,
                                const double *rho,
                                size_t rho_len,
                                double tol,
                                double *out,
                                size_t len);

/**
 * Radon transform of a Wigner table (`d²` doubles) into `out`
 * (`d(d+1)` doubles): `d` values per basis, computational basis first.
 *
 * # Safety
 * `w` must hold `w_len` doubles and `out` must hold `len` doubles.
 */
enum MubgeoStatus mubgeo_radon(uint64_t d, const double *w, size_t w_len, double *out, size_t len);

/**
 * Prepares a retrodiction game; free with [`mubgeo_game_free`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MubgeoStatus mubgeo_game_new(enum MubgeoProtocol protocol,
                                  uint64_t d,
                                  struct MubgeoGame **out);

/**
 * # Safety
 * `g` must come from [`mubgeo_game_new`] and not have been freed.
 */
void mubgeo_game_free(struct MubgeoGame *g);

/**
 * Plays `rounds` seeded rounds, King basis uniform per round.
 *
 * # Safety
 * `g` must be a live game handle and `out` valid.
 */
enum MubgeoStatus mubgeo_game_run(const struct MubgeoGame *g,
                                  uint64_t rounds,
                                  uint64_t seed,
                                  struct MubgeoSummary *out);

/**
 * Runs the invariant suite for `d`; `out` receives whether every check passed.
 * On failure the first failing check is reported by [`mubgeo_last_error`].
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum MubgeoStatus mubgeo_selftest(uint64_t d, bool *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MUBGEO_H */
