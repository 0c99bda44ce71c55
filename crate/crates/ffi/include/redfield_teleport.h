#ifndef REDFIELD_TELEPORT_H
#define REDFIELD_TELEPORT_H

#include <stddef.h>
#include <stdint.h>

typedef enum RtStatus {
  RT_STATUS_OK = 0,
  RT_STATUS_NULL_POINTER = 1,
  RT_STATUS_INVALID_PARAMETER = 2,
  RT_STATUS_PHASE_BOUNDARY = 3,
  RT_STATUS_NON_POSITIVE_TRANSITION_FREQUENCY = 4,
  RT_STATUS_DIVERGENT_OCCUPATION = 5,
  RT_STATUS_DEGENERATE_STEADY_STATE = 6,
  RT_STATUS_POSITIVITY_VIOLATION = 7,
  RT_STATUS_INVALID_STATE = 8,
  RT_STATUS_PHASE_DOMAIN = 9,
  RT_STATUS_NOT_X_FORM = 10,
  RT_STATUS_SPECTRUM_ERROR = 11,
  RT_STATUS_DOMAIN_ERROR = 12,
  RT_STATUS_NO_BRACKET = 13,
  RT_STATUS_SCHEMA_ERROR = 14,
  RT_STATUS_SEMANTIC_ERROR = 15,
  RT_STATUS_IO_ERROR = 16,
  RT_STATUS_PANIC = 17,
} RtStatus;

typedef struct RtLiouvillian RtLiouvillian;

/**
 * Density matrix of the pair in the local basis.
 */
typedef struct RtState RtState;

typedef struct RtSystem {
  double epsilon_a;
  double epsilon_b;
  double lambda;
} RtSystem;

/**
 * 0 = bosonic, 1 = fermionic.
 */
typedef struct RtReservoir {
  int32_t statistics;
  double temperature;
  double mu;
  double gamma;
} RtReservoir;

typedef struct RtComplex {
  double re;
  double im;
} RtComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error of this thread into `buf` (NUL terminated, truncated
 * to `len`) and returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t rt_last_error_message(char *buf, size_t len);

/**
 * Static NUL-terminated version string.
 */
const char *rt_version(void);

/**
 * # Safety
 * Pointers must be valid; `out` receives a handle to free with `rt_liouvillian_free`.
 */
enum RtStatus rt_liouvillian_new(const struct RtSystem *system,
                                 const struct RtReservoir *reservoir_a,
                                 const struct RtReservoir *reservoir_b,
                                 struct RtLiouvillian **out);

/**
 * # Safety
 * `l` must be null or a handle from `rt_liouvillian_new` not freed before.
 */
void rt_liouvillian_free(struct RtLiouvillian *l);

/**
 * Unique steady state. A negative `positivity_tol` selects the default.
 *
 * # Safety
 * `l` must be a live handle; `out` receives a state handle.
 */
enum RtStatus rt_steady_state(const struct RtLiouvillian *l,
                              double positivity_tol,
                              struct RtState **out);

/**
 * State after time `t` under the generator `l`.
 *
 * # Safety
 * `l` and `rho` must be live handles; `out` receives a new state handle.
 */
enum RtStatus rt_propagate(const struct RtLiouvillian *l,
                           const struct RtState *rho,
                           double t,
                           double positivity_tol,
                           struct RtState **out);

/**
 * Validated state from 16 row-major local-basis entries.
 *
 * # Safety
 * `entries` must point to 16 `RtComplex` values.
 */
enum RtStatus rt_state_from_matrix(const struct RtComplex *entries, struct RtState **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum RtStatus rt_state_bell(uint8_t m, uint8_t n, struct RtState **out);

/**
 * Writes the 16 row-major local-basis entries.
 *
 * # Safety
 * `rho` must be a live handle and `out` point to 16 writable `RtComplex`.
 */
enum RtStatus rt_state_matrix(const struct RtState *rho, struct RtComplex *out);

/**
 * # Safety
 * `rho` must be null or a state handle not freed before.
 */
void rt_state_free(struct RtState *rho);

/**
 * Maximal average teleportation fidelity of the resource.
 *
 * # Safety
 * `rho` must be a live handle and `out` valid.
 */
enum RtStatus rt_fmax(const struct RtState *rho, double *out);

/**
 * # Safety
 * `rho` must be a live handle and `out` valid.
 */
enum RtStatus rt_concurrence(const struct RtState *rho, double *out);

/**
 * Fidelity of protocol (m, n) for the input with Bloch angles θ, φ.
 *
 * # Safety
 * `rho` must be a live handle and `out` valid.
 */
enum RtStatus rt_teleport_fidelity(const struct RtState *rho,
                                   double theta,
                                   double phi,
                                   uint8_t m,
                                   uint8_t n,
                                   double *out);

/**
 * Bloch-sphere average of protocol (m, n); closed form on X states,
 * quadrature of the given order otherwise (0 selects the default).
 *
 * # Safety
 * `rho` must be a live handle and `out` valid.
 */
enum RtStatus rt_average_fidelity(const struct RtState *rho,
                                  uint8_t m,
                                  uint8_t n,
                                  uint32_t order,
                                  double *out);

/**
 * Protocol with the best average fidelity.
 *
 * # Safety
 * `rho` must be a live handle; `m` and `n` valid.
 */
enum RtStatus rt_select_protocol(const struct RtState *rho, uint32_t order, uint8_t *m, uint8_t *n);

/**
 * Bose-Einstein or Fermi-Dirac occupation at frequency `omega`.
 *
 * # Safety
 * `r` and `out` must be valid.
 */
enum RtStatus rt_occupation(double omega, const struct RtReservoir *r, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REDFIELD_TELEPORT_H */
