#ifndef DOMAIN_RDM_H
#define DOMAIN_RDM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DrStatus {
  DR_STATUS_OK = 0,
  DR_STATUS_NULL_POINTER = 1,
  DR_STATUS_INVALID_ARGUMENT = 2,
  DR_STATUS_VALIDATION = 3,
  DR_STATUS_NOT_REPRESENTABLE = 4,
  DR_STATUS_NEGATIVE_OCCUPATION = 5,
  DR_STATUS_TOO_LARGE = 6,
  DR_STATUS_BUFFER_TOO_SMALL = 7,
  DR_STATUS_PANIC = 8,
} DrStatus;

/**
 * Validated domain overlap matrices.
 */
typedef struct DrDomainSet DrDomainSet;

/**
 * Validated spin-free 1-RDM.
 */
typedef struct DrOneRdm DrOneRdm;

/**
 * Validated 2-RDM, flattened in `(i,k,j,l)` order.
 */
typedef struct DrTwoRdm DrTwoRdm;

/**
 * Representability summary. Finding magnitudes are 0 when absent.
 */
typedef struct DrReport {
  /**
   * 1 if representable.
   */
  int representable;
  double min_eigenvalue;
  double max_eigenvalue;
  double trace;
  double hermiticity_deviation;
  double negative_eigenvalue;
  double pauli_violation;
  double trace_mismatch;
  double non_hermitian;
} DrReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread (empty after success).
 * Valid until the next call into this library on the same thread.
 */
const char *dr_last_error(void);

const char *dr_version(void);

/**
 * Validates an `m × m` row-major 1-RDM for `n_electrons` electrons.
 *
 * # Safety
 * `data` must point to `m*m` doubles; `out` must be writable.
 */
enum DrStatus dr_one_rdm_new(const double *data,
                             size_t m,
                             size_t n_electrons,
                             struct DrOneRdm **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, freed once.
 */
void dr_one_rdm_free(struct DrOneRdm *p);

/**
 * # Safety
 * `p` must be a valid handle.
 */
size_t dr_one_rdm_dim(const struct DrOneRdm *p);

/**
 * Copies the 1-RDM into `out` (row-major, `m*m`).
 *
 * # Safety
 * `p` must be a valid handle; `out` must hold `out_len` doubles.
 */
enum DrStatus dr_one_rdm_matrix(const struct DrOneRdm *p, double *out, size_t out_len);

/**
 * Validates an `m⁴` 2-RDM against `one`.
 *
 * # Safety
 * `data` must point to `len` doubles; `one` must be a valid handle.
 */
enum DrStatus dr_two_rdm_new(const double *data,
                             size_t len,
                             const struct DrOneRdm *one,
                             struct DrTwoRdm **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, freed once.
 */
void dr_two_rdm_free(struct DrTwoRdm *p);

/**
 * Exact ground state of a Hubbard chain. Either output handle may be null.
 *
 * # Safety
 * Non-null pointers must be writable.
 */
enum DrStatus dr_hubbard_fci(size_t n_sites,
                             size_t n_electrons,
                             double t,
                             double u,
                             int periodic,
                             double *energy,
                             struct DrOneRdm **out_one,
                             struct DrTwoRdm **out_two);

/**
 * Builds a domain set from `count` row-major `m × m` overlap matrices
 * stored back to back. Domains are labelled "1".."count".
 *
 * # Safety
 * `data` must point to `count*m*m` doubles.
 */
enum DrStatus dr_domain_set_new(const double *data,
                                size_t count,
                                size_t m,
                                struct DrDomainSet **out);

/**
 * Site-block domains from a spec such as "1,2;3,4" (1-based).
 *
 * # Safety
 * `blocks` must be a NUL-terminated string.
 */
enum DrStatus dr_site_domains(size_t n_sites, const char *blocks, struct DrDomainSet **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, freed once.
 */
void dr_domain_set_free(struct DrDomainSet *p);

/**
 * # Safety
 * `p` must be a valid handle.
 */
size_t dr_domain_set_len(const struct DrDomainSet *p);

/**
 * Symmetric restriction `D^{1/2} S D^{1/2}` of domain `index`, written
 * row-major into `out`.
 *
 * # Safety
 * Handles must be valid; `out` must hold `out_len` doubles.
 */
enum DrStatus dr_symmetric_restrict(const struct DrOneRdm *one,
                                    const struct DrDomainSet *set,
                                    size_t index,
                                    double *out,
                                    size_t out_len);

/**
 * Domain-averaged hole matrix of domain `index`, written row-major.
 *
 * # Safety
 * Handles must be valid; `out` must hold `out_len` doubles.
 */
enum DrStatus dr_dafh(const struct DrOneRdm *one,
                      const struct DrTwoRdm *two,
                      const struct DrDomainSet *set,
                      size_t index,
                      double *out,
                      size_t out_len);

/**
 * Checks an `m × m` row-major matrix. Pass NaN as `expected_trace` to
 * skip the trace test. Returns `DR_STATUS_NOT_REPRESENTABLE` (with the
 * report filled in) when any finding is raised.
 *
 * # Safety
 * `data` must point to `m*m` doubles; `out` must be writable.
 */
enum DrStatus dr_check(const double *data,
                       size_t m,
                       double expected_trace,
                       double tol,
                       struct DrReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DOMAIN_RDM_H */
