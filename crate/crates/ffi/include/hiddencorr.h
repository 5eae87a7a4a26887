#ifndef HIDDENCORR_H
#define HIDDENCORR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_NULL_POINTER = 1,
  // Argument outside its domain.
  HC_STATUS_DOMAIN = 2,
  // Matrix is not a valid density matrix.
  HC_STATUS_INVALID_STATE = 3,
  // Eigen-iteration, fit or conditional probability failed.
  HC_STATUS_NUMERICAL = 4,
  // The criterion never changes sign on p ∈ [0, 1].
  HC_STATUS_NO_THRESHOLD = 5,
  HC_STATUS_PANIC = 99,
} HcStatus;

typedef enum HcFilter {
  HC_FILTER_NONE = 0,
  HC_FILTER_F = 1,
  HC_FILTER_G = 2,
} HcFilter;

typedef enum HcCriterion {
  HC_CRITERION_ENTANGLED = 0,
  HC_CRITERION_BELL_NONLOCAL = 1,
  HC_CRITERION_STEERABLE = 2,
  HC_CRITERION_UNSTEER_CERTIFIED = 3,
  HC_CRITERION_HIDDEN_STEER_F = 4,
  HC_CRITERION_HIDDEN_STEER_G = 5,
  HC_CRITERION_HIDDEN_BELL_F = 6,
  HC_CRITERION_HIDDEN_BELL_G = 7,
} HcCriterion;

typedef enum HcMethod {
  HC_METHOD_CLOSED_FORM = 0,
  HC_METHOD_BISECTION = 1,
} HcMethod;

// Opaque validated two-qubit density matrix.
typedef struct HcState HcState;

typedef struct HcExperimentConfig {
  double p;
  double theta;
  enum HcFilter filter;
  uint64_t n_per_setting;
  double accidentals;
  uint64_t sets;
  double fidelity;
  uint64_t seed;
  bool subtract_accidentals;
} HcExperimentConfig;

typedef struct HcExperimentSummary {
  double s_mean;
  double s_std;
  double s_sem;
  double t_mean;
  double t_std;
  double t_sem;
  double tu_mean;
  double tu_std;
  double tu_sem;
  double s_exact;
  double t_exact;
  double tu_exact;
  double success_prob;
} HcExperimentSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds ρ(p, θ). `theta` in (0, π/4], `p` in [0, 1].
//
// # Safety
// `out` must be valid for a pointer write.
enum HcStatus hc_state_noisy(double p, double theta, struct HcState **out);

// Validates a row-major 4×4 matrix given as separate real and imaginary arrays of 16.
//
// # Safety
// `re` and `im` must each point to 16 readable doubles; `out` must be writable.
enum HcStatus hc_state_from_matrix(const double *re, const double *im, struct HcState **out);

// Copies the matrix row-major into two arrays of 16 doubles.
//
// # Safety
// `state` must be a live handle; `re_out` and `im_out` must hold 16 doubles each.
enum HcStatus hc_state_matrix(const struct HcState *state, double *re_out, double *im_out);

// Releases a handle. NULL is ignored.
//
// # Safety
// `state` must be NULL or a handle not yet freed.
void hc_state_free(struct HcState *state);

// Applies diag(a0, a1) ⊗ diag(b0, b1) and renormalizes; writes the new
// handle and the success probability relative to the normalized filter.
//
// # Safety
// `state` must be a live handle; `out` must be writable; `success_prob` may be NULL.
enum HcStatus hc_filter_apply(const struct HcState *state,
                              double a0,
                              double a1,
                              double b0,
                              double b1,
                              struct HcState **out,
                              double *success_prob);

// Applies the named filter built for Schmidt angle `theta`.
//
// # Safety
// As for [`hc_filter_apply`].
enum HcStatus hc_filter_named(const struct HcState *state,
                              enum HcFilter filter,
                              double theta,
                              struct HcState **out,
                              double *success_prob);

// # Safety
// `state` must be a live handle; `out` must be writable.
enum HcStatus hc_concurrence(const struct HcState *state, double *out);

// Maximal CHSH value 2√(Γ₁ + Γ₂).
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum HcStatus hc_horodecki_s(const struct HcState *state, double *out);

// Steering parameter with Alice measuring σz then σx.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum HcStatus hc_steering_t(const struct HcState *state, double *out);

// Unsteerability certificate T_U of ρ(p, θ).
//
// # Safety
// `out` must be writable.
enum HcStatus hc_unsteerability_tu(double p, double theta, double *out);

// θ = arccot √γ for γ ≥ 1.
//
// # Safety
// `out` must be writable.
enum HcStatus hc_gamma_to_theta(double gamma, double *out);

// Critical p of `criterion` at `gamma`. Returns `NoThreshold` when the
// criterion never switches on [0, 1].
//
// # Safety
// `out` must be writable.
enum HcStatus hc_threshold_p(enum HcCriterion criterion,
                             double gamma,
                             enum HcMethod method,
                             double *out);

// Runs the counting experiment and writes the per-set statistics.
//
// # Safety
// `config` must be readable; `out` must be writable.
enum HcStatus hc_experiment_run(const struct HcExperimentConfig *config,
                                struct HcExperimentSummary *out);

// Message of the last failing call on this thread; empty if none.
// The pointer stays valid until the next failing call on this thread.
const char *hc_last_error(void);

// Library version as a static NUL-terminated string.
const char *hc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HIDDENCORR_H */
