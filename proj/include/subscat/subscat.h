/* C interface to the scattering library. All handles are opaque; every call
 * returns a status code and leaves a message in subscat_last_error() when it
 * fails. Units: hbar = m = 1, E = k^2 / 2. */
#ifndef SUBSCAT_SUBSCAT_H
#define SUBSCAT_SUBSCAT_H

#include <stddef.h>

#if defined(SUBSCAT_BUILDING_LIBRARY)
#define SUBSCAT_API __attribute__((visibility("default")))
#else
#define SUBSCAT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum subscat_status {
  SUBSCAT_OK = 0,
  SUBSCAT_INVALID_ARGUMENT = 1, /* null pointer or size mismatch */
  SUBSCAT_DOMAIN = 2,           /* precondition violated */
  SUBSCAT_NUMERICAL = 3,        /* tolerance or resolution check failed */
  SUBSCAT_AMBIGUOUS = 4,        /* branch selection ambiguous */
  SUBSCAT_UNDEFINED = 5,        /* quantity undefined (e.g. reflection time at R = 0) */
  SUBSCAT_INTERNAL = 6
} subscat_status;

typedef enum subscat_subprocess { SUBSCAT_TRANSMISSION = 0, SUBSCAT_REFLECTION = 1 } subscat_subprocess;

typedef struct subscat_barrier subscat_barrier;
typedef struct subscat_evolution subscat_evolution;

SUBSCAT_API const char* subscat_version(void);
/* Message of the last failed call on this thread ("" if none). */
SUBSCAT_API const char* subscat_last_error(void);
/* 0 selects the hardware concurrency. */
SUBSCAT_API void subscat_set_workers(unsigned workers);

/* ---- barriers ---- */
SUBSCAT_API int subscat_barrier_rectangular(double a, double b, double height, subscat_barrier** out);
/* Full mirror-symmetric segment list starting at a. */
SUBSCAT_API int subscat_barrier_segments(double a, const double* widths, const double* heights, size_t count,
                                         subscat_barrier** out);
/* Left half; the mirror image is appended. */
SUBSCAT_API int subscat_barrier_symmetric(double a, const double* widths, const double* heights, size_t count,
                                          subscat_barrier** out);
SUBSCAT_API void subscat_barrier_free(subscat_barrier* barrier);

typedef struct subscat_barrier_info {
  double a;
  double b;
  double center;
  double min_height;
  double max_height;
  size_t segments;
  int has_wells;
} subscat_barrier_info;
SUBSCAT_API int subscat_barrier_describe(const subscat_barrier* barrier, subscat_barrier_info* out);

/* ---- stationary states ---- */
typedef struct subscat_amplitudes {
  double t_re, t_im; /* A_T */
  double r_re, r_im; /* A_R */
  double transmission;
  double reflection;
  double unitarity_residual;
} subscat_amplitudes;

SUBSCAT_API int subscat_solve(const subscat_barrier* barrier, double k, subscat_amplitudes* out);
/* Same amplitudes from the Numerov oracle at the given resolution. */
SUBSCAT_API int subscat_numerov(const subscat_barrier* barrier, double k, double points_per_wavelength,
                                subscat_amplitudes* out);
/* Full stationary field at sorted points xs[0..n). */
SUBSCAT_API int subscat_field(const subscat_barrier* barrier, double k, const double* xs, size_t n, double* re,
                              double* im);

typedef struct subscat_decomposition {
  double k;
  double a_tr_in_re, a_tr_in_im;
  double a_ref_in_re, a_ref_in_im;
  double a_ref_r_re, a_ref_r_im;
  double transmission;
  double reflection;
  double selected_at_center; /* |Psi_ref(x_c)| / peak, chosen branch */
  double rejected_at_center;
  double propagation_mismatch;
  double sum_residual;     /* |A_tr_In + A_ref_In - 1| */
  double modulus_residual; /* max(||A_tr_In| - |A_T||, ||A_ref_In| - |A_R||) */
  int degenerate;
} subscat_decomposition;

SUBSCAT_API int subscat_decompose(const subscat_barrier* barrier, double k, subscat_decomposition* out);
/* Masked sub-states psi_tr, psi_ref and Psi_full on a sorted grid that
 * extends past [a, b]; the sub-state invariants are checked. Any output
 * pointer may be NULL. */
SUBSCAT_API int subscat_substates(const subscat_barrier* barrier, double k, const double* xs, size_t n,
                                  double* full_re, double* full_im, double* tr_re, double* tr_im, double* ref_re,
                                  double* ref_im);

/* ---- wave packets ---- */
typedef struct subscat_packet {
  double x0;
  double sigma;
  double k0;
  size_t k_points; /* 0 selects 2048 */
} subscat_packet;

typedef struct subscat_evolution_info {
  size_t k_nodes; /* positive nodes actually used */
  double dk;
  double raw_norm;
  double negative_fraction;
  double tail_ratio;
  double transmission; /* sum w |G|^2 T(k) */
  double reflection;
  double max_speed;
  double center;
} subscat_evolution_info;

typedef struct subscat_grid {
  double origin;
  double dx;
  size_t points;
} subscat_grid;

typedef struct subscat_snapshot_scalars {
  double t;
  double norm;
  double transmitted;
  double reflected;
  double overlap_re;
  double overlap_im;
} subscat_snapshot_scalars;

/* Checks the packet preconditions against the barrier without building the
 * evolution; fills info->dk, raw_norm, negative_fraction, tail_ratio when
 * info is non-null. */
SUBSCAT_API int subscat_packet_validate(const subscat_barrier* barrier, const subscat_packet* packet,
                                        subscat_evolution_info* info);
SUBSCAT_API int subscat_evolution_create(const subscat_barrier* barrier, const subscat_packet* packet,
                                         subscat_evolution** out);
SUBSCAT_API void subscat_evolution_free(subscat_evolution* evolution);
SUBSCAT_API int subscat_evolution_info_get(const subscat_evolution* evolution, subscat_evolution_info* out);
/* Positive k-nodes, k_nodes entries. */
SUBSCAT_API int subscat_evolution_ks(const subscat_evolution* evolution, double* out);
/* Grid covering the packet up to |t| <= t_max with x_c as a node. */
SUBSCAT_API int subscat_evolution_grid(const subscat_evolution* evolution, double t_max, double dx,
                                       subscat_grid* out);
/* Fields at time t (arrays of grid->points entries, each may be NULL) and
 * their inner products. */
SUBSCAT_API int subscat_evolution_snapshot(const subscat_evolution* evolution, double t, const subscat_grid* grid,
                                           double* full_re, double* full_im, double* tr_re, double* tr_im,
                                           double* ref_re, double* ref_im, subscat_snapshot_scalars* out);
/* Norm difference between the k-grid and every other node; fails with
 * SUBSCAT_NUMERICAL above 1e-4. drift may be NULL. */
SUBSCAT_API int subscat_evolution_check_resolution(const subscat_evolution* evolution, double t,
                                                   const subscat_grid* grid, double* drift);
/* Crank-Nicolson run from t_begin compared with the synthesis at
 * `checkpoints` times; times and l2 hold checkpoints entries. */
SUBSCAT_API int subscat_evolution_oracle_compare(const subscat_evolution* evolution, double t_begin, double t_end,
                                                 double dx, double dt, size_t checkpoints, double* times,
                                                 double* l2);

/* ---- times ---- */
SUBSCAT_API int subscat_dwell_time(const subscat_barrier* barrier, double k, int subprocess, double* out);
/* Per-node dwell times of the packet grid (NaN where undefined). */
SUBSCAT_API int subscat_evolution_dwell_table(const subscat_evolution* evolution, int subprocess, double* out);

typedef struct subscat_phase_time {
  double k;
  double transmission_delay;
  double traversal;
  double reflection_delay;
} subscat_phase_time;
SUBSCAT_API int subscat_phase_time_at(const subscat_barrier* barrier, double k, subscat_phase_time* out);

typedef struct subscat_time_options {
  int has_domain;
  double x_lo, x_hi;
  int has_window;
  double t_lo, t_hi;
  double rel_tol;   /* 0 selects 1e-8 */
  double threshold; /* 0 selects 1e-10 */
} subscat_time_options;

typedef struct subscat_larmor_result {
  double norm; /* spectral T or R */
  double route_a;
  double t_lo, t_hi;
  double tail;
  size_t evaluations;
  int monotone;
  double route_b_printed_re, route_b_printed_im;
  double weight_norm_printed_re, weight_norm_printed_im;
  double route_b_squared;
  double weight_norm_squared;
  double residual_printed;
  double residual_squared;
} subscat_larmor_result;

/* options may be NULL. */
SUBSCAT_API int subscat_larmor_time(const subscat_evolution* evolution, int subprocess,
                                    const subscat_time_options* options, subscat_larmor_result* out);

/* ---- Larmor clock ---- */
typedef struct subscat_clock_reading {
  double omega;
  double theta_t, theta_r;
  double tau_t, tau_r;
  double sz_t, sz_r;
  double inplane_t, inplane_r;
} subscat_clock_reading;

typedef struct subscat_clock_result {
  double tau_tr, error_tr;
  int stable_tr, contracting_tr;
  double largest_change_tr;
  double tau_ref, error_ref; /* NaN when the packet is not reflected */
  int stable_ref, contracting_ref;
  double largest_change_ref;
  int perturbative_warning;
} subscat_clock_result;

/* readings holds count entries. */
SUBSCAT_API int subscat_clock(const subscat_barrier* barrier, const subscat_packet* packet, const double* omegas,
                              size_t count, subscat_clock_reading* readings, subscat_clock_result* out);
SUBSCAT_API int subscat_clock_time_at(const subscat_barrier* barrier, double omega, double k, double* out);

#ifdef __cplusplus
}
#endif

#endif
