/* C interface to the time-domain caching library.
 *
 * Every function returns a tdc_status. On failure the message is available from
 * tdc_last_error() on the same thread until the next failing call. Objects are
 * opaque handles released with their matching *_free function; passing NULL to
 * a *_free function is a no-op. Structured results are returned as text
 * handles holding JSON or CSV. */
#ifndef TDCACHE_TDCACHE_H
#define TDCACHE_TDCACHE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TDC_API __declspec(dllexport)
#else
#define TDC_API __attribute__((visibility("default")))
#endif

typedef enum tdc_status {
  TDC_OK = 0,
  TDC_INVALID_ARGUMENT = 1,
  TDC_DOMAIN_ERROR = 2,
  TDC_INFEASIBLE = 3,
  TDC_PRECONDITION = 4,
  TDC_CONFIG_ERROR = 5,
  TDC_INTERNAL_ERROR = 6
} tdc_status;

typedef struct tdc_text tdc_text;
typedef struct tdc_rdi tdc_rdi;
typedef struct tdc_curve tdc_curve;
typedef struct tdc_flow tdc_flow;
typedef struct tdc_overall tdc_overall;

TDC_API const char* tdc_version(void);
TDC_API const char* tdc_status_name(tdc_status status);
TDC_API const char* tdc_last_error(void);

/* Text results. */
TDC_API const char* tdc_text_data(const tdc_text* text);
TDC_API size_t tdc_text_size(const tdc_text* text);
TDC_API void tdc_text_free(tdc_text* text);

/* Request-delay distributions. JSON accepts a preset name ("p1".."p10") or an
 * object such as {"family": "uniform", "params": [0, 2], "transforms": [...]}. */
TDC_API tdc_status tdc_rdi_from_json(const char* json, tdc_rdi** out);
TDC_API tdc_status tdc_rdi_preset(const char* name, tdc_rdi** out);
TDC_API void tdc_rdi_free(tdc_rdi* rdi);
TDC_API tdc_status tdc_rdi_moments(const tdc_rdi* rdi, double* undemand_prob, double* mean_delay,
                                   double* t_inf, double* t_sup);
TDC_API tdc_status tdc_rdi_cdf(const tdc_rdi* rdi, double x, double* out);
TDC_API tdc_status tdc_rdi_quantile(const tdc_rdi* rdi, double z, double* out);
TDC_API tdc_status tdc_hit_ratio(const tdc_rdi* rdi, double max_time, double* out);
TDC_API tdc_status tdc_mean_caching_time(const tdc_rdi* rdi, double max_time, double* out);
TDC_API tdc_status tdc_rate_cost(const tdc_rdi* rdi, double r, double* out);

/* Rate-cost curve with its lower convex envelope. grid <= 0 uses the default. */
TDC_API tdc_status tdc_curve_build(const tdc_rdi* rdi, int grid, tdc_curve** out);
TDC_API void tdc_curve_free(tdc_curve* curve);
TDC_API tdc_status tdc_curve_envelope(const tdc_curve* curve, double r, double* out);
/* JSON: classification, alpha, r_sup, s_sup, asymptotic, vertices, pieces. */
TDC_API tdc_status tdc_curve_summary_json(const tdc_curve* curve, tdc_text** out);
/* CSV columns r, s_static, s_envelope, classification on `points` grid points. */
TDC_API tdc_status tdc_curve_csv(const tdc_curve* curve, int points, tdc_text** out);
/* CSV of envelope pieces: kind, r0, s0, r1, s1, slope. */
TDC_API tdc_status tdc_curve_pieces_csv(const tdc_curve* curve, tdc_text** out);
TDC_API tdc_status tdc_curve_policy_json(const tdc_curve* curve, double r, tdc_text** out);

/* Flows. JSON accepts "pi1".."pi3", {"preset": ..., "arrival_rate": ...} or an
 * explicit {"classes": [{"label", "weight", "rdi"}], ...}. */
TDC_API tdc_status tdc_flow_from_json(const char* json, tdc_flow** out);
TDC_API void tdc_flow_free(tdc_flow* flow);
TDC_API tdc_status tdc_flow_feasible_sup(const tdc_flow* flow, double* out);
TDC_API tdc_status tdc_flow_arrival_rate(const tdc_flow* flow, double* out);
/* use_lp != 0 selects the greedy linear-program allocator. */
TDC_API tdc_status tdc_allocate_json(const tdc_flow* flow, double r_target, int use_lp,
                                     tdc_text** out);

/* Overall best hit ratio versus mean caching time. */
TDC_API tdc_status tdc_overall_build(const tdc_flow* flow, tdc_overall** out);
TDC_API void tdc_overall_free(tdc_overall* overall);
TDC_API tdc_status tdc_overall_r_breve(const tdc_overall* overall, double s, double* out);
TDC_API tdc_status tdc_overall_s_star(const tdc_overall* overall, double r, double* out);
/* CSV columns s, r_breve on `points` costs from 0 to s_sup (or the largest
 * tabulated cost when s_sup is infinite). */
TDC_API tdc_status tdc_overall_csv(const tdc_overall* overall, int points, tdc_text** out);

/* Blocking. */
TDC_API tdc_status tdc_erlang_b(double servers, double load, double* out);
TDC_API tdc_status tdc_diffusion_blocking(double servers, double load, double peakedness,
                                          double* out);
TDC_API tdc_status tdc_blocking_upper_bound(double servers, double load, double c2, double* out);

/* Finite buffer of L slots. */
TDC_API tdc_status tdc_finite_hit_ratio(const tdc_overall* overall, double L, double s,
                                        double arrival_rate, double c2, double* out);
TDC_API tdc_status tdc_optimize_json(const tdc_flow* flow, const tdc_overall* overall, double L,
                                     double arrival_rate, double c2, tdc_text** out);

/* Exact discriminant sweep for 6 <= L <= max_L. */
TDC_API tdc_status tdc_qc_verify_json(unsigned max_L, unsigned threads, tdc_text** out);
/* Exact rational as "num/den". */
TDC_API tdc_status tdc_qc_discriminant(unsigned L, unsigned l, tdc_text** out);

/* Simulation from a JSON config; replications > 1 merge independent seeds. */
TDC_API tdc_status tdc_simulate_json(const char* config_json, unsigned replications,
                                     unsigned threads, int include_ecdf, tdc_text** out);

/* Controllers against a simulated Poisson environment at the flow's arrival
 * rate. trace_csv has columns epoch, beta, S_hat (or R_hat), stderr, window. */
TDC_API tdc_status tdc_control_infinite(const tdc_flow* flow, double target_storage, uint64_t seed,
                                        tdc_text** trace_csv, tdc_text** summary_json);
TDC_API tdc_status tdc_control_finite(const tdc_flow* flow, unsigned L, uint64_t seed,
                                      tdc_text** trace_csv, tdc_text** summary_json);

/* Acceptance criteria. ids is a comma-separated list or NULL for all.
 * all_passed receives 1 when every selected criterion passed. */
TDC_API tdc_status tdc_validate_json(uint64_t seed, unsigned threads, double erlang_perturbation,
                                     const char* ids, int* all_passed, tdc_text** out);
/* Figure reproduction. The JSON holds {"preset", "passed", "verdicts",
 * "files": [{"name", "content"}]}. */
TDC_API tdc_status tdc_reproduce_json(const char* preset, uint64_t seed, unsigned threads,
                                      int run_checks, int* passed, tdc_text** out);

#ifdef __cplusplus
}
#endif

#endif
