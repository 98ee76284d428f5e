/*
 * C interface to the gcnm solver library.
 *
 * All objects are opaque handles created and destroyed by the library.
 * Functions return a gcnm_status; on failure gcnm_last_error() describes the
 * problem. The message is thread-local and valid until the next failing call
 * on the same thread.
 */
#ifndef GCNM_GCNM_H
#define GCNM_GCNM_H

#include <stddef.h>
#include <stdint.h>

#if defined(GCNM_BUILDING_LIBRARY)
#define GCNM_API __attribute__((visibility("default")))
#else
#define GCNM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gcnm_status {
  GCNM_OK = 0,
  GCNM_ERR_INVALID_ARGUMENT = 1,
  GCNM_ERR_CONFIG = 2,
  GCNM_ERR_DIMENSION = 3,
  GCNM_ERR_IO = 4,
  GCNM_ERR_PARSE = 5,
  GCNM_ERR_UNSUPPORTED = 6,
  GCNM_ERR_INTERNAL = 99
} gcnm_status;

typedef enum gcnm_termination {
  GCNM_CONVERGED = 0,
  GCNM_MAX_ITER = 1,
  GCNM_ERROR = 2
} gcnm_termination;

typedef struct gcnm_instance gcnm_instance;
typedef struct gcnm_result gcnm_result;

GCNM_API const char* gcnm_version(void);
GCNM_API const char* gcnm_status_string(gcnm_status status);
GCNM_API const char* gcnm_last_error(void);

/* ---- instances ---------------------------------------------------------- */

/* Generates an instance from key=value spec text. seed_override >= 0 replaces
   the spec's seed. */
GCNM_API gcnm_status gcnm_instance_generate(const char* spec_text, int64_t seed_override,
                                            gcnm_instance** out);
GCNM_API gcnm_status gcnm_instance_generate_file(const char* spec_path, int64_t seed_override,
                                                 gcnm_instance** out);
GCNM_API gcnm_status gcnm_instance_load(const char* path, gcnm_instance** out);
GCNM_API gcnm_status gcnm_instance_save(const gcnm_instance* inst, const char* path);
GCNM_API void gcnm_instance_free(gcnm_instance* inst);

GCNM_API int64_t gcnm_instance_dim(const gcnm_instance* inst);
/* Family name ("l0l2", "studentt", "deblur", "studentt2d"). */
GCNM_API const char* gcnm_instance_family(const gcnm_instance* inst);
GCNM_API gcnm_status gcnm_instance_set_x0(gcnm_instance* inst, const double* x0, size_t n);

/* ---- solving ------------------------------------------------------------ */

/* Unset fields keep the library defaults: NaN for reals, <= 0 for counts. */
typedef struct gcnm_options {
  double lambda;
  double sigma;
  double beta;
  double tol;
  int max_iter;
  int max_backtracks;
} gcnm_options;

GCNM_API void gcnm_options_init(gcnm_options* opts);

typedef struct gcnm_report {
  double time;
  int iter;
  double delta;
  double eta;
  int64_t nnz;
  gcnm_termination termination;
} gcnm_report;

/* solver: "pgm", "glpg", "gcnm" or "newton". A run that ends with termination
   error still returns GCNM_OK and a result; inspect the report. */
GCNM_API gcnm_status gcnm_solve(const gcnm_instance* inst, const char* solver,
                                const gcnm_options* opts, gcnm_result** out);
GCNM_API void gcnm_result_free(gcnm_result* res);

GCNM_API gcnm_status gcnm_result_report(const gcnm_result* res, gcnm_report* out);
/* Termination message ("" on convergence). */
GCNM_API const char* gcnm_result_message(const gcnm_result* res);
/* Copies min(n, cap) entries of the final iterate; returns n. */
GCNM_API size_t gcnm_result_x(const gcnm_result* res, double* buf, size_t cap);
/* Writes the per-iteration CSV (k,fbe,eta,v_norm,tau,backtracks,elapsed_s). */
GCNM_API gcnm_status gcnm_result_write_trace(const gcnm_result* res, const char* path);
/* Formats the TN,solver,time,iter,delta,eta,nnz,status row (no newline) into
   buf; returns the length needed including the terminator. */
GCNM_API size_t gcnm_result_report_row(const gcnm_result* res, const char* instance_id, char* buf,
                                       size_t cap);
GCNM_API const char* gcnm_report_header(void);

/* ---- bench & deblur ----------------------------------------------------- */

/* Runs a suite file and writes the report CSV. rows_out may be NULL. */
GCNM_API gcnm_status gcnm_bench(const char* suite_path, const char* out_csv, int threads,
                                const gcnm_options* opts, size_t* rows_out);

typedef struct gcnm_deblur_params {
  int kernel_size;
  double kernel_std;
  double noise_std;
  double mu0;
  double mu2;
  uint64_t seed;
  const char* solver; /* NULL selects gcnm */
} gcnm_deblur_params;

GCNM_API void gcnm_deblur_params_init(gcnm_deblur_params* p);

typedef struct gcnm_deblur_report {
  gcnm_report run;
  double error_observed; /* ||b - truth|| */
  double error_restored; /* ||x - truth|| */
} gcnm_deblur_report;

/* Blurs and corrupts the input image, restores it and writes the restored
   image (clamped to [0,1]) to out_pgm. observed_pgm may be NULL. */
GCNM_API gcnm_status gcnm_deblur(const char* in_pgm, const char* out_pgm, const char* observed_pgm,
                                 const gcnm_deblur_params* params, const gcnm_options* opts,
                                 gcnm_deblur_report* report);

#ifdef __cplusplus
}
#endif

#endif /* GCNM_GCNM_H */
