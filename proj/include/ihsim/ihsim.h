#ifndef IHSIM_IHSIM_H
#define IHSIM_IHSIM_H

#include <stddef.h>

#if defined(IHSIM_BUILDING_LIBRARY)
#define IHSIM_API __attribute__((visibility("default")))
#else
#define IHSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every function returns one of these. */
enum {
  IHSIM_OK = 0,
  IHSIM_ERROR_INVALID_ARGUMENT = -1,
  IHSIM_ERROR_NULL_POINTER = -2,
  IHSIM_ERROR_PARSE = -3,
  IHSIM_ERROR_VALIDATION = -4,
  IHSIM_ERROR_IO = -5,
  IHSIM_ERROR_SOLVER = -6,
  IHSIM_ERROR_CHECK_FAILED = -7,
  IHSIM_ERROR_INSUFFICIENT_BUFFER = -8,
  IHSIM_ERROR_UNKNOWN = -100
};

/* Field selectors for ihsim_simulation_field. theta and z live on the
   workpiece vertices, A and A_t on all vertices, joule on workpiece triangles. */
enum {
  IHSIM_FIELD_THETA = 0,
  IHSIM_FIELD_Z = 1,
  IHSIM_FIELD_A = 2,
  IHSIM_FIELD_A_T = 3,
  IHSIM_FIELD_JOULE = 4
};

typedef struct ihsim_config_struct* ihsim_config_t;
typedef struct ihsim_simulation_struct* ihsim_simulation_t;
typedef struct ihsim_report_struct* ihsim_report_t;

/* Message of the last failure on the calling thread ("" if none). */
IHSIM_API const char* ihsim_last_error(void);
IHSIM_API const char* ihsim_error_description(int status);

IHSIM_API int ihsim_config_load(ihsim_config_t* cfg, const char* path);
IHSIM_API int ihsim_config_parse(ihsim_config_t* cfg, const char* text);
IHSIM_API int ihsim_config_destroy(ihsim_config_t cfg);

IHSIM_API int ihsim_simulation_create(ihsim_simulation_t* sim, ihsim_config_t cfg);
IHSIM_API int ihsim_simulation_step(ihsim_simulation_t sim);
/* Runs the remaining steps and writes timeseries.csv, snapshots and summary.json. */
IHSIM_API int ihsim_simulation_run(ihsim_simulation_t sim, const char* out_dir, int quiet);
IHSIM_API int ihsim_simulation_time(ihsim_simulation_t sim, double* t, int* step, int* steps_total);
/* Copies a field into out. With out == NULL only *len is set. */
IHSIM_API int ihsim_simulation_field(ihsim_simulation_t sim, int field, double* out, size_t* len);
/* JSON audit summary of the current state. */
IHSIM_API int ihsim_simulation_summary(ihsim_simulation_t sim, ihsim_report_t* report);
IHSIM_API int ihsim_simulation_destroy(ihsim_simulation_t sim);

/* Checks producing a report. */
IHSIM_API int ihsim_verify(ihsim_report_t* report);
IHSIM_API int ihsim_skin_depth(ihsim_report_t* report, double frequency, double sigma, double mu);
IHSIM_API int ihsim_stability_probe(ihsim_report_t* report, ihsim_config_t cfg, const double* eps, size_t n_eps,
                                    int perturb_theta0);
IHSIM_API int ihsim_compare_freq(ihsim_report_t* report, ihsim_config_t cfg, int quiet);

/* Copies the JSON text including the terminating NUL. On a short buffer
   *len is set to the required size and IHSIM_ERROR_INSUFFICIENT_BUFFER is returned. */
IHSIM_API int ihsim_report_json(ihsim_report_t report, char* out, size_t* len);
IHSIM_API int ihsim_report_passed(ihsim_report_t report, int* passed);
IHSIM_API int ihsim_report_destroy(ihsim_report_t report);

#ifdef __cplusplus
}
#endif

#endif
