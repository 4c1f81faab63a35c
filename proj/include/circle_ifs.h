/* Copyright 2026 circle-ifs developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C interface to the circle-ifs library. Objects are opaque handles owned by
 * the caller and released with the matching *_free function. Functions that
 * can fail return a cifs_status; the message of the most recent failure on
 * the calling thread is available from cifs_last_error().
 */
#ifndef CIRCLE_IFS_H
#define CIRCLE_IFS_H

#include <stddef.h>
#include <stdint.h>

#if defined(CIFS_BUILDING_LIBRARY)
#define CIFS_API __attribute__((visibility("default")))
#else
#define CIFS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cifs_status {
  CIFS_OK = 0,
  CIFS_ERR_INVALID_ARGUMENT = 1,
  CIFS_ERR_CONFIG = 2,
  CIFS_ERR_CONVERGENCE = 3,
  CIFS_ERR_VERIFICATION = 4,
  CIFS_ERR_SEARCH = 5,
  CIFS_ERR_INTERNAL = 6
} cifs_status;

typedef struct cifs_map cifs_map;
typedef struct cifs_ifs cifs_ifs;
typedef struct cifs_output cifs_output;

CIFS_API const char* cifs_version(void);
CIFS_API const char* cifs_last_error(void);

/* 0 restores the default (all hardware threads). Results do not depend on it. */
CIFS_API void cifs_set_threads(int n);
CIFS_API int cifs_get_threads(void);

/* Maps from their JSON description, e.g. {"kind":"sine","a":0,"b":-0.5}. */
CIFS_API cifs_status cifs_map_from_json(const char* json, cifs_map** out);
CIFS_API void cifs_map_free(cifs_map* map);
CIFS_API cifs_status cifs_map_eval(const cifs_map* map, double x, double* out);
CIFS_API cifs_status cifs_map_deriv(const cifs_map* map, double x, double* out);
CIFS_API cifs_status cifs_map_inverse_eval(const cifs_map* map, double y, double* out);
CIFS_API cifs_status cifs_map_rotation_number(const cifs_map* map, long n_iters, double* out);

/* An IFS from n maps; the maps are copied. */
CIFS_API cifs_status cifs_ifs_create(const cifs_map* const* maps, size_t n, cifs_ifs** out);
CIFS_API void cifs_ifs_free(cifs_ifs* ifs);
/* f_{w_len} o ... o f_{w_1}(x) with 1-based letters. */
CIFS_API cifs_status cifs_ifs_branch_apply(const cifs_ifs* ifs, const int* word, size_t len, double x, double* out);

/* Runs a CLI command on a config document. Returns the process exit code
 * (0 ok, 1 config error, 2 verification failure, 3 search exhausted). When
 * out is non-null it receives the output, which must be freed. */
CIFS_API int cifs_run_command(const char* command, const char* config_json, const char* options_json,
                              cifs_output** out);
CIFS_API const char* cifs_output_text(const cifs_output* out);
CIFS_API const char* cifs_output_error(const cifs_output* out);
CIFS_API void cifs_output_free(cifs_output* out);

/* Checks a certificate (or forward/backward pair) document: returns 0 when
 * every condition verifies with positive margins, 2 otherwise, 1 if unreadable. */
CIFS_API int cifs_certificate_check(const char* certificate_json, cifs_output** out);

#ifdef __cplusplus
}
#endif

#endif /* CIRCLE_IFS_H */
