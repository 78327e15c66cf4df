#ifndef CARNOT_H
#define CARNOT_H

/* C interface to the carnot library. Every function returns a status code; on
   failure carnot_last_error() describes the problem (per thread). Strings
   returned through out-parameters are released with carnot_free_string. */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(CARNOT_BUILDING_LIBRARY)
#define CARNOT_API __attribute__((visibility("default")))
#else
#define CARNOT_API
#endif

typedef enum carnot_status {
  CARNOT_OK = 0,
  CARNOT_ERR_INTERNAL = 1,
  CARNOT_ERR_PARSE = 2,
  CARNOT_ERR_VALIDATION = 3,
  CARNOT_ERR_RESOURCE = 4,
  CARNOT_ERR_NO_CERTIFIED_PATH = 5
} carnot_status;

typedef struct carnot_algebra carnot_algebra;
typedef struct carnot_element carnot_element;

CARNOT_API const char* carnot_version(void);
CARNOT_API const char* carnot_last_error(void);
CARNOT_API void carnot_free_string(char* s);

/* Runs a named command ("mul", "ccdist", "repro", ...) on a JSON request and
   returns the JSON or CSV document in *response. */
CARNOT_API carnot_status carnot_execute(const char* command, const char* request_json, char** response);
/* Newline-separated list of command names. */
CARNOT_API carnot_status carnot_commands(char** names);

/* "free:r:s", "heisenberg", "amalgam:i", "abelian:d1,d2,..." */
CARNOT_API carnot_status carnot_algebra_create(const char* id, carnot_algebra** out);
CARNOT_API void carnot_algebra_free(carnot_algebra* alg);
CARNOT_API int carnot_algebra_dim(const carnot_algebra* alg);
CARNOT_API int carnot_algebra_step(const carnot_algebra* alg);

CARNOT_API carnot_status carnot_element_identity(const carnot_algebra* alg, carnot_element** out);
/* {"algebra_id": ..., "coords": [[index, "p/q"], ...]} */
CARNOT_API carnot_status carnot_element_from_json(const char* json, carnot_element** out);
CARNOT_API carnot_status carnot_element_to_json(const carnot_element* x, char** json);
CARNOT_API carnot_status carnot_element_mul(const carnot_element* x, const carnot_element* y, carnot_element** out);
CARNOT_API carnot_status carnot_element_inverse(const carnot_element* x, carnot_element** out);
CARNOT_API carnot_status carnot_element_dilate(const char* lambda, const carnot_element* x, carnot_element** out);
CARNOT_API int carnot_element_equal(const carnot_element* x, const carnot_element* y);
CARNOT_API void carnot_element_free(carnot_element* x);

#ifdef __cplusplus
}
#endif

#endif
