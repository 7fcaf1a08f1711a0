#ifndef ATLAS_ATLAS_H
#define ATLAS_ATLAS_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define ATLAS_API __attribute__((visibility("default")))
#else
#define ATLAS_API
#endif

/* Every call returns 0 on success and -1 on failure; the failure detail is
   kept per thread and read back with atlas_last_error_*. */

enum atlas_error {
  ATLAS_OK = 0,
  ATLAS_E_INVALID_ARGUMENT,
  ATLAS_E_NON_FINITE_PARAMETER,
  ATLAS_E_OUTSIDE_DOMAIN,
  ATLAS_E_DEGENERATE_PARAMETER,
  ATLAS_E_NO_CYCLE_FOUND,
  ATLAS_E_PERIOD_CAP_EXCEEDED,
  ATLAS_E_NO_CONVERGENCE,
  ATLAS_E_DERIVATIVE_SINGULAR,
  ATLAS_E_ORBIT_HIT_POLE,
  ATLAS_E_NO_ROOT_IN_RANGE,
  ATLAS_E_BISECTION_FAILED,
  ATLAS_E_REFINEMENT_DIVERGED,
  ATLAS_E_NOT_IN_PETAL,
  ATLAS_E_DEPTH_EXHAUSTED,
  ATLAS_E_CUSP_REACHED,
  ATLAS_E_CONTINUATION_STALLED,
  ATLAS_E_NOT_ESCAPING,
  ATLAS_E_SPLIT_POINTS_NOT_FOUND,
  ATLAS_E_SEEDING_FAILED,
  ATLAS_E_AMBIGUOUS_TAG,
  ATLAS_E_OUT_OF_WORLD,
  ATLAS_E_UNKNOWN_FIGURE,
  ATLAS_E_IO,
  ATLAS_E_INTERNAL
};

typedef struct atlas_session atlas_session;

ATLAS_API int atlas_session_new(atlas_session** out);
ATLAS_API void atlas_session_free(atlas_session* s);

/* keys: "threads", "cache_dir", "max_zoom", "job_workers" */
ATLAS_API int atlas_set_option(atlas_session* s, const char* key, const char* value);

ATLAS_API int atlas_last_error_code(void);
ATLAS_API const char* atlas_last_error_message(void);

/* Strings handed out by the library are released with atlas_free_string. */
ATLAS_API void atlas_free_string(char* p);

/* Classification record as JSON. tier may be NULL (standard). */
ATLAS_API int atlas_classify(atlas_session* s, const char* family, const char* param,
                             const char* tier, char** json_out);

/* Runs an analysis request synchronously:
   {"kind": "arc-trace"|"visibility"|"scan"|"phase", "family", "center", ...} */
ATLAS_API int atlas_analyze(atlas_session* s, const char* request_json, char** json_out);

/* plane: "param" or "dyn"; anchor is the parameter for "dyn", else NULL.
   Writes the PNG and the metadata document; either path may be NULL. */
ATLAS_API int atlas_render(atlas_session* s, const char* family, const char* plane,
                           const char* anchor, const char* center, double scale, int width,
                           int height, const char* tier, const char* png_path,
                           const char* meta_path);

/* One 256x256 tile; PNG bytes in *png_out (length *len_out), ETag in *etag_out. */
ATLAS_API int atlas_render_tile(atlas_session* s, const char* family, const char* plane,
                                const char* anchor, int zoom, long long x, long long y,
                                const char* tier, char** png_out, long* len_out,
                                char** etag_out);

/* Writes <id>.png and <id>.meta.json; *json_out lists the paths. */
ATLAS_API int atlas_figure(atlas_session* s, const char* id, const char* outdir,
                           char** json_out);
/* Newline-separated figure ids. */
ATLAS_API int atlas_figure_ids(char** out);

/* Blocking HTTP server. */
ATLAS_API int atlas_serve(atlas_session* s, const char* host, int port);

#ifdef __cplusplus
}
#endif

#endif
