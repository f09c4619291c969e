/* C interface to the simulation library. All functions are thread-safe with
 * respect to distinct run handles; the last-error buffer is thread-local. */
#ifndef REMLAB_H
#define REMLAB_H

#ifdef _WIN32
#define REMLAB_API __declspec(dllexport)
#else
#define REMLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by remlab_run_*. */
enum {
    REMLAB_OK = 0,
    REMLAB_ERR_CONFIG = 2,   /* invalid configuration */
    REMLAB_ERR_RESOURCE = 3, /* size/budget cap exceeded */
    REMLAB_ERR_INTERNAL = 4
};

typedef struct remlab_run remlab_run;

REMLAB_API const char* remlab_version(void);

/* Runs the experiment described by INI-style config text. On success (and on
 * experiment-level failure) *out receives a handle; it is NULL only when
 * allocation fails. The return value is the status code. */
REMLAB_API int remlab_run_text(const char* config_text, remlab_run** out);
REMLAB_API int remlab_run_file(const char* path, remlab_run** out);

/* Accessors; returned strings live as long as the handle. */
REMLAB_API int remlab_run_status(const remlab_run* run);
REMLAB_API const char* remlab_run_records_jsonl(const remlab_run* run);
REMLAB_API const char* remlab_run_records_csv(const remlab_run* run);
REMLAB_API const char* remlab_run_summary_json(const remlab_run* run);
REMLAB_API const char* remlab_run_digest(const remlab_run* run); /* 16 hex chars */

REMLAB_API void remlab_run_destroy(remlab_run* run);

/* Message for the most recent failing call on this thread ("" if none). */
REMLAB_API const char* remlab_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* REMLAB_H */
