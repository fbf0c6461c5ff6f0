/* C interface to the free-surface flow laboratory.
 *
 * Opaque handles + status codes; every string returned as char* is owned by
 * the caller and released with fsf_string_free. On any failure the
 * thread-local message from fsf_last_error() describes the cause.
 */
#ifndef FSFLOW_H
#define FSFLOW_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fsf_status {
    FSF_OK = 0,
    FSF_ASSERT_FAIL = 1,   /* experiment ran; at least one assertion failed */
    FSF_CONFIG_ERROR = 2,  /* parse/validation/usage problem */
    FSF_RUNTIME_ERROR = 3, /* solver failure (diffeomorphism, divergence, ...) */
    FSF_INVALID_ARGUMENT = 4
} fsf_status;

typedef struct fsf_config fsf_config;
typedef struct fsf_report fsf_report;

const char* fsf_version(void);
const char* fsf_last_error(void);
void fsf_string_free(char* s);

/* configuration ---------------------------------------------------------- */
fsf_config* fsf_config_create(void);
void fsf_config_free(fsf_config* cfg);
fsf_status fsf_config_load(fsf_config* cfg, const char* path);
fsf_status fsf_config_set(fsf_config* cfg, const char* key, const char* value);
fsf_status fsf_config_validate(fsf_config* cfg);
int fsf_config_num_warnings(const fsf_config* cfg);
const char* fsf_config_warning(const fsf_config* cfg, int i);
char* fsf_config_dump(const fsf_config* cfg);

/* experiments ------------------------------------------------------------ */
/* Runs the configured experiment, writing CSV artifacts under out_dir.
 * Returns FSF_OK when every assertion passed, FSF_ASSERT_FAIL when the
 * report contains failures (the report is still returned), other codes on
 * configuration or runtime errors (*out_report left null). */
fsf_status fsf_run_experiment(const fsf_config* cfg, const char* out_dir, fsf_report** out_report);

/* reports ------------------------------------------------------------------ */
void fsf_report_free(fsf_report* rep);
int fsf_report_all_pass(const fsf_report* rep);
int fsf_report_num_entries(const fsf_report* rep);
const char* fsf_report_entry_name(const fsf_report* rep, int i);
double fsf_report_entry_value(const fsf_report* rep, int i);
double fsf_report_entry_threshold(const fsf_report* rep, int i);
int fsf_report_entry_pass(const fsf_report* rep, int i);
int fsf_report_num_artifacts(const fsf_report* rep);
const char* fsf_report_artifact(const fsf_report* rep, int i);
char* fsf_report_text(const fsf_report* rep);

#ifdef __cplusplus
}
#endif

#endif /* FSFLOW_H */
