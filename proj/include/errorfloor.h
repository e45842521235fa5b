/* C API for the errorfloor library: LDPC error-floor analysis via
 * instanton search, computational-tree verification and Monte-Carlo FER.
 *
 * Handles are opaque; every function returns an ef_status. On any non-zero
 * status, ef_last_error() returns a thread-local description. */
#ifndef ERRORFLOOR_H
#define ERRORFLOOR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct ef_graph ef_graph;

typedef enum ef_status {
    EF_OK = 0,
    EF_ERR_INVALID_ARGUMENT = 1,
    EF_ERR_PARSE = 2,            /* malformed alist / JSON input */
    EF_ERR_SHAPE_MISMATCH = 3,
    EF_ERR_NO_FAILURE = 4,       /* search found no failing configuration */
    EF_ERR_DEGENERATE_TIE = 5,   /* min-selection tie at probed point */
    EF_ERR_DEPTH_CAP = 6,
    EF_ERR_NOT_A_CODEWORD = 7,
    EF_ERR_IO = 8,
    EF_ERR_RUNTIME = 9
} ef_status;

const char* ef_last_error(void);

/* --- code graphs --- */
ef_status ef_graph_tanner155(ef_graph** out);
ef_status ef_graph_margulis(int p, ef_graph** out);
ef_status ef_graph_parse_alist(const char* text, ef_graph** out);
ef_status ef_graph_load_alist(const char* path, ef_graph** out);
void ef_graph_free(ef_graph* g);

int ef_graph_n_bits(const ef_graph* g);
int ef_graph_n_checks(const ef_graph* g);
ef_status ef_graph_rank(const ef_graph* g, int* rank_out);

/* Serializes to the canonical alist text; free with ef_string_free. */
ef_status ef_graph_write_alist(const ef_graph* g, char** text_out);
void ef_string_free(char* s);

/* --- decoding --- */
/* llr has length n_bits; hard_out (length n_bits, entries +-1) and
 * failed_out may be NULL when not wanted. */
ef_status ef_decode(const ef_graph* g, const double* llr, int n, int n_iterations,
                    int tie_is_error, int8_t* hard_out, int* failed_out);

/* --- channel helpers --- */
ef_status ef_instanton_length_sq(const double* x, int n, double* out);
ef_status ef_fer_asymptote(double l_sq, double s, double* out);

/* --- experiments --- */
/* Runs a JSON experiment manifest (same schema the CLI builds). Returns the
 * run summary in *summary_out (free with ef_string_free) when non-NULL. */
ef_status ef_run_manifest(const char* manifest_json, char** summary_out);
ef_status ef_run_manifest_file(const char* path, char** summary_out);

#ifdef __cplusplus
}
#endif

#endif /* ERRORFLOOR_H */
