#ifndef PD_CAPI_H
#define PD_CAPI_H

/* C interface to the probabilistic-deduction engine. All results come back
 * as heap strings (JSON, CSV, or rule text) that the caller releases with
 * pd_string_free. Errors return a nonzero status; pd_last_error gives a
 * thread-local message for the most recent failure on the calling thread.
 *
 * Options are passed as a JSON object (NULL means all defaults):
 *   mode     "owa" | "pcwa"                     default "pcwa"
 *   entropy  "none" | "linear" | "max"          default "max"
 *   solver   "sgd" | "direct" | "lp"            default depends on entropy
 *   relax    true to minimize the L1 rule violation instead of solving
 *   tol      SGD termination tolerance          default 1e-3
 *   seed     SGD shuffle seed                   default 1
 *   epsilon  labelling threshold                default 1e-4
 *   literal  query target, e.g. "s0" or "~s0"
 *   bounds   true to attach [min,max] to query results
 */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct pd_handle pd_handle;

typedef enum pd_status {
    PD_OK = 0,
    PD_ERR_PARSE = 1,    /* malformed input text */
    PD_ERR_SEMANTIC = 2, /* well-formed but unsatisfiable/unverifiable */
    PD_ERR_LIMIT = 3,    /* world cap or budget exceeded */
    PD_ERR_INVALID = 4,  /* bad arguments: null pointers, unknown names */
    PD_ERR_IO = 5        /* file access failure */
} pd_status;

const char* pd_version(void);
const char* pd_last_error(void);

pd_status pd_parse_text(const char* text, pd_handle** out);
pd_status pd_parse_file(const char* path, pd_handle** out);
void pd_handle_free(pd_handle* h);

int pd_atom_count(const pd_handle* h);
int pd_rule_count(const pd_handle* h);
pd_status pd_serialize(const pd_handle* h, char** out_text);

/* Feasibility decision. JSON: mode, feasible, rule_psat, residual,
 * n_atoms, n_rules. Infeasibility is reported in the JSON, not the status. */
pd_status pd_check(const pd_handle* h, const char* options_json,
                   char** out_json);

/* Joint distribution. JSON: mode, entropy, solver, method, converged,
 * residual, epochs, entropy_bits, l1_objective?, atoms, pi, literals. */
pd_status pd_solve(const pd_handle* h, const char* options_json,
                   char** out_json);

/* One literal's probability; optional bounds. JSON: literal, mode, entropy,
 * probability, no_deduction, bounds?. */
pd_status pd_query(const pd_handle* h, const char* options_json,
                   char** out_json);

/* Arguments, attacks, and threshold labels. JSON: mode, entropy, epsilon,
 * arguments[{id,claim,support,probability}], attacks[{attacker,attackee}],
 * labels. */
pd_status pd_arguments(const pd_handle* h, const char* options_json,
                       char** out_json);

/* Constraint matrix as CSV rows tag,b,w0..w{2^n-1}. */
pd_status pd_dump_system(const pd_handle* h, const char* options_json,
                         char** out_csv);

/* Probabilistic labelling of an attack graph. JSON: arguments,
 * probabilities, labels, epsilon, complete, residual. Returns
 * PD_ERR_SEMANTIC when the mapped rules are inconsistent or the labelling
 * fails verification (the JSON is still produced in the latter case). */
pd_status pd_label_aa(const char* aaf_text, const char* options_json,
                      char** out_json);

/* Attack graph to rule text. */
pd_status pd_convert_aa(const char* aaf_text, char** out_pd_text);

/* Benchmark. Spec JSON: n_literals, n_rules, max_body, seed, backends,
 * repetitions, include_build. Returns CSV. */
pd_status pd_bench(const char* spec_json, char** out_csv);

void pd_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PD_CAPI_H */
