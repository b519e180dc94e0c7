// Copyright 2026 The Cologne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface of the Cologne library. Every object is an opaque handle
 * released with its matching _free function. Functions return a
 * cologne_status; on failure cologne_last_error() describes the problem.
 * Strings returned through `char**` are owned by the caller and released
 * with cologne_string_free. */

#ifndef COLOGNE_COLOGNE_H
#define COLOGNE_COLOGNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(COLOGNE_BUILDING_LIBRARY)
#define COLOGNE_API __attribute__((visibility("default")))
#else
#define COLOGNE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cologne_status {
  COLOGNE_OK = 0,
  COLOGNE_ERR_DIAGNOSTICS = 1, /* program or input has errors */
  COLOGNE_ERR_UNSAT = 2,       /* the COP has no solution */
  COLOGNE_ERR_IO = 3,          /* unreadable file, bad config or topology */
  COLOGNE_ERR_INVALID = 4,     /* null handle or bad argument */
  COLOGNE_ERR_INTERNAL = 5
} cologne_status;

typedef struct cologne_program cologne_program;
typedef struct cologne_config cologne_config;
typedef struct cologne_facts cologne_facts;
typedef struct cologne_result cologne_result;
typedef struct cologne_sim cologne_sim;

COLOGNE_API const char* cologne_version(void);
/* Message of the last failed call on this thread ("" if none). */
COLOGNE_API const char* cologne_last_error(void);
COLOGNE_API void cologne_string_free(char* s);
/* Newline-separated stems of the shipped programs. */
COLOGNE_API cologne_status cologne_shipped_programs(char** out);

/* ---- programs ---- */

COLOGNE_API cologne_status cologne_program_parse(const char* source, const char* filename, cologne_program** out);
/* Each name is a file path if it exists, otherwise a shipped program stem.
 * The sources are concatenated in order. A sibling `.conf` of the first
 * name (or the shipped configuration of a stem) becomes the default
 * configuration. */
COLOGNE_API cologne_status cologne_program_load(const char* const* names, size_t count, cologne_program** out);
COLOGNE_API void cologne_program_free(cologne_program* p);
/* Syntax, classification, safety and localization diagnostics, one per
 * line. Returns COLOGNE_ERR_DIAGNOSTICS when any error is present. */
COLOGNE_API cologne_status cologne_program_check(const cologne_program* p, char** diagnostics);
/* Tab-separated annotation table and rule classes. */
COLOGNE_API cologne_status cologne_program_explain(const cologne_program* p, char** out);
COLOGNE_API cologne_status cologne_program_print(const cologne_program* p, char** out);
/* Localized rules (shipping rules plus residuals) in Colog syntax. */
COLOGNE_API cologne_status cologne_program_localized(const cologne_program* p, char** out);
COLOGNE_API cologne_status cologne_program_default_config(const cologne_program* p, cologne_config** out);

/* ---- configuration ---- */

COLOGNE_API cologne_status cologne_config_new(cologne_config** out);
COLOGNE_API void cologne_config_free(cologne_config* c);
/* Later merges override earlier values. */
COLOGNE_API cologne_status cologne_config_merge_text(cologne_config* c, const char* text, const char* filename);
COLOGNE_API cologne_status cologne_config_merge_file(cologne_config* c, const char* path);
COLOGNE_API cologne_status cologne_config_set(cologne_config* c, const char* key, const char* value);
COLOGNE_API cologne_status cologne_config_text(const cologne_config* c, char** out);

/* ---- facts ---- */

COLOGNE_API cologne_status cologne_facts_parse(const char* text, const char* filename, cologne_facts** out);
COLOGNE_API cologne_status cologne_facts_load_file(const char* path, cologne_facts** out);
COLOGNE_API void cologne_facts_free(cologne_facts* f);
COLOGNE_API size_t cologne_facts_count(const cologne_facts* f);

/* ---- centralized evaluation and solving ---- */

/* Runs the regular rules to fixpoint and, if the program declares `var`
 * tables, grounds and solves the COP and materializes the solution.
 * Succeeds with a result even when the COP is unsat (check the status). */
COLOGNE_API cologne_status cologne_solve(const cologne_program* p, const cologne_facts* f, const cologne_config* c,
                                         cologne_result** out);
COLOGNE_API void cologne_result_free(cologne_result* r);
/* optimal, feasibleTimeout, unsat, unknown, or none (no var tables). */
COLOGNE_API const char* cologne_result_status(const cologne_result* r);
COLOGNE_API int cologne_result_objective(const cologne_result* r, int64_t* objective); /* 1 if present */
COLOGNE_API double cologne_result_solve_ms(const cologne_result* r);
COLOGNE_API uint64_t cologne_result_search_nodes(const cologne_result* r);
/* `# table <name>` followed by the table CSV, for every var table. */
COLOGNE_API cologne_status cologne_result_solution_csv(const cologne_result* r, char** out);
COLOGNE_API cologne_status cologne_result_table_csv(const cologne_result* r, const char* table, char** out);
COLOGNE_API cologne_status cologne_result_model_dump(const cologne_result* r, char** out);
/* Every visible tuple after solving, in facts-file syntax. */
COLOGNE_API cologne_status cologne_result_facts(const cologne_result* r, char** out);

/* ---- simulation ---- */

/* `topology` is the text of a topology file; facts and programs listed in
 * it are ignored here (the caller resolves them). */
COLOGNE_API cologne_status cologne_sim_new(const cologne_program* p, const char* topology, const cologne_facts* f,
                                           const cologne_config* c, uint64_t seed, cologne_sim** out);
COLOGNE_API void cologne_sim_free(cologne_sim* s);
COLOGNE_API cologne_status cologne_sim_run_until(cologne_sim* s, int64_t virtual_ms);
/* Runs until no events remain or `limit_ms` of virtual time pass. */
COLOGNE_API cologne_status cologne_sim_run_to_end(cologne_sim* s, int64_t limit_ms);
COLOGNE_API int64_t cologne_sim_now(const cologne_sim* s);
COLOGNE_API cologne_status cologne_sim_trace_csv(const cologne_sim* s, char** out);
COLOGNE_API cologne_status cologne_sim_metrics_csv(const cologne_sim* s, char** out);
/* One line per negotiation: round,time,initiator,peer,status,objective,baseline. */
COLOGNE_API cologne_status cologne_sim_rounds_csv(const cologne_sim* s, char** out);
/* node,bytes_sent,bytes_received. */
COLOGNE_API cologne_status cologne_sim_bytes_csv(const cologne_sim* s, char** out);
COLOGNE_API cologne_status cologne_sim_table_csv(const cologne_sim* s, const char* node, const char* table, char** out);

/* Newline-separated `program`, `facts` and `config` entries of a topology
 * file, its `scenario` line ("" if none) and the number of declared nodes.
 * Any output pointer may be NULL. */
COLOGNE_API cologne_status cologne_topology_inputs(const char* topology, char** programs, char** facts, char** configs,
                                                   char** scenario, size_t* nodes);

/* ---- scenarios, oracles, benchmarks ---- */

/* kind: fts | acloud | channel. params: space-separated key=value
 * (fts: n seed; acloud: hosts vms seed; channel: nodes channels topology
 * density interfaces mindiff seed). Writes facts text and, for fts and
 * channel, a topology text (either may be NULL). */
COLOGNE_API cologne_status cologne_generate(const char* kind, const char* params, char** facts, char** topology);
/* kind: fts | acloud | channel | channel2 (two-hop), same params. Prints a
 * key=value report of the exhaustive or sampled baseline. */
COLOGNE_API cologne_status cologne_oracle(const char* kind, const char* params, char** report);
/* Runs the evaluation scenarios (fts, acloud, channel, bandwidth, or all)
 * and returns a tab-separated summary table. params: quick=1 shrinks runs. */
COLOGNE_API cologne_status cologne_bench(const char* which, const char* params, char** summary);

#ifdef __cplusplus
}
#endif

#endif /* COLOGNE_COLOGNE_H */
