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

/* Exercises the C API from plain C: handles, error codes and ownership. */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "cologne/cologne.h"

static int failures = 0;

#define EXPECT(cond)                                                   \
  do {                                                                 \
    if (!(cond)) {                                                     \
      fprintf(stderr, "%s:%d: expected %s (last error: %s)\n", __FILE__, \
              __LINE__, #cond, cologne_last_error());                  \
      ++failures;                                                      \
    }                                                                  \
  } while (0)

static const char* kReach =
    "p1 path(X,Y) <- link(X,Y).\n"
    "p2 path(X,Z) <- link(X,Y), path(Y,Z).\n";

static void test_errors(void) {
  cologne_program* p = NULL;
  EXPECT(cologne_program_parse(NULL, "x", &p) == COLOGNE_ERR_INVALID);
  EXPECT(cologne_program_parse("r1 p(X) <- q(X)", "bad.clg", &p) == COLOGNE_ERR_DIAGNOSTICS);
  EXPECT(p == NULL);
  EXPECT(strstr(cologne_last_error(), "bad.clg") != NULL);

  EXPECT(cologne_program_parse("r1 p(X,Y) <- q(X).", "unsafe.clg", &p) == COLOGNE_OK);
  char* diags = NULL;
  EXPECT(cologne_program_check(p, &diags) == COLOGNE_ERR_DIAGNOSTICS);
  EXPECT(diags && strstr(diags, "unsafe rule"));
  cologne_string_free(diags);
  cologne_program_free(p);

  cologne_config* c = NULL;
  EXPECT(cologne_config_new(&c) == COLOGNE_OK);
  EXPECT(cologne_config_set(c, "no_such_key", "1") == COLOGNE_ERR_IO);
  EXPECT(cologne_config_set(c, "budget_millis", "250") == COLOGNE_OK);
  char* text = NULL;
  EXPECT(cologne_config_text(c, &text) == COLOGNE_OK);
  EXPECT(text && strstr(text, "budget_millis=250"));
  cologne_string_free(text);
  cologne_config_free(c);

  cologne_facts* f = NULL;
  EXPECT(cologne_facts_parse("vm(1,2", "bad.facts", &f) == COLOGNE_ERR_IO);
  EXPECT(cologne_facts_load_file("/nonexistent/file.facts", &f) == COLOGNE_ERR_IO);

  /* freeing NULL handles is allowed */
  cologne_program_free(NULL);
  cologne_config_free(NULL);
  cologne_facts_free(NULL);
  cologne_result_free(NULL);
  cologne_sim_free(NULL);
  cologne_string_free(NULL);
}

static void test_datalog(void) {
  cologne_program* p = NULL;
  cologne_facts* f = NULL;
  cologne_result* r = NULL;
  char* csv = NULL;
  EXPECT(cologne_program_parse(kReach, "reach.clg", &p) == COLOGNE_OK);
  EXPECT(cologne_facts_parse("link(1,2).\nlink(2,3).\n", "f", &f) == COLOGNE_OK);
  EXPECT(cologne_facts_count(f) == 2);
  EXPECT(cologne_solve(p, f, NULL, &r) == COLOGNE_OK);
  EXPECT(strcmp(cologne_result_status(r), "none") == 0);
  EXPECT(cologne_result_table_csv(r, "path", &csv) == COLOGNE_OK);
  EXPECT(csv && strstr(csv, "1,3"));
  cologne_string_free(csv);
  cologne_result_free(r);
  cologne_facts_free(f);
  cologne_program_free(p);
}

static void test_solve(void) {
  const char* names[] = {"acloud"};
  cologne_program* p = NULL;
  cologne_config* c = NULL;
  cologne_facts* f = NULL;
  cologne_result* r = NULL;
  char *facts = NULL, *topo = NULL, *csv = NULL;
  int64_t obj = -1;

  EXPECT(cologne_program_load(names, 1, &p) == COLOGNE_OK);
  EXPECT(cologne_program_default_config(p, &c) == COLOGNE_OK);
  EXPECT(cologne_generate("acloud", "hosts=2 vms=3 seed=1", &facts, &topo) == COLOGNE_OK);
  EXPECT(cologne_facts_parse(facts, "gen", &f) == COLOGNE_OK);
  EXPECT(cologne_solve(p, f, c, &r) == COLOGNE_OK);
  EXPECT(strcmp(cologne_result_status(r), "optimal") == 0);
  EXPECT(cologne_result_objective(r, &obj) == 1);
  EXPECT(obj >= 0);
  EXPECT(cologne_result_solution_csv(r, &csv) == COLOGNE_OK);
  EXPECT(csv && strstr(csv, "# table assign"));
  cologne_string_free(csv);
  EXPECT(cologne_result_model_dump(r, &csv) == COLOGNE_OK);
  EXPECT(csv && strncmp(csv, "# cologne-model v1", 18) == 0);
  cologne_string_free(csv);

  cologne_string_free(facts);
  cologne_string_free(topo);
  cologne_result_free(r);
  cologne_facts_free(f);
  cologne_config_free(c);
  cologne_program_free(p);
}

static char* run_sim(uint64_t seed) {
  const char* names[] = {"follow_the_sun", "follow_the_sun_guards"};
  cologne_program* p = NULL;
  cologne_config* c = NULL;
  cologne_facts* f = NULL;
  cologne_sim* s = NULL;
  char *facts = NULL, *topo = NULL, *trace = NULL;
  EXPECT(cologne_program_load(names, 2, &p) == COLOGNE_OK);
  EXPECT(cologne_program_default_config(p, &c) == COLOGNE_OK);
  EXPECT(cologne_config_set(c, "fixed_solve_cost_ms", "5") == COLOGNE_OK);
  EXPECT(cologne_generate("fts", "n=4 seed=3", &facts, &topo) == COLOGNE_OK);
  EXPECT(cologne_facts_parse(facts, "gen", &f) == COLOGNE_OK);
  EXPECT(cologne_sim_new(p, topo, f, c, seed, &s) == COLOGNE_OK);
  EXPECT(cologne_sim_run_to_end(s, 10000000) == COLOGNE_OK);
  EXPECT(cologne_sim_now(s) > 0);
  EXPECT(cologne_sim_trace_csv(s, &trace) == COLOGNE_OK);
  cologne_string_free(facts);
  cologne_string_free(topo);
  cologne_sim_free(s);
  cologne_facts_free(f);
  cologne_config_free(c);
  cologne_program_free(p);
  return trace;
}

static void test_sim(void) {
  char* a = run_sim(11);
  char* b = run_sim(11);
  EXPECT(a && b && strcmp(a, b) == 0);
  EXPECT(a && strstr(a, ",deliver,"));
  cologne_string_free(a);
  cologne_string_free(b);

  cologne_program* p = NULL;
  cologne_sim* s = NULL;
  EXPECT(cologne_program_parse(kReach, "reach.clg", &p) == COLOGNE_OK);
  EXPECT(cologne_sim_new(p, "node 0\nlink 0 1\n", NULL, NULL, 1, &s) == COLOGNE_ERR_IO);
  EXPECT(s == NULL);
  cologne_program_free(p);
}

int main(void) {
  EXPECT(cologne_version() && *cologne_version());
  test_errors();
  test_datalog();
  test_solve();
  test_sim();
  if (failures) {
    fprintf(stderr, "%d C API check(s) failed\n", failures);
    return 1;
  }
  printf("C API checks passed\n");
  return 0;
}
