#ifndef MRDRRT_H
#define MRDRRT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum MrdrrtStatus {
  MRDRRT_STATUS_OK = 0,
  MRDRRT_STATUS_NULL_ARGUMENT = 1,
  MRDRRT_STATUS_INVALID_UTF8 = 2,
  // Malformed JSON, invalid scenario, plan or roadmap.
  MRDRRT_STATUS_INVALID_INPUT = 3,
  // A roadmap could not be built (collision or disconnection).
  MRDRRT_STATUS_ROADMAP_FAILED = 4,
  // The search ended without a valid path. The plan handle is still
  // produced and carries the run report.
  MRDRRT_STATUS_PLAN_FAILED = 5,
  MRDRRT_STATUS_IO = 6,
  MRDRRT_STATUS_NOT_FOUND = 7,
  MRDRRT_STATUS_PANIC = 8,
} MrdrrtStatus;

// Result of a planning run.
typedef struct MrdrrtPlan MrdrrtPlan;

// A scenario and, once built, its roadmaps.
typedef struct MrdrrtScenario MrdrrtScenario;

// Planner settings. Obtain defaults from [`mrdrrt_options_default`].
typedef struct MrdrrtOptions {
  uint64_t seed;
  size_t prm_n;
  size_t prm_k;
  size_t prm_batches;
  size_t max_iterations;
  // Cartesian product instead of the tensor product.
  bool cartesian;
  bool fallback;
  // 0 disables the budget.
  uint64_t time_budget_ms;
} MrdrrtOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until
// the next failing call on the same thread.
const char *mrdrrt_last_error(void);

// Library version, static storage.
const char *mrdrrt_version(void);

struct MrdrrtOptions mrdrrt_options_default(void);

// Parses and validates a scenario from JSON.
//
// # Safety
// `json` must be a valid C string and `out` a valid pointer.
enum MrdrrtStatus mrdrrt_scenario_from_json(const char *json, struct MrdrrtScenario **out);

// Loads a scenario from a JSON file.
//
// # Safety
// `path` must be a valid C string and `out` a valid pointer.
enum MrdrrtStatus mrdrrt_scenario_load(const char *path, struct MrdrrtScenario **out);

// One of the bundled scenarios by name.
//
// # Safety
// `name` must be a valid C string and `out` a valid pointer.
enum MrdrrtStatus mrdrrt_scenario_bundled(const char *name, struct MrdrrtScenario **out);

// # Safety
// `scenario` must be null or a handle from this library, not yet freed.
void mrdrrt_scenario_free(struct MrdrrtScenario *scenario);

// Number of robots, or 0 for a null handle.
//
// # Safety
// `scenario` must be null or a live handle.
size_t mrdrrt_scenario_robot_count(const struct MrdrrtScenario *scenario);

// Scenario as JSON; free with [`mrdrrt_string_free`]. Null on failure.
//
// # Safety
// `scenario` must be null or a live handle.
char *mrdrrt_scenario_to_json(const struct MrdrrtScenario *scenario);

// Builds (or rebuilds) the per-robot roadmaps held by the handle.
//
// # Safety
// `scenario` must be a live handle and `options` null or valid; null
// options means defaults.
enum MrdrrtStatus mrdrrt_build_roadmaps(struct MrdrrtScenario *scenario,
                                        const struct MrdrrtOptions *options);

// Roadmap of one robot as JSON, or null if roadmaps are not built.
//
// # Safety
// `scenario` must be null or a live handle.
char *mrdrrt_roadmap_to_json(const struct MrdrrtScenario *scenario, size_t robot);

// Plans with the handle's roadmaps, building them first if needed. On
// `Ok` and on `PlanFailed`, `*out` receives a plan handle.
//
// # Safety
// `scenario` must be a live handle, `options` null or valid, `out` valid.
enum MrdrrtStatus mrdrrt_plan(struct MrdrrtScenario *scenario,
                              const struct MrdrrtOptions *options,
                              struct MrdrrtPlan **out);

// # Safety
// `plan` must be null or a handle from this library, not yet freed.
void mrdrrt_plan_free(struct MrdrrtPlan *plan);

// # Safety
// `plan` must be null or a live handle.
bool mrdrrt_plan_succeeded(const struct MrdrrtPlan *plan);

// Number of steps, or 0 for a null or failed plan.
//
// # Safety
// `plan` must be null or a live handle.
size_t mrdrrt_plan_step_count(const struct MrdrrtPlan *plan);

// Plan JSON, or null for a failed plan.
//
// # Safety
// `plan` must be null or a live handle.
char *mrdrrt_plan_to_json(const struct MrdrrtPlan *plan);

// Run report JSON.
//
// # Safety
// `plan` must be null or a live handle.
char *mrdrrt_plan_report_json(const struct MrdrrtPlan *plan);

// Validates plan JSON against the handle's scenario and roadmaps. Sets
// `*valid` and, if `report` is not null, `*report` to the violation report
// JSON (caller frees).
//
// # Safety
// `scenario` must be a live handle with roadmaps built, `plan_json` a
// valid C string, `valid` a valid pointer and `report` null or valid.
enum MrdrrtStatus mrdrrt_validate_plan(const struct MrdrrtScenario *scenario,
                                       const char *plan_json,
                                       bool *valid,
                                       char **report);

// SVG drawing of the scenario with an optional plan overlay.
//
// # Safety
// `scenario` must be a live handle and `plan` null or a live handle.
char *mrdrrt_render_svg(const struct MrdrrtScenario *scenario, const struct MrdrrtPlan *plan);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string from this library, not yet freed.
void mrdrrt_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MRDRRT_H */
