#ifndef HARVESTLAB_H
#define HARVESTLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_UTF8 = 2,
  HL_STATUS_INVALID_SCENARIO = 3,
  HL_STATUS_DOMAIN = 4,
  HL_STATUS_CONVERGENCE = 5,
  HL_STATUS_UNSUPPORTED = 6,
  HL_STATUS_DEGENERATE = 7,
  HL_STATUS_INCONSISTENT_REGIME = 8,
  HL_STATUS_NUMERICAL = 9,
  HL_STATUS_IO = 10,
  HL_STATUS_PANIC = 11,
} HlStatus;

typedef enum HlRegime {
  HL_REGIME_BASELINE = 0,
  HL_REGIME_NON_SELECTIVE = 1,
  HL_REGIME_NON_ORTHOGONAL = 2,
  HL_REGIME_ORTHOGONAL = 3,
  HL_REGIME_TRANSITION = 4,
} HlRegime;

typedef struct HlElements HlElements;

typedef struct HlScenario HlScenario;

typedef struct HlState HlState;

typedef struct HlComplex {
  double re;
  double im;
} HlComplex;

/*
 Matrix elements of a scenario, in the same units as the coupling.
 */
typedef struct HlElementValues {
  double l_aa;
  double l_bb;
  double l_cc;
  struct HlComplex l_ab;
  struct HlComplex l_ac;
  struct HlComplex l_bc;
  struct HlComplex m_ab;
  struct HlComplex m_ac;
  struct HlComplex m_bc;
} HlElementValues;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread; empty after a
 successful call. Valid until the next call on the same thread.
 */
const char *hl_last_error(void);

/*
 Parses a scenario from JSON.

 # Safety
 `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HlStatus hl_scenario_from_json(const char *json, struct HlScenario **out);

/*
 Base scenario of a figure preset ("fig2", "fig7", ...).

 # Safety
 `fig` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HlStatus hl_scenario_preset(const char *fig, struct HlScenario **out);

/*
 Overrides the coupling; validated when elements are computed.

 # Safety
 `s` must come from this library and not have been freed.
 */
enum HlStatus hl_scenario_set_coupling(struct HlScenario *s, double coupling);

/*
 Sets the selective measurement strength and phase.

 # Safety
 `s` must come from this library and not have been freed.
 */
enum HlStatus hl_scenario_set_measurement(struct HlScenario *s, double epsilon, double xi);

/*
 Forces a regime instead of the classification by epsilon.

 # Safety
 `s` must come from this library and not have been freed.
 */
enum HlStatus hl_scenario_force_regime(struct HlScenario *s, enum HlRegime regime);

/*
 Scenario as JSON. Free the string with [`hl_string_free`].

 # Safety
 `s` must come from this library; `out` must be a valid pointer.
 */
enum HlStatus hl_scenario_to_json(const struct HlScenario *s, char **out);

/*
 # Safety
 `s` must be null or come from [`hl_scenario_to_json`], freed once.
 */
void hl_string_free(char *s);

/*
 # Safety
 `s` must be null or a scenario from this library, freed once.
 */
void hl_scenario_free(struct HlScenario *s);

/*
 Computes all matrix elements of a scenario. `rel_tol` <= 0 selects the
 default tolerance.

 # Safety
 `s` must come from this library; `out` must be a valid pointer.
 */
enum HlStatus hl_elements_compute(const struct HlScenario *s,
                                  double rel_tol,
                                  struct HlElements **out);

/*
 # Safety
 `e` must come from this library; `out` must be a valid pointer.
 */
enum HlStatus hl_elements_values(const struct HlElements *e, struct HlElementValues *out);

/*
 # Safety
 `e` must be null or elements from this library, freed once.
 */
void hl_elements_free(struct HlElements *e);

/*
 Two-detector state under `regime`.

 # Safety
 `s` and `e` must come from this library; `out` must be a valid pointer.
 */
enum HlStatus hl_state_assemble(const struct HlScenario *s,
                                const struct HlElements *e,
                                enum HlRegime regime,
                                struct HlState **out);

/*
 Copies the density matrix, row-major over gg, ge, eg, ee.

 # Safety
 `st` must come from this library; `out` must point to 16 HlComplex.
 */
enum HlStatus hl_state_matrix(const struct HlState *st, struct HlComplex *out);

/*
 Negativity of the state from the partial-transpose eigenvalues.

 # Safety
 `st` must come from this library; `out` must be a valid pointer.
 */
enum HlStatus hl_state_negativity(const struct HlState *st, double *out);

/*
 # Safety
 `st` must be null or a state from this library, freed once.
 */
void hl_state_free(struct HlState *st);

/*
 Library version, static.
 */
const char *hl_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARVESTLAB_H */
