#include <stdio.h>
#include <string.h>
#include "harvestlab.h"

int hl_smoke_main(double *got);

#define CHECK(x) do { HlStatus s_ = (x); if (s_ != HL_STATUS_OK) { \
    fprintf(stderr, "%s -> %d: %s\n", #x, (int)s_, hl_last_error()); return 1; } } while (0)

int hl_smoke_main(double *got) {
    HlScenario *sc = NULL;
    HlElements *el = NULL;
    HlState *st = NULL;
    HlElementValues v;
    HlComplex m[16];
    double n = -1.0;

    CHECK(hl_scenario_preset("fig2", &sc));
    CHECK(hl_elements_compute(sc, 0.0, &el));
    CHECK(hl_elements_values(el, &v));
    CHECK(hl_state_assemble(sc, el, HL_REGIME_BASELINE, &st));
    CHECK(hl_state_matrix(st, m));
    CHECK(hl_state_negativity(st, &n));
    got[0] = v.l_aa;
    got[1] = m[0].re;
    got[2] = n;

    if (hl_state_assemble(sc, el, HL_REGIME_TRANSITION, NULL) != HL_STATUS_NULL_POINTER) return 2;
    if (strlen(hl_last_error()) == 0) return 3;

    hl_state_free(st);
    hl_elements_free(el);
    hl_scenario_free(sc);
    return 0;
}
