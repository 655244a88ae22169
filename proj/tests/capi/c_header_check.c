/* Compiled as C so the public header stays valid C. */
#include <ddmetrics/ddmetrics.h>

int ddm_c_header_check(void) {
    double f = 0.0;
    ddm_ensemble cfg;
    ddm_ensemble_default(&cfg);
    if (ddm_filter(3.14159265358979, 1, &f) != DDM_OK) return 1;
    return cfg.qubits >= 1 && f > 1.9 ? 0 : 2;
}
