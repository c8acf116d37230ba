#include <stdio.h>
#include "spinforge.h"

int main(void) {
    SfParams *p = sf_params_default();
    SfGateReport r;
    if (sf_gate_report(p, "sq_two_piece", 0.25, 0, &r) != SF_STATUS_OK) {
        fprintf(stderr, "%s\n", sf_last_error_message());
        return 1;
    }
    if (sf_gate_report(p, "bogus", 0.25, 0, &r) != SF_STATUS_UNKNOWN_TAG) {
        return 2;
    }
    sf_params_free(p);
    printf("%.9f %.3f\n", r.fidelity, r.gate_time_ns);
    return r.fidelity > 0.99999 ? 0 : 3;
}
