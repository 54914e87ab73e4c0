/* Minimal C client: build UP1 for the Hadamard gate and print its stats. */
#include <math.h>
#include <stdio.h>

#include "parapulse.h"

int main(void) {
    const double pi = 3.14159265358979323846;
    PpSequence *seq = NULL;
    if (pp_synth_gate("UP1", 0, "PC", 0.0, pi / 2, pi, &seq) != PP_STATUS_OK) {
        fprintf(stderr, "synth failed: %s\n", pp_last_error_message());
        return 1;
    }
    PpStats st;
    pp_stats(seq, 5.0, &st);

    PpQuaternion h = {0.0, sqrt(0.5), 0.0, sqrt(0.5)};
    PpErrorParams err = {0.01, 0.0, 0.0};
    double f = 0.0, slope = 0.0;
    int32_t order = -1;
    pp_avg_gate_fidelity(seq, h, err, 0.0, 5.0, &f);
    pp_suppression_order(seq, h, PP_AXIS_EPSILON, &slope, &order);

    char *text = NULL;
    pp_sequence_to_text(seq, &text);
    printf("%s", text);
    printf("k=%zu T=%.6f F=%.12f order=%d\n", st.k, st.t, f, order);

    PpSequence *bad = NULL;
    int status = pp_sequence_from_text("scheme: XX\n", &bad);
    printf("bad status=%d (%s)\n", status, pp_last_error_message());

    pp_string_free(text);
    pp_sequence_free(seq);
    return (st.k == 5 && order == 1 && status == PP_STATUS_PARSE) ? 0 : 2;
}
