#include <math.h>
#include <stdio.h>
#include "redfield_teleport.h"

#define CHECK(call)                                                        \
    do {                                                                   \
        RtStatus st = (call);                                              \
        if (st != RT_STATUS_OK) {                                          \
            char msg[256];                                                 \
            rt_last_error_message(msg, sizeof msg);                        \
            fprintf(stderr, "%s failed (%d): %s\n", #call, (int)st, msg);  \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    RtSystem sys = {10.0, 10.0, 30.0};
    RtReservoir r = {0, 2.0, 0.0, 0.0078539816};
    RtLiouvillian *l = NULL;
    RtState *rho = NULL;
    double fmax = 0.0, c = 0.0;
    uint8_t m = 9, n = 9;

    CHECK(rt_liouvillian_new(&sys, &r, &r, &l));
    CHECK(rt_steady_state(l, -1.0, &rho));
    CHECK(rt_fmax(rho, &fmax));
    CHECK(rt_concurrence(rho, &c));
    CHECK(rt_select_protocol(rho, 0, &m, &n));
    printf("fmax=%.12f concurrence=%.12f protocol=%u%u\n", fmax, c, m, n);

    r.temperature = -1.0;
    RtLiouvillian *bad = NULL;
    if (rt_liouvillian_new(&sys, &r, &r, &bad) != RT_STATUS_INVALID_PARAMETER || bad != NULL) {
        fprintf(stderr, "negative temperature accepted\n");
        return 1;
    }
    rt_state_free(rho);
    rt_liouvillian_free(l);
    return (m == 1 && n == 1 && fmax > 2.0 / 3.0) ? 0 : 1;
}
