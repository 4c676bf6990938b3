#include <math.h>
#include <stdio.h>
#include "randpovm.h"

#define CHECK(x)                                                   \
    do {                                                           \
        if ((x) != RP_STATUS_OK) {                                 \
            char msg[256];                                         \
            rp_last_error(msg, sizeof msg);                        \
            fprintf(stderr, "%s failed: %s\n", #x, msg);           \
            return 1;                                              \
        }                                                          \
    } while (0)

int main(void) {
    double e0[2] = {1.0, 0.0}, e1[2] = {0.0, 1.0};
    RpDensity *a = NULL, *b = NULL;
    CHECK(rp_density_from_pure(2, e0, NULL, &a));
    CHECK(rp_density_from_pure(2, e1, NULL, &b));

    double trace, frob;
    CHECK(rp_density_distances(a, b, &trace, &frob));
    if (fabs(trace - 2.0) > 1e-12 || fabs(frob - sqrt(2.0)) > 1e-12) return 2;

    RpPovm *p = NULL;
    CHECK(rp_povm_random(2, 3, 7, 0, &p));
    size_t outcomes, dim;
    CHECK(rp_povm_shape(p, &outcomes, &dim));
    if (outcomes != 7 || dim != 2) return 3;

    double pa[7], pb[7], tv;
    CHECK(rp_measure(p, a, pa, 7));
    CHECK(rp_measure(p, b, pb, 7));
    CHECK(rp_total_variation(pa, pb, 7, &tv));
    if (!(tv > 0.0 && tv <= 2.0)) return 4;

    RpGroup *g = NULL;
    if (rp_group_new("nonsense", &g) != RP_STATUS_BAD_DESCRIPTOR) return 5;
    CHECK(rp_group_new("dihedral:4", &g));
    size_t order, subgroups;
    CHECK(rp_group_shape(g, &order, &subgroups));
    if (order != 8 || subgroups != 10) return 6;

    printf("ok tv=%.6f\n", tv);
    rp_group_free(g);
    rp_povm_free(p);
    rp_density_free(a);
    rp_density_free(b);
    return 0;
}
