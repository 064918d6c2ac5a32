#include <stdio.h>
#include <string.h>
#include "chipfire.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s\n", #cond); return 1; } } while (0)

int main(void) {
    char *count = NULL;
    CHECK(cf_kappa(2, 3, &count) == CF_STATUS_OK);
    CHECK(strcmp(count, "56") == 0);
    cf_string_free(count);

    CfStrategy *s = NULL;
    CHECK(cf_strategy_from_name("unbundle", &s) == CF_STATUS_OK);
    CfPermutation *p = NULL;
    CHECK(cf_simulate(2, 3, s, &p) == CF_STATUS_OK);
    const uint32_t expect[] = {1, 5, 3, 7, 2, 6, 4, 8};
    CHECK(cf_permutation_len(p) == 8);
    CHECK(memcmp(cf_permutation_data(p), expect, sizeof expect) == 0);

    uint64_t inv = 0;
    CHECK(cf_inversions(cf_permutation_data(p), cf_permutation_len(p), &inv) == CF_STATUS_OK);
    CHECK(inv == 8);
    cf_permutation_free(p);
    cf_strategy_free(s);

    CHECK(cf_strategy_from_name("sideways", &s) == CF_STATUS_INVALID_ARGUMENT);
    CHECK(cf_last_error() != NULL);

    CfReport *r = NULL;
    CHECK(cf_max_lds(2, 3, 1, true, &r) == CF_STATUS_OK);
    CHECK(cf_report_value(r) == 3);
    cf_report_free(r);
    puts("ok");
    return 0;
}
