/* cc smoke.c -I../../include -L../../../../target/debug -lrpd_ffi -o smoke */
#include <stdio.h>
#include "rpd.h"

int main(void) {
    const double w[] = {10.0, 3.0, 3.0, 0.0};
    ptrdiff_t col_of_row[2];
    double total;
    if (rpd_max_weight_matching(w, 2, 2, 2, &total, col_of_row) != RPD_STATUS_OK) {
        fprintf(stderr, "%s\n", rpd_last_error());
        return 1;
    }
    printf("total=%g rows->cols=%td,%td\n", total, col_of_row[0], col_of_row[1]);

    RpdCorpus *corpus = NULL;
    if (rpd_corpus_from_json("{\"documents\": 3}", &corpus) != RPD_STATUS_OK)
        printf("rejected: %s\n", rpd_last_error());
    return 0;
}
