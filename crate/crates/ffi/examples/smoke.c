#include <math.h>
#include <stdio.h>
#include "awnev.h"

int main(void) {
    AwnevComplex q = {0.5, 0.0};
    AwnevExpr *h = NULL;
    if (awnev_expr_compile("x*x", q, &h) != AWNEV_STATUS_OK) {
        fprintf(stderr, "%s\n", awnev_last_error_message());
        return 1;
    }
    AwnevComplex x = {0.7, 0.0}, y = {-0.2, 0.3}, v, w;
    if (awnev_expr_eval(h, x, &v) != AWNEV_STATUS_OK || fabs(v.re - 0.49) > 1e-12) return 2;
    /* the second difference of x^2 is the constant (1 + q) / sqrt(q) */
    if (awnev_expr_dq(h, 2, x, &v) != AWNEV_STATUS_OK) return 3;
    if (awnev_expr_dq(h, 2, y, &w) != AWNEV_STATUS_OK) return 3;
    if (hypot(v.re - w.re, v.im - w.im) > 1e-10 || fabs(v.re - 1.5 / sqrt(0.5)) > 1e-10) return 4;
    awnev_expr_free(h);

    if (awnev_expr_compile("pinf(", q, &h) != AWNEV_STATUS_PARSE || h != NULL) return 5;
    if (awnev_last_error_message() == NULL) return 6;
    printf("ok\n");
    return 0;
}
