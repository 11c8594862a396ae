#include <math.h>
#include <stdio.h>
#include <string.h>

#include "shiftline.h"

#define CHECK(cond)                                                     \
  do {                                                                  \
    if (!(cond)) {                                                      \
      const char *msg = shl_last_error_message();                       \
      fprintf(stderr, "line %d: %s (%s)\n", __LINE__, #cond,            \
              msg ? msg : "no message");                                \
      return 1;                                                         \
    }                                                                   \
  } while (0)

int main(void) {
  double lo, hi, z;
  CHECK(shl_clopper_pearson(50, 100, 0.95, &lo, &hi) == SHL_STATUS_OK);
  CHECK(fabs(lo - 0.39832) < 1e-4 && fabs(hi - 0.60168) < 1e-4);
  CHECK(shl_probit(0.975, &z) == SHL_STATUS_OK);
  CHECK(fabs(shl_normal_cdf(z) - 0.975) < 1e-12);
  CHECK(shl_probit(2.0, &z) == SHL_STATUS_DOMAIN);
  CHECK(strstr(shl_last_error_message(), "domain") != NULL);

  ShlRecords *records = shl_records_new();
  for (int i = 1; i <= 5; ++i) {
    double x = 0.2 * i - 0.6, a, b;
    a = shl_normal_cdf(x);
    b = shl_normal_cdf(0.7 * x - 0.1);
    CHECK(shl_records_push_exact(records, a, b) == SHL_STATUS_OK);
  }
  CHECK(shl_records_len(records) == 5);
  ShlTrendFit fit;
  CHECK(shl_fit_trend(records, SHL_TRANSFORM_PROBIT, &fit) == SHL_STATUS_OK);
  CHECK(fabs(fit.slope - 0.7) < 1e-9 && fabs(fit.intercept + 0.1) < 1e-9);
  CHECK(fit.n_points == 5);
  shl_records_free(records);
  shl_records_free(NULL);

  ShlConfig *config = NULL;
  CHECK(shl_config_parse("kind = \"main_trend\"\n", &config) == SHL_STATUS_CONFIG);
  CHECK(config == NULL);
  printf("ok %s\n", shl_version());
  return 0;
}
