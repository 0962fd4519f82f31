/* The public header must compile as plain C and link against the shared library. */
#include <stdio.h>

#include "tdcache/tdcache.h"

int main(void) {
  double b = 0.0;
  tdc_rdi* rdi = NULL;
  tdc_text* text = NULL;
  if (tdc_erlang_b(1.0, 1.0, &b) != TDC_OK || b != 0.5) return 1;
  if (tdc_rdi_preset("p1", &rdi) != TDC_OK) return 1;
  if (tdc_rdi_cdf(rdi, 0.0, &b) != TDC_OK || b != 0.0) return 1;
  tdc_rdi_free(rdi);
  if (tdc_qc_discriminant(6, 1, &text) != TDC_OK) return 1;
  printf("%s %s\n", tdc_version(), tdc_text_data(text));
  tdc_text_free(text);
  return 0;
}
