/* Compiles the public header as C and runs a minimal round trip. */
#include <stdio.h>

#include "mapsparse/mapsparse.h"

int main(void) {
  ms_map* map = NULL;
  ms_result* result = NULL;
  size_t n = 0, m = 0, obs = 0, selected = 0;
  double objective = 0.0, bound = 0.0, gap = 0.0;

  if (ms_synth_generate("{\"n_landmarks\": 200, \"n_keyframes\": 8}", 0, 0, &map) != MS_OK) {
    fprintf(stderr, "synth: %s\n", ms_last_error());
    return 1;
  }
  if (ms_map_info(map, &n, &m, &obs) != MS_OK || n != 200 || m != 8) {
    ms_map_free(map);
    return 1;
  }
  if (ms_sparsify(map, "{\"method\": \"lp\", \"k1\": 10}", &result) != MS_OK) {
    fprintf(stderr, "sparsify: %s\n", ms_last_error());
    ms_map_free(map);
    return 1;
  }
  ms_result_summary(result, &objective, &bound, &gap, &selected);
  printf("n=%zu m=%zu selected=%zu objective=%g status=%s\n", n, m, selected, objective,
         ms_result_status(result));
  ms_result_free(result);
  ms_map_free(map);
  return selected > 0 ? 0 : 1;
}
