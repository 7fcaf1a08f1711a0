/* Plain C consumer of the shared library. */
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "atlas/atlas.h"

static int failed = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
      failed = 1;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  atlas_session* s = NULL;
  char* out = NULL;
  char* etag = NULL;
  long len = 0;

  EXPECT(atlas_session_new(&s) == 0);
  EXPECT(atlas_set_option(s, "threads", "2") == 0);
  EXPECT(atlas_set_option(s, "colour", "red") == -1);
  EXPECT(atlas_last_error_code() == ATLAS_E_INVALID_ARGUMENT);
  EXPECT(strlen(atlas_last_error_message()) > 0);

  EXPECT(atlas_classify(s, "newton", "0,4.63343045134138", NULL, &out) == 0);
  EXPECT(out && strstr(out, "\"component\":\"Tricorn(4)\"") != NULL);
  atlas_free_string(out);

  EXPECT(atlas_classify(s, "newton", "abc", NULL, &out) == -1);
  EXPECT(atlas_last_error_code() == ATLAS_E_INVALID_ARGUMENT);
  EXPECT(atlas_classify(s, "newton", "0,2", "standard", &out) == 0);
  EXPECT(atlas_last_error_code() == ATLAS_OK);
  atlas_free_string(out);

  EXPECT(atlas_analyze(s, "{\"kind\":\"visibility\",\"family\":\"newton\",\"center\":\"2,0\"}", &out) == -1);
  EXPECT(atlas_last_error_code() == ATLAS_E_OUTSIDE_DOMAIN);

  EXPECT(atlas_render_tile(s, "newton", "param", NULL, 0, 0, 0, "preview", &out, &len, &etag) == 0);
  EXPECT(len > 8 && memcmp(out + 1, "PNG", 3) == 0);
  EXPECT(etag && etag[0] == '"');
  atlas_free_string(out);
  atlas_free_string(etag);
  EXPECT(atlas_render_tile(s, "newton", "param", NULL, 2, 9, 0, NULL, &out, &len, NULL) == -1);
  EXPECT(atlas_last_error_code() == ATLAS_E_OUT_OF_WORLD);

  EXPECT(atlas_figure(s, "fig-nope", "/tmp", NULL) == -1);
  EXPECT(atlas_last_error_code() == ATLAS_E_UNKNOWN_FIGURE);
  EXPECT(atlas_figure_ids(&out) == 0);
  EXPECT(strstr(out, "fig-region") != NULL);
  atlas_free_string(out);

  atlas_session_free(s);
  if (!failed) printf("capi ok\n");
  return failed;
}
