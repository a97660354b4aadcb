#include <stdio.h>
#include <string.h>
#include "abpre.h"

#define CHECK(call)                                                          \
  do {                                                                       \
    AbpreStatus st_ = (call);                                                \
    if (st_ != ABPRE_OK) {                                                   \
      fprintf(stderr, "%s -> %d: %s\n", #call, st_, abpre_last_error());     \
      return 1;                                                              \
    }                                                                        \
  } while (0)

static AbpreBytes view(const AbpreBuffer *b) {
  AbpreBytes v = {abpre_buffer_data(b), abpre_buffer_len(b)};
  return v;
}

int main(void) {
  const char *msg = "hello from C";
  AbpreBytes payload = {(const uint8_t *)msg, strlen(msg)};
  AbpreRng *rng = abpre_rng_new_seeded(42);
  AbpreBuffer *pk, *msk, *sk, *ct, *rk, *dk, *ct2, *tk, *z, *pd, *out;

  CHECK(abpre_setup_mock(2305843009213693951ull, 7, "A,B,C", rng, &pk, &msk));
  CHECK(abpre_keygen(view(pk), view(msk), "A,B", rng, &sk));
  CHECK(abpre_encrypt(view(pk), "A AND B", true, payload, rng, &ct));
  CHECK(abpre_decrypt(view(pk), view(sk), view(ct), &out));
  if (abpre_buffer_len(out) != payload.len ||
      memcmp(abpre_buffer_data(out), msg, payload.len) != 0) {
    fprintf(stderr, "first-level payload mismatch\n");
    return 1;
  }
  abpre_buffer_free(out);

  CHECK(abpre_rkgen(view(pk), view(msk), view(sk), "C", rng, &rk, &dk));
  CHECK(abpre_reencrypt(view(pk), view(rk), "C", view(ct), rng, &ct2));
  CHECK(abpre_transform_keygen(view(dk), rng, &tk, &z));
  CHECK(abpre_transform(view(pk), view(tk), view(ct2), &pd));
  CHECK(abpre_finish(view(z), view(pd), view(ct2), &out));
  if (abpre_buffer_len(out) != payload.len ||
      memcmp(abpre_buffer_data(out), msg, payload.len) != 0) {
    fprintf(stderr, "outsourced payload mismatch\n");
    return 1;
  }

  AbpreBytes garbage = {(const uint8_t *)"xx", 2};
  AbpreBuffer *none = NULL;
  if (abpre_decrypt(view(pk), view(sk), garbage, &none) != ABPRE_ERR_FORMAT ||
      none != NULL || abpre_last_error() == NULL) {
    fprintf(stderr, "garbage ciphertext not rejected\n");
    return 1;
  }

  AbpreBuffer *bufs[] = {pk, msk, sk, ct, rk, dk, ct2, tk, z, pd, out};
  for (size_t i = 0; i < sizeof bufs / sizeof bufs[0]; i++)
    abpre_buffer_free(bufs[i]);
  abpre_rng_free(rng);
  printf("ok %s\n", abpre_version());
  return 0;
}
