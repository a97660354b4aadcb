#ifndef ABPRE_H
#define ABPRE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

/**
 * Opaque owned byte buffer.
 */
typedef struct AbpreBuffer AbpreBuffer;

/**
 * Opaque randomness source.
 */
typedef struct AbpreRng AbpreRng;

typedef int32_t AbpreStatus;

/**
 * Borrowed input bytes. `data` may be null only when `len` is 0.
 */
typedef struct {
  const uint8_t *data;
  size_t len;
} AbpreBytes;

#define ABPRE_OK 0

/**
 * The key's attributes do not satisfy the ciphertext policy.
 */
#define ABPRE_ERR_POLICY_NOT_SATISFIED 1

/**
 * The ciphertext was encrypted with re-encryption disabled.
 */
#define ABPRE_ERR_REENCRYPTION_DISABLED 2

/**
 * Malformed, mismatched or truncated encoding.
 */
#define ABPRE_ERR_FORMAT 3

/**
 * The sealed payload failed authentication.
 */
#define ABPRE_ERR_AEAD 4

/**
 * Bad argument: policy syntax, attribute names, suite parameters.
 */
#define ABPRE_ERR_INVALID_ARGUMENT 5

#define ABPRE_ERR_NULL_POINTER 6

/**
 * A Rust panic was caught at the boundary.
 */
#define ABPRE_ERR_INTERNAL 7

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until
 * the next call into this library on the same thread.
 */
const char *abpre_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *abpre_version(void);

/**
 * Operating-system randomness.
 */
AbpreRng *abpre_rng_new_os(void);

/**
 * Deterministic ChaCha20 stream. For tests only.
 */
AbpreRng *abpre_rng_new_seeded(uint64_t seed);

/**
 * Replays `values` as the exact scalars drawn, then fails. For tests only.
 *
 * # Safety
 * `values` must point to `len` readable integers, or be null with `len` 0.
 */
AbpreRng *abpre_rng_new_tape(const uint64_t *values, size_t len);

/**
 * # Safety
 * `rng` must come from an `abpre_rng_new_*` function and not be used
 * afterwards. Null is ignored.
 */
void abpre_rng_free(AbpreRng *rng);

/**
 * # Safety
 * `buf` must be a live buffer returned by this library.
 */
const uint8_t *abpre_buffer_data(const AbpreBuffer *buf);

/**
 * # Safety
 * `buf` must be a live buffer returned by this library.
 */
size_t abpre_buffer_len(const AbpreBuffer *buf);

/**
 * # Safety
 * `buf` must be a buffer returned by this library and not be used
 * afterwards. Null is ignored.
 */
void abpre_buffer_free(AbpreBuffer *buf);

/**
 * Setup on the discrete-log test backend. `universe` lists attributes
 * separated by commas or whitespace.
 *
 * # Safety
 * Pointers must be valid; `universe` NUL-terminated.
 */
AbpreStatus abpre_setup_mock(uint64_t modulus,
                             uint64_t g2_exponent,
                             const char *universe,
                             AbpreRng *rng,
                             AbpreBuffer **out_pk,
                             AbpreBuffer **out_msk);

/**
 * Setup on the pairing backend; `curve` may be null for BLS12-381.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
AbpreStatus abpre_setup_pairing(const char *curve,
                                const char *universe,
                                AbpreRng *rng,
                                AbpreBuffer **out_pk,
                                AbpreBuffer **out_msk);

/**
 * # Safety
 * Pointers must be valid; `attrs` is a NUL-terminated comma-separated list.
 */
AbpreStatus abpre_keygen(AbpreBytes pk,
                         AbpreBytes msk,
                         const char *attrs,
                         AbpreRng *rng,
                         AbpreBuffer **out_sk);

/**
 * Seals `payload` under `policy`.
 *
 * # Safety
 * Pointers must be valid; `policy` NUL-terminated.
 */
AbpreStatus abpre_encrypt(AbpreBytes pk,
                          const char *policy,
                          bool reencryptable,
                          AbpreBytes payload,
                          AbpreRng *rng,
                          AbpreBuffer **out_ct);

/**
 * # Safety
 * Pointers must be valid; `delegatee_attrs` NUL-terminated.
 */
AbpreStatus abpre_rkgen(AbpreBytes pk,
                        AbpreBytes msk,
                        AbpreBytes sk,
                        const char *delegatee_attrs,
                        AbpreRng *rng,
                        AbpreBuffer **out_proxy,
                        AbpreBuffer **out_delegatee);

/**
 * # Safety
 * Pointers must be valid; `policy2` NUL-terminated.
 */
AbpreStatus abpre_reencrypt(AbpreBytes pk,
                            AbpreBytes proxy_key,
                            const char *policy2,
                            AbpreBytes ct,
                            AbpreRng *rng,
                            AbpreBuffer **out_ct2);

/**
 * Opens a sealed file with a secret key or a delegatee key.
 *
 * # Safety
 * Pointers must be valid.
 */
AbpreStatus abpre_decrypt(AbpreBytes pk, AbpreBytes key, AbpreBytes ct, AbpreBuffer **out_payload);

/**
 * # Safety
 * Pointers must be valid.
 */
AbpreStatus abpre_transform_keygen(AbpreBytes delegatee_key,
                                   AbpreRng *rng,
                                   AbpreBuffer **out_tk,
                                   AbpreBuffer **out_z);

/**
 * # Safety
 * Pointers must be valid.
 */
AbpreStatus abpre_transform(AbpreBytes pk,
                            AbpreBytes tk,
                            AbpreBytes ct2,
                            AbpreBuffer **out_partial);

/**
 * # Safety
 * Pointers must be valid.
 */
AbpreStatus abpre_finish(AbpreBytes z,
                         AbpreBytes partial,
                         AbpreBytes ct2,
                         AbpreBuffer **out_payload);

/**
 * Compiles `policy` and optionally tests `attrs` (null to skip).
 * `*out_satisfied` is 1, 0, or -1 when no attributes were given;
 * `out_report` receives the text report.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
AbpreStatus abpre_policy_check(const char *policy,
                               const char *attrs,
                               int32_t *out_satisfied,
                               AbpreBuffer **out_report);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* ABPRE_H */
