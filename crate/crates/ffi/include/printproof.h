#ifndef PRINTPROOF_H
#define PRINTPROOF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PpStatus {
  PP_STATUS_OK = 0,
  PP_STATUS_NULL_ARGUMENT = 1,
  PP_STATUS_UNSUPPORTED_FORMAT = 2,
  PP_STATUS_CORRUPT_STREAM = 3,
  PP_STATUS_INVALID_DIMENSIONS = 4,
  PP_STATUS_INVALID_PARAM = 5,
  PP_STATUS_IMAGE_TOO_SMALL = 6,
  PP_STATUS_ENCODE_FAILURE = 7,
  PP_STATUS_NOT_A_JPEG = 8,
  PP_STATUS_MALFORMED_METADATA = 9,
  PP_STATUS_BAD_ANNOTATIONS = 10,
  PP_STATUS_INVALID_ANNOTATIONS = 11,
  PP_STATUS_HASH_MISMATCH = 12,
  PP_STATUS_PANIC = 99,
} PpStatus;

typedef enum PpPcaMode {
  PP_PCA_MODE_PROJECTION = 0,
  PP_PCA_MODE_DISTANCE = 1,
} PpPcaMode;

typedef enum PpChannel {
  PP_CHANNEL_RED = 0,
  PP_CHANNEL_GREEN = 1,
  PP_CHANNEL_BLUE = 2,
  PP_CHANNEL_LUMINANCE = 3,
} PpChannel;

/**
 * A decoded image plus the bytes it came from.
 */
typedef struct PpImage PpImage;

/**
 * A computed analysis map.
 */
typedef struct PpMap PpMap;

/**
 * Bytes owned by the library. Release with `pp_buffer_free`.
 */
typedef struct PpBuffer {
  uint8_t *data;
  size_t len;
} PpBuffer;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *pp_version(void);

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call on the same thread.
 */
const char *pp_last_error(void);

/**
 * Decodes a JPEG or PNG held in `data[0..len]`.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum PpStatus pp_image_load(const uint8_t *data, size_t len, struct PpImage **out);

/**
 * # Safety
 * `img` must come from `pp_image_load` and not be freed twice. NULL is ignored.
 */
void pp_image_free(struct PpImage *img);

/**
 * # Safety
 * `img` must be a live handle; `width` and `height` must be writable.
 */
enum PpStatus pp_image_size(const struct PpImage *img, uint32_t *width, uint32_t *height);

/**
 * Lowercase hex SHA-256 of the source bytes (64 bytes, no NUL).
 *
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_image_hash(const struct PpImage *img, struct PpBuffer *out);

/**
 * Canonical metadata JSON for JPEG sources.
 *
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_meta_json(const struct PpImage *img, struct PpBuffer *out);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_ela(const struct PpImage *img,
                     uint8_t quality,
                     uint8_t scale,
                     uint8_t contrast,
                     struct PpMap **out);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_pca(const struct PpImage *img,
                     uint8_t component,
                     enum PpPcaMode mode,
                     struct PpMap **out);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_lga(const struct PpImage *img,
                     uint8_t intensity,
                     enum PpChannel channel,
                     bool normalized,
                     struct PpMap **out);

/**
 * # Safety
 * `img` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_noise(const struct PpImage *img, uint32_t radius, double gain, struct PpMap **out);

/**
 * Width, height and channel count (1 or 3) of a map.
 *
 * # Safety
 * `map` must be a live handle; the out pointers must be writable.
 */
enum PpStatus pp_map_shape(const struct PpMap *map,
                           uint32_t *width,
                           uint32_t *height,
                           uint32_t *channels);

/**
 * Borrowed view of the row-major, channel-interleaved values in [0,1].
 * Valid while the map is alive.
 *
 * # Safety
 * `map` must be a live handle; `values` and `len` must be writable.
 */
enum PpStatus pp_map_values(const struct PpMap *map, const double **values, size_t *len);

/**
 * PNG encoding with the parameters embedded as text.
 *
 * # Safety
 * `map` must be a live handle; `out` must be writable.
 */
enum PpStatus pp_map_png(const struct PpMap *map, struct PpBuffer *out);

/**
 * # Safety
 * `map` must come from a filter call and not be freed twice. NULL is ignored.
 */
void pp_map_free(struct PpMap *map);

/**
 * Runs the metrology pipeline on an annotation document (UTF-8 JSON) and
 * returns the canonical result JSON.
 *
 * # Safety
 * `img` must be a live handle; `annotations` must point to `len` readable
 * bytes; `out` must be writable.
 */
enum PpStatus pp_metrology_json(const struct PpImage *img,
                                const uint8_t *annotations,
                                size_t len,
                                uint64_t seed,
                                double perturbation_px,
                                double tilt_tau,
                                struct PpBuffer *out);

/**
 * Releases a buffer returned by the library. Empty buffers are ignored.
 *
 * # Safety
 * `buf` must have come from this library and not be freed twice.
 */
void pp_buffer_free(struct PpBuffer buf);

/**
 * Short name of a status code, e.g. "INVALID_PARAM". Static string.
 */
const char *pp_status_name(enum PpStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRINTPROOF_H */
