#ifndef THERMAL_FACE_H
#define THERMAL_FACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TfStatus {
  TF_STATUS_OK = 0,
  TF_STATUS_NULL_POINTER = 1,
  TF_STATUS_INVALID_ARGUMENT = 2,
  TF_STATUS_NOT_FOUND = 3,
  TF_STATUS_IO = 4,
  TF_STATUS_MALFORMED_INPUT = 5,
  TF_STATUS_UNSUPPORTED_DEPTH = 6,
  TF_STATUS_NO_FOREGROUND = 7,
  TF_STATUS_SEGMENTATION = 8,
  TF_STATUS_DIMENSIONS = 9,
  TF_STATUS_LENGTH_MISMATCH = 10,
  TF_STATUS_EMPTY_GALLERY = 11,
  TF_STATUS_DATASET = 12,
  TF_STATUS_BUFFER_TOO_SMALL = 13,
  TF_STATUS_PANIC = 14,
} TfStatus;

typedef enum TfClassifier {
  TF_CLASSIFIER_NEAREST = 0,
  TF_CLASSIFIER_MEAN_REFERENCE = 1,
} TfClassifier;

/**
 * Opaque enrolled gallery.
 */
typedef struct TfGallery TfGallery;

/**
 * Opaque feature series.
 */
typedef struct TfSeries TfSeries;

/**
 * Pipeline settings. `crop_size` 0 keeps the padded crop unresampled.
 */
typedef struct TfConfig {
  /**
   * 4 or 8
   */
  uint8_t connectivity;
  size_t crop_size;
  /**
   * 0 = original, 1 = LL1, 2 = LL2
   */
  uint8_t level;
  bool quantize;
} TfConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *tf_last_error_message(void);

/**
 * Static NUL-terminated version string.
 */
const char *tf_version(void);

/**
 * 8-connectivity, 128x128 crops, LL2, quantized.
 */
struct TfConfig tf_config_default(void);

/**
 * Run the whole pipeline on one image file.
 *
 * # Safety
 * `path` must be a NUL-terminated string, `cfg` NULL or a valid config,
 * and `out` a valid pointer to write the new handle to.
 */
enum TfStatus tf_series_extract(const char *path,
                                const struct TfConfig *cfg,
                                struct TfSeries **out);

/**
 * Wrap caller-provided values as a series at `level`.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be valid.
 */
enum TfStatus tf_series_from_values(const double *values,
                                    size_t len,
                                    uint8_t level,
                                    struct TfSeries **out);

/**
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t tf_series_len(const struct TfSeries *series);

/**
 * # Safety
 * `series` must be NULL or a live handle.
 */
uint8_t tf_series_level(const struct TfSeries *series);

/**
 * Copy the values into `buf`, which must hold at least
 * `tf_series_len(series)` doubles.
 *
 * # Safety
 * `series` must be a live handle and `buf` writable for `cap` doubles.
 */
enum TfStatus tf_series_copy(const struct TfSeries *series, double *buf, size_t cap);

/**
 * # Safety
 * `series` must be NULL or a handle not yet freed.
 */
void tf_series_free(struct TfSeries *series);

/**
 * L1 distance between two series of equal length.
 *
 * # Safety
 * `a` and `b` must be live handles and `out` valid.
 */
enum TfStatus tf_sim(const struct TfSeries *a, const struct TfSeries *b, double *out);

/**
 * Build a gallery from `n` subject ids and series. The series handles are
 * only read; the caller still owns them.
 *
 * # Safety
 * `subjects` and `series` must each point to `n` valid entries.
 */
enum TfStatus tf_gallery_build(const char *const *subjects,
                               const struct TfSeries *const *series,
                               size_t n,
                               struct TfGallery **out);

/**
 * Read a gallery file written by `enroll`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid.
 */
enum TfStatus tf_gallery_load(const char *path, struct TfGallery **out);

/**
 * # Safety
 * `gallery` must be a live handle and `path` a NUL-terminated string.
 */
enum TfStatus tf_gallery_save(const struct TfGallery *gallery, const char *path);

/**
 * Number of enrolled series.
 *
 * # Safety
 * `gallery` must be NULL or a live handle.
 */
size_t tf_gallery_len(const struct TfGallery *gallery);

/**
 * Identify `probe`; `classifier` is a [`TfClassifier`] value. The
 * predicted subject id is written NUL-terminated into `subject` (capacity
 * `cap` bytes, including the NUL) and the winning score into `score`;
 * either output may be NULL.
 *
 * # Safety
 * `gallery` and `probe` must be live handles; non-NULL outputs must be
 * writable.
 */
enum TfStatus tf_gallery_identify(const struct TfGallery *gallery,
                                  const struct TfSeries *probe,
                                  uint32_t classifier,
                                  char *subject,
                                  size_t cap,
                                  double *score);

/**
 * # Safety
 * `gallery` must be NULL or a handle not yet freed.
 */
void tf_gallery_free(struct TfGallery *gallery);

/**
 * Full 1D Haar decomposition of `len` values (a power of two) into `out`.
 *
 * # Safety
 * `input` must be readable and `out` writable for `len` doubles.
 */
enum TfStatus tf_haar_full_1d(const double *input, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* THERMAL_FACE_H */
