/**
 * \file jforge.h
 *
 * Copyright 2026 jforge developers.
 * License: Apache License 2.0
 *
 * C interface to the jforge library. Objects are opaque handles released
 * with their matching *_free function. Every fallible call returns a
 * jf_status; on failure jf_last_error() holds a message for the calling
 * thread. Matrices are row-major; undefined matrix cells are NaN.
 */

#ifndef JFORGE_H
#define JFORGE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(JFORGE_BUILDING)
#define JF_API __declspec(dllexport)
#else
#define JF_API __declspec(dllimport)
#endif
#else
#define JF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct jf_network jf_network;
typedef struct jf_dataset jf_dataset;
typedef struct jf_history jf_history;
typedef struct jf_results jf_results;

typedef enum jf_status {
    JF_OK = 0,
    JF_ERR_NULL,
    JF_ERR_DIMENSION,
    JF_ERR_PARSE,
    JF_ERR_VERSION,
    JF_ERR_INPUT,
    JF_ERR_INDEX,
    JF_ERR_DATA,
    JF_ERR_DIVERGENCE,
    JF_ERR_CONFIG,
    JF_ERR_IO,
    JF_ERR_BUFFER,
    JF_ERR_INTERNAL
} jf_status;

typedef enum jf_tap { JF_TAP_PROBABILITIES = 0, JF_TAP_LOGITS = 1 } jf_tap;
typedef enum jf_variant { JF_VARIANT_INCREASE = 0, JF_VARIANT_DECREASE = 1 } jf_variant;
typedef enum jf_loss { JF_LOSS_CROSS_ENTROPY = 0, JF_LOSS_MSE = 1 } jf_loss;
typedef enum jf_failure {
    JF_FAILURE_NONE = 0,
    JF_FAILURE_BUDGET_EXHAUSTED,
    JF_FAILURE_DOMAIN_EXHAUSTED,
    JF_FAILURE_NO_VALID_PAIR
} jf_failure;
typedef enum jf_distance_mode { JF_DISTANCE_SINGLE = 0, JF_DISTANCE_PAIRWISE = 1 } jf_distance_mode;
typedef enum jf_reduce { JF_REDUCE_MIN = 0, JF_REDUCE_MEAN = 1 } jf_reduce;
typedef enum jf_matrix_kind { JF_MATRIX_SUCCESS_RATE = 0, JF_MATRIX_EPSILON, JF_MATRIX_COUNT } jf_matrix_kind;

typedef struct jf_craft_params {
    double upsilon;   /* percent of features, (0, 100] */
    double theta;     /* change per selected feature, non-zero */
    jf_variant variant;
    jf_tap tap;
    size_t prefilter; /* pair-search prefilter size, 0 for exhaustive */
} jf_craft_params;

typedef struct jf_train_config {
    double learning_rate;
    size_t epochs;
    size_t batch_size;
    uint64_t seed;
    jf_loss loss;
} jf_train_config;

typedef struct jf_craft_info {
    int success;
    size_t iterations;
    double distortion_pct;
    jf_failure failure;
    size_t source;
    size_t target;
} jf_craft_info;

typedef struct jf_epoch {
    size_t epoch;
    double loss;
    double train_accuracy;
    double test_accuracy; /* NaN without a test set */
} jf_epoch;

typedef struct jf_summary {
    size_t total;
    size_t successes;
    double success_rate;
    double mean_distortion_all;
    double epsilon; /* NaN when nothing succeeded */
} jf_summary;

JF_API const char *jf_version(void);
JF_API const char *jf_last_error(void);
JF_API const char *jf_status_name(jf_status status);
JF_API const char *jf_failure_name(jf_failure failure);

JF_API void jf_craft_params_default(jf_craft_params *params);
JF_API void jf_train_config_default(jf_train_config *config);

/* Networks */
JF_API jf_status jf_network_init(const size_t *input_shape, size_t rank, const char *architecture, uint64_t seed,
                                 jf_network **out);
JF_API jf_status jf_network_load(const char *path, jf_network **out);
JF_API jf_status jf_network_save(const jf_network *net, const char *path);
JF_API void jf_network_free(jf_network *net);
JF_API size_t jf_network_input_size(const jf_network *net);
JF_API size_t jf_network_output_dim(const jf_network *net);
JF_API jf_status jf_network_architecture(const jf_network *net, char *buffer, size_t size);
JF_API jf_status jf_network_evaluate(const jf_network *net, const double *x, size_t n, double *y, size_t ny);
JF_API jf_status jf_network_predict(const jf_network *net, const double *x, size_t n, size_t *label);
/* out holds rows x n values, rows = output size at the tap. */
JF_API jf_status jf_network_jacobian(const jf_network *net, const double *x, size_t n, jf_tap tap, double *out,
                                     size_t out_len);

/* Datasets */
JF_API jf_status jf_dataset_load_idx(const char *images, const char *labels, size_t limit, int use_seed, uint64_t seed,
                                     jf_dataset **out);
JF_API jf_status jf_dataset_create(size_t feature_count, size_t class_count, jf_dataset **out);
JF_API jf_status jf_dataset_add(jf_dataset *data, const double *x, size_t n, size_t label);
JF_API jf_status jf_dataset_and(size_t count, jf_dataset **out);
JF_API jf_status jf_dataset_concat(const jf_dataset *a, const jf_dataset *b, jf_dataset **out);
JF_API void jf_dataset_free(jf_dataset *data);
JF_API size_t jf_dataset_size(const jf_dataset *data);
JF_API size_t jf_dataset_feature_count(const jf_dataset *data);
JF_API size_t jf_dataset_class_count(const jf_dataset *data);
JF_API jf_status jf_dataset_sample(const jf_dataset *data, size_t index, double *x, size_t n, size_t *label);

/* Training */
JF_API jf_status jf_train(jf_network *net, const jf_dataset *train, const jf_dataset *test,
                          const jf_train_config *config, jf_history **history);
/* Fresh network with the architecture of `like`, trained on data plus adversarial. */
JF_API jf_status jf_retrain(const jf_network *like, const jf_dataset *data, const jf_dataset *adversarial,
                            const jf_dataset *test, const jf_train_config *config, jf_network **out,
                            jf_history **history);
JF_API jf_status jf_accuracy(const jf_network *net, const jf_dataset *data, double *out);
JF_API size_t jf_history_size(const jf_history *history);
JF_API jf_status jf_history_get(const jf_history *history, size_t index, jf_epoch *out);
JF_API jf_status jf_history_write_csv(const jf_history *history, const char *path);
JF_API void jf_history_free(jf_history *history);

/* Crafting. x_star receives n values and may be NULL. */
JF_API jf_status jf_craft(const jf_network *net, const double *x, size_t n, size_t target,
                          const jf_craft_params *params, double *x_star, jf_craft_info *info);
JF_API jf_status jf_craft_from_empty(const jf_network *net, size_t target, const jf_craft_params *params,
                                     double *x_star, size_t n, jf_craft_info *info);
JF_API jf_status jf_craft_general(const jf_network *net, const double *x, size_t n, const double *target_output,
                                  size_t ny, const jf_craft_params *params, double tolerance, double *x_star,
                                  jf_craft_info *info);

/* Campaigns: every sample against every class but its predicted one, or
 * against `target` alone when it is non-negative. */
JF_API jf_status jf_campaign(const jf_network *net, const jf_dataset *samples, const jf_craft_params *params,
                             int64_t target, jf_results **out);
JF_API size_t jf_results_size(const jf_results *results);
JF_API jf_status jf_results_get(const jf_results *results, size_t index, size_t *sample_id, size_t *true_label,
                                jf_craft_info *info);
JF_API jf_status jf_results_x_star(const jf_results *results, size_t index, double *x, size_t n);
JF_API jf_status jf_results_write_csv(const jf_results *results, const char *path);
JF_API jf_status jf_results_summary(const jf_results *results, size_t classes, jf_summary *out);
JF_API jf_status jf_results_matrix(const jf_results *results, size_t classes, jf_matrix_kind kind, double *out);
/* Successful samples labelled with their true class. */
JF_API jf_status jf_results_to_dataset(const jf_results *results, size_t classes, jf_dataset **out);
JF_API void jf_results_free(jf_results *results);

/* Metrics. Class matrices hold output_dim x output_dim values. */
JF_API const double *jf_default_grid(size_t *count);
JF_API jf_status jf_hardness(const jf_network *net, const jf_dataset *samples, const double *grid, size_t k,
                             const jf_craft_params *params, double *out);
JF_API jf_status jf_distance(const jf_network *net, const jf_dataset *samples, jf_distance_mode mode,
                             const jf_craft_params *params, jf_reduce reduce, double *out, double *robustness);
JF_API jf_status jf_regularity(const double *image, size_t rows, size_t cols, double *out);
JF_API jf_status jf_spearman(const double *a, const double *b, size_t n, double *out);

/* Output files, written through a temporary file and a rename. */
JF_API jf_status jf_write_matrix_csv(const double *m, size_t classes, const char *path);
JF_API jf_status jf_write_pgm(const double *image, size_t rows, size_t cols, const char *path);
JF_API jf_status jf_write_text(const char *text, const char *path);

#ifdef __cplusplus
}
#endif

#endif /* JFORGE_H */
