/* C interface to the multi-centroid classifier toolkit.
 *
 * Every fallible call returns an mcc_status; on failure mcc_last_error()
 * describes the problem for the calling thread. Handles are opaque and owned
 * by the caller once returned; release them with the matching _free call.
 * Strings returned through char** are heap-allocated and released with
 * mcc_string_free. */
#ifndef MCC_H
#define MCC_H

#include <stddef.h>
#include <stdint.h>

#if defined(MCC_BUILDING_LIBRARY)
#define MCC_API __attribute__((visibility("default")))
#else
#define MCC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mcc_status {
  MCC_OK = 0,
  MCC_ERR_DOMAIN = 1,
  MCC_ERR_DIMENSION = 2,
  MCC_ERR_CONSTRAINT = 3,
  MCC_ERR_PARSE = 4,
  MCC_ERR_VERSION = 5,
  MCC_ERR_IO = 6,
  MCC_ERR_CONFIG = 7,
  MCC_ERR_BOUNDS = 8,
  MCC_ERR_INTERNAL = 9,
  MCC_ERR_ARGUMENT = 10 /* null handle or pointer */
} mcc_status;

typedef enum mcc_metric { MCC_METRIC_EUCLIDEAN = 0, MCC_METRIC_DTW = 1 } mcc_metric;
typedef enum mcc_stop_mode { MCC_STOP_ACCURACY = 0, MCC_STOP_COST = 1 } mcc_stop_mode;

typedef struct mcc_dataset mcc_dataset;
typedef struct mcc_model mcc_model;
typedef struct mcc_sessions mcc_sessions;

MCC_API const char* mcc_last_error(void);
MCC_API const char* mcc_status_name(mcc_status status);
MCC_API void mcc_string_free(char* s);

/* Distances. band_radius < 0 means unconstrained. */
MCC_API mcc_status mcc_euclidean_distance(const double* a, size_t na, const double* b, size_t nb,
                                          double* out);
MCC_API mcc_status mcc_dtw_distance(const double* a, size_t na, const double* b, size_t nb,
                                    long band_radius, double* out);

/* Datasets. Labels are 1 (positive) and 0 (negative). */
MCC_API mcc_status mcc_dataset_gen_snowman(size_t n, int head_positive, uint64_t seed,
                                           mcc_dataset** out);
MCC_API mcc_status mcc_dataset_gen_trace_like(size_t per_class, size_t length, uint64_t seed,
                                              mcc_dataset** out);
/* Class lists are comma-separated label names, e.g. "1" and "2,3,4". */
MCC_API mcc_status mcc_dataset_load_ucr(const char* path, const char* positive_classes,
                                        const char* negative_classes, mcc_dataset** out);
MCC_API mcc_status mcc_dataset_save_ucr(const mcc_dataset* ds, const char* path);
MCC_API mcc_status mcc_dataset_split(const mcc_dataset* ds, double train_fraction, uint64_t seed,
                                     mcc_dataset** train, mcc_dataset** test);
MCC_API size_t mcc_dataset_size(const mcc_dataset* ds);
MCC_API size_t mcc_dataset_count(const mcc_dataset* ds, int label);
/* Writes mcc_dataset_size(ds) labels. */
MCC_API mcc_status mcc_dataset_labels(const mcc_dataset* ds, int* labels_out);
MCC_API void mcc_dataset_free(mcc_dataset* ds);

typedef struct mcc_train_config {
  int metric;      /* mcc_metric */
  long band_radius; /* < 0: none */
  int stop_mode;   /* mcc_stop_mode */
  double stop_value;
  size_t max_clusters;
  uint64_t seed;
  size_t clustering_max_iters;
  size_t restarts_per_split;
  size_t dba_iterations;
  unsigned threads;
} mcc_train_config;

MCC_API void mcc_train_config_init(mcc_train_config* config);
MCC_API mcc_status mcc_train(const mcc_dataset* ds, const mcc_train_config* config,
                             mcc_model** out);

/* Any of label, nearest and margin may be null. */
MCC_API mcc_status mcc_model_predict(const mcc_model* model, const double* x, size_t n,
                                     double adjust, int* label, size_t* nearest, double* margin);
/* Arrays hold mcc_dataset_size(ds) entries; margins and nearest may be null. */
MCC_API mcc_status mcc_model_predict_dataset(const mcc_model* model, const mcc_dataset* ds,
                                             double adjust, unsigned threads, int* labels,
                                             size_t* nearest, double* margins);
MCC_API size_t mcc_model_template_count(const mcc_model* model);
MCC_API mcc_status mcc_model_to_json(const mcc_model* model, char** json_out);
MCC_API mcc_status mcc_model_binary_size(const mcc_model* model, size_t* out);
/* format: 0 JSON, 1 binary, -1 from the extension (".bin" is binary). */
MCC_API mcc_status mcc_model_save(const mcc_model* model, const char* path, int format);
MCC_API mcc_status mcc_model_load(const char* path, mcc_model** out);
MCC_API void mcc_model_free(mcc_model* model);

typedef struct mcc_bench_options {
  size_t repeats;
  unsigned throughput_threads; /* > 1 adds a parallel throughput pass */
  size_t knn_k;                /* neighbours for the instance-store baseline */
  int nearest_centroid;        /* nonzero adds the nearest-centroid baseline */
  double adjust;
  size_t dba_iterations;
} mcc_bench_options;

MCC_API void mcc_bench_options_init(mcc_bench_options* options);
/* Times the model against baselines built from `train` (using the model's
 * metric) on `test`; returns CSV rows. */
MCC_API mcc_status mcc_bench(const mcc_model* model, const mcc_dataset* train,
                             const mcc_dataset* test, const mcc_bench_options* options,
                             char** csv_out);

/* IMU sessions and the cough pipeline. */
MCC_API mcc_status mcc_sessions_gen(size_t n_subjects, size_t coughs_per_session, uint64_t seed,
                                    double burst_amplitude, mcc_sessions** out);
MCC_API mcc_status mcc_sessions_load(const char* manifest_path, mcc_sessions** out);
/* Writes session files and manifest.json into dir. */
MCC_API mcc_status mcc_sessions_save(const mcc_sessions* sessions, const char* dir);
MCC_API size_t mcc_sessions_count(const mcc_sessions* sessions);
MCC_API void mcc_sessions_free(mcc_sessions* sessions);

typedef struct mcc_pipeline_config {
  mcc_train_config train; /* metric defaults to DTW */
  size_t smoothing_window;
  double highpass_cutoff;
  size_t highpass_order;
  int preprocess;
  double window_len;      /* seconds */
  double negative_stride; /* seconds */
  size_t negative_count;
  uint64_t seed;          /* negative subsampling */
} mcc_pipeline_config;

MCC_API void mcc_pipeline_config_init(mcc_pipeline_config* config);
MCC_API mcc_status mcc_cough_run(const mcc_sessions* sessions, const mcc_pipeline_config* config,
                                 double adjust, char** report_json_out);
/* Either output pointer may be null. */
MCC_API mcc_status mcc_cough_sweep(const mcc_sessions* sessions, const mcc_pipeline_config* config,
                                   const double* adjusts, size_t n_adjusts, char** sweep_json_out,
                                   char** roc_csv_out);

#ifdef __cplusplus
}
#endif

#endif /* MCC_H */
