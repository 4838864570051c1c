#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "mcc.h"

namespace fs = std::filesystem;

TEST_CASE("distances and status codes") {
  const double a[] = {0, 0}, b[] = {3, 4}, c[] = {1};
  double d = -1;
  CHECK(mcc_euclidean_distance(a, 2, b, 2, &d) == MCC_OK);
  CHECK(d == 5.0);
  CHECK(mcc_euclidean_distance(a, 2, c, 1, &d) == MCC_ERR_DIMENSION);
  CHECK(std::string(mcc_last_error()).size() > 0);
  CHECK(mcc_dtw_distance(a, 0, b, 2, -1, &d) == MCC_ERR_DOMAIN);

  const double x[] = {1, 2, 3, 4, 5}, y[] = {1, 2};
  CHECK(mcc_dtw_distance(x, 5, y, 2, 1, &d) == MCC_ERR_CONSTRAINT);
  CHECK(mcc_dtw_distance(x, 5, y, 2, -1, &d) == MCC_OK);
  CHECK(mcc_dtw_distance(a, 2, b, 2, -1, nullptr) == MCC_ERR_ARGUMENT);

  CHECK(std::string(mcc_status_name(MCC_OK)) == "ok");
  CHECK(std::string(mcc_status_name(MCC_ERR_PARSE)) != std::string(mcc_status_name(MCC_ERR_IO)));
}

TEST_CASE("dataset handles") {
  mcc_dataset* ds = nullptr;
  REQUIRE(mcc_dataset_gen_snowman(1334, 0, 7, &ds) == MCC_OK);
  CHECK(mcc_dataset_size(ds) == 1334);
  CHECK(mcc_dataset_count(ds, 1) == 889);
  CHECK(mcc_dataset_count(ds, 0) == 445);
  std::vector<int> labels(1334);
  CHECK(mcc_dataset_labels(ds, labels.data()) == MCC_OK);

  mcc_dataset *train = nullptr, *test = nullptr;
  CHECK(mcc_dataset_split(ds, 1.5, 1, &train, &test) == MCC_ERR_DOMAIN);
  CHECK(train == nullptr);
  REQUIRE(mcc_dataset_split(ds, 0.7, 1, &train, &test) == MCC_OK);
  CHECK(mcc_dataset_size(train) + mcc_dataset_size(test) == 1334);

  CHECK(mcc_dataset_gen_snowman(1, 0, 7, nullptr) == MCC_ERR_ARGUMENT);
  mcc_dataset* missing = nullptr;
  CHECK(mcc_dataset_load_ucr("/nonexistent/x.csv", "1", "0", &missing) == MCC_ERR_IO);
  CHECK(missing == nullptr);

  mcc_dataset_free(train);
  mcc_dataset_free(test);
  mcc_dataset_free(ds);
  mcc_dataset_free(nullptr);
}

TEST_CASE("train, predict, save and load") {
  const auto dir = fs::temp_directory_path() / "mcc_capi_test";
  fs::create_directories(dir);

  mcc_dataset* ds = nullptr;
  REQUIRE(mcc_dataset_gen_snowman(600, 0, 3, &ds) == MCC_OK);
  const std::string ucr = (dir / "snow.csv").string();
  REQUIRE(mcc_dataset_save_ucr(ds, ucr.c_str()) == MCC_OK);
  mcc_dataset* loaded = nullptr;
  REQUIRE(mcc_dataset_load_ucr(ucr.c_str(), "1", "0", &loaded) == MCC_OK);
  CHECK(mcc_dataset_size(loaded) == 600);

  mcc_train_config cfg;
  mcc_train_config_init(&cfg);
  CHECK(cfg.metric == MCC_METRIC_EUCLIDEAN);
  cfg.stop_value = 0.85;
  mcc_model* model = nullptr;
  REQUIRE(mcc_train(loaded, &cfg, &model) == MCC_OK);
  const size_t k = mcc_model_template_count(model);
  CHECK(k >= 1);

  const double origin[] = {0, 0};
  int label = -1;
  size_t nearest = 99;
  double margin = 0;
  CHECK(mcc_model_predict(model, origin, 2, 0.0, &label, &nearest, &margin) == MCC_OK);
  CHECK(nearest < k);
  CHECK(label == (margin < 0 ? 1 : 0));
  CHECK(mcc_model_predict(model, origin, 2, 0.0, nullptr, nullptr, nullptr) == MCC_OK);
  CHECK(mcc_model_predict(model, origin, 1, 0.0, &label, nullptr, nullptr) == MCC_ERR_DIMENSION);

  std::vector<int> labels(600);
  std::vector<double> margins(600);
  REQUIRE(mcc_model_predict_dataset(model, loaded, 0.0, 2, labels.data(), nullptr, margins.data()) == MCC_OK);
  for (size_t i = 0; i < 600; ++i) CHECK(labels[i] == (margins[i] < 0 ? 1 : 0));

  char* json = nullptr;
  REQUIRE(mcc_model_to_json(model, &json) == MCC_OK);
  CHECK(std::string(json).find("\"templates\"") != std::string::npos);
  mcc_string_free(json);

  size_t bytes = 0;
  CHECK(mcc_model_binary_size(model, &bytes) == MCC_OK);
  CHECK(bytes == 14 + k * (8 + 8));

  for (const char* name : {"m.mcc.json", "m.mcc.bin"}) {
    const std::string path = (dir / name).string();
    REQUIRE(mcc_model_save(model, path.c_str(), -1) == MCC_OK);
    mcc_model* back = nullptr;
    REQUIRE(mcc_model_load(path.c_str(), &back) == MCC_OK);
    CHECK(mcc_model_template_count(back) == k);
    std::vector<int> again(600);
    REQUIRE(mcc_model_predict_dataset(back, loaded, 0.0, 1, again.data(), nullptr, nullptr) == MCC_OK);
    CHECK(again == labels);
    mcc_model_free(back);
  }
  mcc_model* none = nullptr;
  CHECK(mcc_model_load((dir / "missing.bin").string().c_str(), &none) == MCC_ERR_IO);

  mcc_bench_options opts;
  mcc_bench_options_init(&opts);
  opts.repeats = 1;
  char* csv = nullptr;
  REQUIRE(mcc_bench(model, loaded, ds, &opts, &csv) == MCC_OK);
  const std::string table(csv);
  mcc_string_free(csv);
  CHECK(table.rfind("name,accuracy,time_per_sample_s,model_bytes,repeats\n", 0) == 0);
  CHECK(table.find("\nmcc,") != std::string::npos);
  CHECK(table.find("\n1nn-euclidean,") != std::string::npos);
  CHECK(table.find("\nnearest-centroid,") != std::string::npos);

  mcc_model_free(model);
  mcc_dataset_free(loaded);
  mcc_dataset_free(ds);
}

TEST_CASE("training errors surface as statuses") {
  mcc_dataset* ds = nullptr;
  REQUIRE(mcc_dataset_gen_snowman(50, 0, 1, &ds) == MCC_OK);
  mcc_train_config cfg;
  mcc_train_config_init(&cfg);
  cfg.stop_value = 2.0;
  mcc_model* model = nullptr;
  CHECK(mcc_train(ds, &cfg, &model) != MCC_OK);
  CHECK(model == nullptr);
  CHECK(mcc_train(nullptr, &cfg, &model) == MCC_ERR_ARGUMENT);
  mcc_dataset_free(ds);
}

TEST_CASE("cough pipeline through the C API") {
  mcc_sessions* sessions = nullptr;
  REQUIRE(mcc_sessions_gen(2, 4, 5, 25.0, &sessions) == MCC_OK);
  CHECK(mcc_sessions_count(sessions) == 20);

  const auto dir = fs::temp_directory_path() / "mcc_capi_sessions";
  fs::remove_all(dir);
  REQUIRE(mcc_sessions_save(sessions, dir.string().c_str()) == MCC_OK);
  mcc_sessions* loaded = nullptr;
  REQUIRE(mcc_sessions_load((dir / "manifest.json").string().c_str(), &loaded) == MCC_OK);
  CHECK(mcc_sessions_count(loaded) == 20);

  mcc_pipeline_config cfg;
  mcc_pipeline_config_init(&cfg);
  CHECK(cfg.train.metric == MCC_METRIC_DTW);
  cfg.negative_count = 80;
  cfg.train.max_clusters = 6;

  char* report = nullptr;
  REQUIRE(mcc_cough_run(loaded, &cfg, 0.0, &report) == MCC_OK);
  CHECK(std::string(report).find("\"per_subject\"") != std::string::npos);
  mcc_string_free(report);

  const double adjusts[] = {-1.0, 0.0, 1.0};
  char* csv = nullptr;
  REQUIRE(mcc_cough_sweep(loaded, &cfg, adjusts, 3, nullptr, &csv) == MCC_OK);
  CHECK(std::string(csv).rfind("fpr,tpr,adjust\n", 0) == 0);
  mcc_string_free(csv);

  mcc_sessions* bad = nullptr;
  CHECK(mcc_sessions_load("/nonexistent/manifest.json", &bad) == MCC_ERR_IO);
  mcc_sessions_free(loaded);
  mcc_sessions_free(sessions);
}
