#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mcc/baselines.hpp"
#include "mcc/datasets.hpp"
#include "mcc/error.hpp"
#include "oracles.hpp"

using mcc::Label;
using mcc::Series;
namespace bl = mcc::baselines;

namespace {

// Sort everything, take the first k, count votes.
Label knn_full_sort(const std::vector<Series>& xs, const std::vector<Label>& ys, const Series& q,
                    std::size_t k) {
  std::vector<std::size_t> idx(xs.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return oracle::euclidean(xs[a], q) < oracle::euclidean(xs[b], q);
  });
  std::size_t pos = 0;
  for (std::size_t i = 0; i < k; ++i) pos += ys[idx[i]] == Label::positive ? 1 : 0;
  return 2 * pos >= k ? Label::positive : Label::negative;
}

}  // namespace

TEST_CASE("knn small examples") {
  const bl::InstanceStore store(mcc::Metric::euclidean(), {{0, 0}, {1, 0}, {5, 5}, {6, 5}, {5, 6}},
                                {Label::positive, Label::positive, Label::negative, Label::negative,
                                 Label::negative});
  CHECK(bl::knn_predict(store, Series{5, 5}, 1) == Label::negative);
  CHECK(bl::knn_predict(store, Series{0, 0}, 1) == Label::positive);
  CHECK(bl::knn_predict(store, Series{1, 1}, 3) == Label::positive);
  CHECK(bl::knn_predict(store, Series{4, 4}, 3) == Label::negative);

  const bl::InstanceStore line(mcc::Metric::euclidean(), {{0}, {1}, {3}, {4}},
                               {Label::positive, Label::positive, Label::negative, Label::negative});
  CHECK(bl::knn_predict(line, Series{2.9}, 4) == Label::positive);  // 2-2 split
  CHECK(bl::knn_predict(line, Series{2.9}, 3) == Label::negative);
}

TEST_CASE("knn agrees with a full sort") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 5 + trial % 20;
    std::vector<Series> xs;
    std::vector<Label> ys;
    for (std::size_t i = 0; i < n; ++i) {
      xs.push_back(oracle::random_series(rng, 3));
      ys.push_back(rng() % 2 ? Label::positive : Label::negative);
    }
    const bl::InstanceStore store(mcc::Metric::euclidean(), xs, ys);
    const auto q = oracle::random_series(rng, 3);
    for (std::size_t k : {1u, 3u, 4u, 5u}) CHECK(bl::knn_predict(store, q, k) == knn_full_sort(xs, ys, q, k));
  }
}

TEST_CASE("knn with dtw accepts unequal lengths") {
  const bl::InstanceStore store(mcc::Metric::dynamic_time_warping(), {{1, 2, 3}, {9, 9}},
                                {Label::positive, Label::negative});
  CHECK(bl::knn_predict(store, Series{1, 2, 2, 3}, 1) == Label::positive);
}

TEST_CASE("instance store errors") {
  auto kind_of = [](auto&& fn) {
    try {
      fn();
    } catch (const mcc::Error& e) {
      return e.kind();
    }
    return mcc::ErrorKind::internal;
  };
  const auto euclid = mcc::Metric::euclidean();
  CHECK(kind_of([&] { bl::InstanceStore(euclid, {}, {}); }) == mcc::ErrorKind::domain);
  CHECK(kind_of([&] { bl::InstanceStore(euclid, {{1}}, {}); }) == mcc::ErrorKind::dimension);
  CHECK(kind_of([&] {
          bl::InstanceStore(euclid, {{1}, {1, 2}}, {Label::positive, Label::negative});
        }) == mcc::ErrorKind::dimension);
  CHECK(kind_of([&] { bl::InstanceStore(euclid, {{}}, {Label::positive}); }) == mcc::ErrorKind::domain);
  const bl::InstanceStore store(euclid, {{1}, {2}}, {Label::positive, Label::negative});
  CHECK(kind_of([&] { bl::knn_predict(store, Series{1}, 0); }) == mcc::ErrorKind::domain);
  CHECK(kind_of([&] { bl::knn_predict(store, Series{1}, 3); }) == mcc::ErrorKind::domain);
}

TEST_CASE("nearest centroid") {
  const std::vector<Series> pos = {{0, 0}, {2, 0}};
  const std::vector<Series> neg = {{10, 10}, {10, 12}};
  const auto model = bl::nearest_centroid_train(pos, neg, mcc::Metric::euclidean());
  CHECK(model.positive == Series{1, 0});
  CHECK(model.negative == Series{10, 11});
  CHECK(bl::nearest_centroid_predict(model, Series{1, 1}) == Label::positive);
  CHECK(bl::nearest_centroid_predict(model, Series{9, 9}) == Label::negative);

  const bl::NearestCentroid tie{mcc::Metric::euclidean(), {0, 0}, {2, 0}};
  CHECK(bl::nearest_centroid_predict(tie, Series{1, 5}) == Label::positive);

  std::vector<Series> shuffled = pos;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(bl::nearest_centroid_train(shuffled, neg, mcc::Metric::euclidean()).positive == model.positive);

  CHECK_THROWS_AS(bl::nearest_centroid_train({}, neg, mcc::Metric::euclidean()), mcc::Error);

  const auto dtw = bl::nearest_centroid_train(std::vector<Series>{{1, 1, 1}, {3, 3, 3}},
                                              std::vector<Series>{{9, 9}}, mcc::Metric::dynamic_time_warping());
  for (double v : dtw.positive) CHECK(v == doctest::Approx(2.0));
}

TEST_CASE("one centroid per class cannot fit the snowman") {
  const auto ds = mcc::data::gen_snowman(1334);
  const auto pos = ds.of(Label::positive), neg = ds.of(Label::negative);
  const auto nc = bl::nearest_centroid_train(pos, neg, mcc::Metric::euclidean());
  std::size_t nc_correct = 0;
  for (std::size_t i = 0; i < ds.size(); ++i)
    nc_correct += bl::nearest_centroid_predict(nc, ds.samples[i]) == ds.labels[i] ? 1 : 0;

  mcc::TrainConfig cfg;
  cfg.stop = {mcc::StopMode::train_accuracy, 0.85};
  const auto model = mcc::train(pos, neg, cfg);
  CHECK(static_cast<double>(nc_correct) / ds.size() < mcc::train_accuracy(model, pos, neg));
}

TEST_CASE("binary sizes") {
  const bl::InstanceStore store(mcc::Metric::euclidean(), {{1, 2, 3}, {4, 5, 6}},
                                {Label::positive, Label::negative});
  CHECK(bl::store_to_binary(store).size() == 14 + 2 * (1 + 4 + 12));
  const bl::NearestCentroid nc{mcc::Metric::euclidean(), {1, 2}, {3, 4}};
  CHECK(bl::centroids_to_binary(nc).size() == 14 + 2 * (1 + 4 + 8));
}
