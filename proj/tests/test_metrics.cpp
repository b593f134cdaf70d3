#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tsord/metrics.hpp"

using namespace tsord;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("ccr") {
  CHECK(ccr({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(ccr({1, 2, 3}, {2, 3, 1}) == 0.0);
  CHECK(ccr({1, 2, 3}, {1, 3, 3}) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS(ccr({}, {}));
}

TEST_CASE("mae") {
  CHECK(mae({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(mae({1, 2, 3}, {1, 3, 1}) == doctest::Approx(1.0));
  // Constant prediction Q on all-class-1 data is the worst case Q-1.
  CHECK(mae({1, 1, 1, 1}, {5, 5, 5, 5}) == doctest::Approx(4.0));
}

TEST_CASE("qwk") {
  CHECK(qwk({1, 2, 3, 2}, {1, 2, 3, 2}) == doctest::Approx(1.0));
  CHECK(qwk({1, 1, 2, 2}, {2, 2, 1, 1}, 2) == doctest::Approx(-1.0));
  CHECK_THROWS(qwk({1, 1, 1}, {1, 1, 1}, 3));  // degenerate denominator

  SUBCASE("chance-level predictions average to zero over permutations") {
    Rng rng(3);
    const std::size_t n = 200;
    std::vector<int> y(n), pred(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1 + static_cast<int>(rng.next_below(4));
      pred[i] = 1 + static_cast<int>(rng.next_below(4));
    }
    double mean = 0.0;
    const int trials = 2000;
    std::vector<int> shuffled(pred);
    for (int t = 0; t < trials; ++t) {
      rng.shuffle(shuffled);
      mean += qwk(y, shuffled, 4);
    }
    mean /= trials;
    CHECK(std::abs(mean) < 0.02);
  }
}

TEST_CASE("one_off") {
  CHECK(one_off({1, 2, 3}, {1, 2, 3}) == 1.0);
  CHECK(one_off({1, 2, 3}, {2, 3, 1}) == doctest::Approx(2.0 / 3.0));
  SUBCASE("two-class problems are always 1") {
    Rng rng(5);
    const std::vector<int> y = test::random_labels(30, 2, rng);
    const std::vector<int> p = test::random_labels(30, 2, rng);
    CHECK(one_off(y, p) == 1.0);
  }
}

TEST_CASE("confusion matrix") {
  const ConfusionMatrix cm = confusion({2}, {3}, 4);
  CHECK(cm.at(2, 3) == 1);
  CHECK(cm.total == 1);

  const std::vector<int> y{1, 1, 2, 3, 3, 3};
  const std::vector<int> p{1, 2, 2, 3, 1, 3};
  const ConfusionMatrix full = confusion(y, p, 3);
  for (int c = 1; c <= 3; ++c) {
    CHECK(full.row_total(c) == std::count(y.begin(), y.end(), c));
    CHECK(full.col_total(c) == std::count(p.begin(), p.end(), c));
  }
  SUBCASE("perfect predictions are diagonal") {
    const ConfusionMatrix diag = confusion(y, y, 3);
    for (int i = 1; i <= 3; ++i) {
      for (int j = 1; j <= 3; ++j) {
        if (i != j) CHECK(diag.at(i, j) == 0);
      }
    }
  }
  SUBCASE("labels outside 1..Q rejected") { CHECK_THROWS(confusion({1, 5}, {1, 1}, 4)); }
}

TEST_CASE("banded one-off equals the pointwise form") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.next_below(40);
    const int q = 2 + static_cast<int>(rng.next_below(5));
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1 + static_cast<int>(rng.next_below(q));
      p[i] = 1 + static_cast<int>(rng.next_below(q));
    }
    CHECK(one_off(y, p) == doctest::Approx(one_off_banded(confusion(y, p, q))).epsilon(1e-14));
  }
}

TEST_CASE("metric relations") {
  Rng rng(9);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 1 + rng.next_below(30);
    const int q = 2 + static_cast<int>(rng.next_below(4));
    std::vector<int> y(n), p(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 1 + static_cast<int>(rng.next_below(q));
      p[i] = 1 + static_cast<int>(rng.next_below(q));
    }
    const double c = ccr(y, p);
    const double o = one_off(y, p);
    CHECK(c <= o);
    // The gap is exactly the fraction of one-off errors.
    long exactly_one = 0;
    for (std::size_t i = 0; i < n; ++i) exactly_one += std::abs(y[i] - p[i]) == 1;
    CHECK(o - c == doctest::Approx(static_cast<double>(exactly_one) / n).epsilon(1e-14));
    CHECK((mae(y, p) == 0.0) == (c == 1.0));
  }
}

TEST_CASE("sample order invariance") {
  Rng rng(11);
  std::vector<int> y = test::random_labels(25, 4, rng);
  std::vector<int> p = test::random_labels(25, 4, rng);
  const double c = ccr(y, p), m = mae(y, p), k = qwk(y, p, 4), o = one_off(y, p);

  std::vector<std::size_t> perm(25);
  for (std::size_t i = 0; i < 25; ++i) perm[i] = i;
  rng.shuffle(perm);
  std::vector<int> y2(25), p2(25);
  for (std::size_t i = 0; i < 25; ++i) {
    y2[i] = y[perm[i]];
    p2[i] = p[perm[i]];
  }
  CHECK(ccr(y2, p2) == c);
  CHECK(mae(y2, p2) == m);
  CHECK(qwk(y2, p2, 4) == doctest::Approx(k).epsilon(1e-14));
  CHECK(one_off(y2, p2) == o);
}

TEST_SUITE_END();
