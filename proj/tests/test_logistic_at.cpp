#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "helpers.hpp"
#include "tsord/logistic_at.hpp"
#include "tsord/metrics.hpp"
#include "tsord/multinomial.hpp"

using namespace tsord;
using test::finite_difference;
using test::relative_error;

TEST_SUITE_BEGIN("logistic_at");

namespace {

// Ordinal data with a 1-D latent structure plus distractor columns.
struct Synthetic {
  Matrix x;
  std::vector<int> y;
};

Synthetic ordinal_data(std::size_t n, std::size_t extra_cols, int q, double noise, Rng& rng) {
  Synthetic out;
  out.x = Matrix(n, 1 + extra_cols);
  out.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = 1 + static_cast<int>(rng.next_below(q));
    out.y[i] = label;
    out.x(i, 0) = label + noise * rng.normal();
    for (std::size_t j = 1; j <= extra_cols; ++j) out.x(i, j) = rng.normal();
  }
  // Two distinct classes at minimum.
  out.y[0] = 1;
  out.x(0, 0) = 1 + noise * rng.normal();
  out.y[n - 1] = q;
  out.x(n - 1, 0) = q + noise * rng.normal();
  return out;
}

LogisticATModel bare_model(std::vector<double> w, std::vector<double> theta, double lambda = 0.0) {
  LogisticATModel m;
  m.weights = std::move(w);
  m.thresholds = std::move(theta);
  m.lambda = lambda;
  m.num_classes = static_cast<int>(m.thresholds.size()) + 1;
  return m;
}

}  // namespace

TEST_CASE("scaler") {
  Matrix x(2, 3);
  x(0, 0) = 1;
  x(1, 0) = 3;
  x(0, 1) = 7;
  x(1, 1) = 7;  // constant column
  x(0, 2) = -2;
  x(1, 2) = 2;
  const Scaler s = fit_scaler(x);
  const Matrix z = apply_scaler(s, x);
  CHECK(z(0, 0) == doctest::Approx(-1.0));  // population std of {1,3} is 1
  CHECK(z(1, 0) == doctest::Approx(1.0));
  CHECK(z(0, 1) == 0.0);
  CHECK(z(1, 1) == 0.0);

  SUBCASE("train columns have mean zero after scaling") {
    Rng rng(3);
    const Matrix big = test::random_matrix(40, 7, rng, 3.0);
    const Matrix scaled = apply_scaler(fit_scaler(big), big);
    for (std::size_t j = 0; j < scaled.cols; ++j) {
      double mean = 0.0;
      for (std::size_t i = 0; i < scaled.rows; ++i) mean += scaled(i, j);
      CHECK(std::abs(mean / static_cast<double>(scaled.rows)) < 1e-10);
    }
  }
}

TEST_CASE("at_loss closed-form values") {
  // One middle-class sample, all parameters zero: h(0) + h(0) = 2 ln 2.
  Matrix x(1, 2);
  x(0, 0) = 0.0;
  x(0, 1) = 0.0;
  const auto m = bare_model({0.0, 0.0}, {0.0, 0.0});
  CHECK(at_loss(m, x, {2}) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

  SUBCASE("regularizer vanishes at w = 0") {
    auto reg = bare_model({0.0, 0.0}, {0.0, 0.0}, 10.0);
    CHECK(at_loss(reg, x, {2}) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("sample order does not matter") {
    Rng rng(5);
    Matrix data = test::random_matrix(9, 2, rng);
    std::vector<int> y = test::random_labels(9, 3, rng);
    auto model = bare_model({0.3, -0.7}, {-0.5, 0.8}, 0.25);
    const double base = at_loss(model, data, y);

    Matrix reversed(9, 2);
    std::vector<int> yr(y.rbegin(), y.rend());
    for (std::size_t i = 0; i < 9; ++i) {
      reversed(i, 0) = data(8 - i, 0);
      reversed(i, 1) = data(8 - i, 1);
    }
    CHECK(at_loss(model, reversed, yr) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("at_gradient hand-derived signs") {
  // Lone middle-class sample at w = 0, theta = (0, 0): the lower threshold
  // is pushed up (+1/2), the upper one down (-1/2).
  Matrix x(1, 1);
  x(0, 0) = 0.7;
  const auto m = bare_model({0.0}, {0.0, 0.0});
  const AtGradient g = at_gradient(m, x, {2});
  CHECK(g.thresholds[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.thresholds[1] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("at_gradient matches finite differences") {
  Rng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng.next_below(12);
    const std::size_t f = 1 + rng.next_below(6);
    const int q = 2 + static_cast<int>(rng.next_below(4));
    const Matrix x = test::random_matrix(n, f, rng);
    const std::vector<int> y = test::random_labels(n, q, rng);
    const double lambda = rng.next_double() < 0.3 ? 0.0 : std::pow(10.0, rng.uniform(-3, 1));

    std::vector<double> w(f), theta(static_cast<std::size_t>(q - 1));
    for (double& v : w) v = rng.normal();
    for (double& v : theta) v = rng.normal();
    std::sort(theta.begin(), theta.end());
    const auto model = bare_model(w, theta, lambda);

    const AtGradient g = at_gradient(model, x, y);
    std::vector<double> analytic(g.weights);
    analytic.insert(analytic.end(), g.thresholds.begin(), g.thresholds.end());

    std::vector<double> params(w);
    params.insert(params.end(), theta.begin(), theta.end());
    const auto value = [&](const std::vector<double>& p) {
      auto probe = bare_model({p.begin(), p.begin() + static_cast<long>(f)},
                              {p.begin() + static_cast<long>(f), p.end()}, lambda);
      return at_loss(probe, x, y);
    };
    CHECK(relative_error(analytic, finite_difference(value, params)) < 1e-5);
  }

  SUBCASE("lambda contributes lambda * w") {
    Matrix x(1, 2);
    x(0, 0) = 0.0;
    x(0, 1) = 0.0;  // zero features isolate the regularizer
    auto m = bare_model({2.0, -3.0}, {0.0}, 0.5);
    const AtGradient g = at_gradient(m, x, {1});
    CHECK(g.weights[0] == doctest::Approx(0.5 * 2.0));
    CHECK(g.weights[1] == doctest::Approx(0.5 * -3.0));
  }
}

TEST_CASE("fit on separable ordinal data reaches zero training MAE") {
  Rng rng(11);
  const Synthetic data = ordinal_data(60, 0, 4, 0.05, rng);
  const LogisticATModel m = fit_logistic_at(data.x, data.y, 1e-3);
  CHECK(mae(data.y, m.predict(data.x)) == 0.0);
  CHECK(std::is_sorted(m.thresholds.begin(), m.thresholds.end()));
}

TEST_CASE("heavy regularization shrinks the weights") {
  Rng rng(13);
  const Synthetic data = ordinal_data(50, 2, 3, 0.3, rng);
  const LogisticATModel m = fit_logistic_at(data.x, data.y, 1e6);
  double norm = 0.0;
  for (const double w : m.weights) norm += w * w;
  CHECK(std::sqrt(norm) < 1e-2);
}

TEST_CASE("duplicating every sample keeps the unregularized argmin") {
  Rng rng(17);
  const Synthetic data = ordinal_data(40, 1, 3, 0.8, rng);
  FitOptions opts;
  opts.standardize = false;
  const LogisticATModel base = fit_logistic_at(data.x, data.y, 0.0, opts);

  Matrix doubled(80, data.x.cols);
  std::vector<int> ydoubled(80);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = 0; j < data.x.cols; ++j) {
      doubled(i, j) = data.x(i, j);
      doubled(i + 40, j) = data.x(i, j);
    }
    ydoubled[i] = ydoubled[i + 40] = data.y[i];
  }
  const LogisticATModel twice = fit_logistic_at(doubled, ydoubled, 0.0, opts);
  for (std::size_t j = 0; j < base.weights.size(); ++j) {
    CHECK(twice.weights[j] == doctest::Approx(base.weights[j]).epsilon(1e-6));
  }
  for (std::size_t t = 0; t < base.thresholds.size(); ++t) {
    CHECK(twice.thresholds[t] == doctest::Approx(base.thresholds[t]).epsilon(1e-6));
  }
}

TEST_CASE("prediction rule and cumulative probabilities") {
  // Margin 0 against thresholds (-1, 1).
  auto m = bare_model({1.0}, {-1.0, 1.0});
  Matrix x(1, 1);
  x(0, 0) = 0.0;

  const Matrix cumulative = m.predict_cumulative(x);
  CHECK(cumulative(0, 0) == doctest::Approx(0.2689414213699951).epsilon(1e-10));
  CHECK(cumulative(0, 1) == doctest::Approx(0.7310585786300049).epsilon(1e-10));

  const Matrix proba = m.predict_proba(x);
  CHECK(proba(0, 0) == doctest::Approx(0.26894).epsilon(1e-4));
  CHECK(proba(0, 1) == doctest::Approx(0.46212).epsilon(1e-4));
  CHECK(proba(0, 2) == doctest::Approx(0.26894).epsilon(1e-4));
  CHECK(m.predict(x) == std::vector<int>{2});

  SUBCASE("margin below every threshold lands in class 1") {
    x(0, 0) = -5.0;
    CHECK(m.predict(x) == std::vector<int>{1});
  }
  SUBCASE("boundary belongs to the lower class") {
    x(0, 0) = -1.0;  // exactly theta_1
    CHECK(m.predict(x) == std::vector<int>{1});
  }
  SUBCASE("cumulative rows never decrease") {
    Rng rng(23);
    auto model = bare_model({0.5, -0.25}, {-0.7, -0.1, 1.4});
    const Matrix data = test::random_matrix(20, 2, rng, 2.0);
    const Matrix c = model.predict_cumulative(data);
    for (std::size_t i = 0; i < c.rows; ++i) {
      for (std::size_t j = 0; j + 1 < c.cols; ++j) CHECK(c(i, j) <= c(i, j + 1));
    }
  }
}

TEST_CASE("class probabilities form a simplex and response is monotone") {
  Rng rng(29);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t f = 1 + rng.next_below(4);
    const int q = 2 + static_cast<int>(rng.next_below(4));
    std::vector<double> w(f), theta(static_cast<std::size_t>(q - 1));
    for (double& v : w) v = rng.normal();
    for (double& v : theta) v = 2.0 * rng.normal();
    std::sort(theta.begin(), theta.end());
    auto m = bare_model(w, theta);
    const Matrix x = test::random_matrix(8, f, rng, 2.0);
    const Matrix p = m.predict_proba(x);
    for (std::size_t i = 0; i < p.rows; ++i) {
      double total = 0.0;
      for (std::size_t c = 0; c < p.cols; ++c) {
        CHECK(p(i, c) >= 0.0);
        total += p(i, c);
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
    }
  }

  SUBCASE("larger margin never lowers the predicted class") {
    auto m = bare_model({1.0}, {-0.8, 0.3, 2.0});
    int prev = 1;
    for (double v = -4.0; v <= 4.0; v += 0.05) {
      Matrix x(1, 1);
      x(0, 0) = v;
      const int cls = m.predict(x)[0];
      CHECK(cls >= prev);
      prev = cls;
    }
  }
}

TEST_CASE("proportional odds identity") {
  // log odds-ratio of cumulative probabilities between two inputs is
  // -w.(x2 - x1) for every threshold.
  Rng rng(31);
  const std::size_t f = 3;
  Synthetic data = ordinal_data(45, 2, 3, 0.5, rng);
  const LogisticATModel m = fit_logistic_at(data.x, data.y, 0.1);

  const Matrix x = test::random_matrix(6, f, rng);
  const Matrix cumulative = m.predict_cumulative(x);
  const std::vector<double> margins = m.decision_values(x);
  for (std::size_t a = 0; a < x.rows; ++a) {
    for (std::size_t b = 0; b < x.rows; ++b) {
      for (std::size_t t = 0; t < m.thresholds.size(); ++t) {
        const double pa = cumulative(a, t), pb = cumulative(b, t);
        const double log_odds_ratio = std::log(pa / (1 - pa)) - std::log(pb / (1 - pb));
        CHECK(log_odds_ratio == doctest::Approx(margins[b] - margins[a]).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("lambda grid and cross-validation") {
  const std::vector<double> grid = lambda_grid();
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(grid.back() == doctest::Approx(1e3).epsilon(1e-12));
  for (int i = 0; i < 10; ++i) {
    CHECK(grid[static_cast<std::size_t>(i)] ==
          doctest::Approx(std::pow(10.0, -3.0 + 6.0 * i / 9.0)).epsilon(1e-12));
  }

  Rng rng(37);
  const Synthetic data = ordinal_data(50, 1, 3, 0.4, rng);
  const CVReport report = cross_validate_lambda(data.x, data.y);
  CHECK(report.folds == 5);
  CHECK(report.fold_mae.rows == 10);
  CHECK(report.fold_mae.cols == 5);
  CHECK(report.warnings.empty());
  CHECK(std::find(grid.begin(), grid.end(), report.chosen_lambda) != grid.end());

  SUBCASE("tiny classes reduce the fold count with a warning") {
    Matrix x(7, 1);
    std::vector<int> y{1, 1, 1, 2, 2, 2, 3};
    for (std::size_t i = 0; i < 7; ++i) x(i, 0) = static_cast<double>(y[i]) + 0.01 * i;
    const CVReport r = cross_validate_lambda(x, y);
    CHECK(r.folds == 2);
    CHECK(!r.warnings.empty());
  }
}

TEST_CASE("cv tie-breaking prefers the larger lambda") {
  // A constant feature column makes every grid point score identically.
  std::vector<int> y(20);
  for (std::size_t i = 0; i < 20; ++i) y[i] = i < 10 ? 1 : 2;
  Matrix flat(20, 1, 0.0);
  const CVReport r = cross_validate_lambda(flat, y);
  double first = r.fold_mae(0, 0);
  bool all_equal = true;
  for (const double v : r.fold_mae.data) all_equal = all_equal && v == first;
  CHECK(all_equal);
  CHECK(r.chosen_lambda == doctest::Approx(1e3).epsilon(1e-12));
}

TEST_CASE("fit rejects degenerate label sets") {
  Matrix x(4, 1);
  CHECK_THROWS(fit_logistic_at(x, {2, 2, 2, 2}, 0.1));
  CHECK_THROWS(fit_multinomial(x, {1, 1, 1, 1}, 0.1));
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("multinomial");

TEST_CASE("probabilities sum to one") {
  Rng rng(41);
  const Matrix x = test::random_matrix(30, 4, rng);
  const std::vector<int> y = test::random_labels(30, 3, rng);
  const MultinomialModel m = fit_multinomial(x, y, 0.5);
  const Matrix p = m.predict_proba(x);
  for (std::size_t i = 0; i < p.rows; ++i) {
    double total = 0.0;
    for (std::size_t c = 0; c < p.cols; ++c) total += p(i, c);
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(43);
  for (int rep = 0; rep < 25; ++rep) {
    const std::size_t n = 2 + rng.next_below(10);
    const std::size_t f = 1 + rng.next_below(5);
    const int q = 2 + static_cast<int>(rng.next_below(3));
    const Matrix x = test::random_matrix(n, f, rng);
    const std::vector<int> y = test::random_labels(n, q, rng);
    const double lambda = std::pow(10.0, rng.uniform(-3, 0));

    MultinomialModel m;
    m.weights = test::random_matrix(static_cast<std::size_t>(q), f, rng);
    m.intercepts.resize(static_cast<std::size_t>(q));
    for (double& b : m.intercepts) b = rng.normal();
    m.lambda = lambda;
    m.num_classes = q;

    const MultinomialGradient g = multinomial_gradient(m, x, y);
    std::vector<double> analytic(g.weights.data);
    analytic.insert(analytic.end(), g.intercepts.begin(), g.intercepts.end());

    std::vector<double> params(m.weights.data);
    params.insert(params.end(), m.intercepts.begin(), m.intercepts.end());
    const auto value = [&](const std::vector<double>& p) {
      MultinomialModel probe = m;
      std::copy(p.begin(), p.begin() + static_cast<long>(static_cast<std::size_t>(q) * f),
                probe.weights.data.begin());
      probe.intercepts.assign(p.begin() + static_cast<long>(static_cast<std::size_t>(q) * f), p.end());
      return multinomial_loss(probe, x, y);
    };
    CHECK(relative_error(analytic, finite_difference(value, params)) < 1e-5);
  }
}

TEST_CASE("learns separable data") {
  Rng rng(47);
  Matrix x(45, 2);
  std::vector<int> y(45);
  for (std::size_t i = 0; i < 45; ++i) {
    const int cls = static_cast<int>(i % 3) + 1;
    y[i] = cls;
    x(i, 0) = cls == 1 ? -2 : (cls == 2 ? 0 : 2);
    x(i, 0) += 0.1 * rng.normal();
    x(i, 1) = rng.normal();
  }
  const MultinomialModel m = fit_multinomial(x, y, 1e-3);
  CHECK(ccr(y, m.predict(x)) == doctest::Approx(1.0));
}

TEST_SUITE_END();
