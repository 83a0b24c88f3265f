#include <doctest.h>

#include <cmath>
#include <random>

#include "delco/data/synthetic.hpp"
#include "delco/learner/classifier.hpp"
#include "delco/learner/logreg.hpp"
#include "oracles.hpp"

using namespace delco;

namespace {

LabeledDataset gaussian_rows(std::size_t n, int d, int l, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FeatureMatrix x(n, d);
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) x(i, j) = g(rng);
    y[i] = static_cast<int>(i % l);
  }
  return LabeledDataset(std::move(x), std::move(y), l);
}

}  // namespace

TEST_CASE("separable one-dimensional data is fit exactly") {
  FeatureMatrix x(2, 1);
  x << -1, 1;
  const LabeledDataset d(x, {0, 1}, 2);
  const auto clf = train_logreg(d);
  CHECK(accuracy(clf.predict_all(d), d) == 1.0);
}

TEST_CASE("single class node predicts that class everywhere") {
  FeatureMatrix x(3, 2);
  x << 1, 2, -3, 4, 0, 0;
  const LabeledDataset d(x, {2, 2, 2}, 3);
  const auto clf = train_logreg(d);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0, 100);
  for (int i = 0; i < 50; ++i) {
    const double p[] = {g(rng), g(rng)};
    CHECK(clf.predict(p) == 2);
  }
}

TEST_CASE("absent classes keep zero weights") {
  FeatureMatrix x(4, 1);
  x << -2, -1, 1, 2;
  const LabeledDataset d(x, {0, 0, 2, 2}, 3);
  const auto clf = train_logreg(d);
  CHECK(clf.weights().row(1).isZero());
  CHECK(clf.weights().allFinite());
  for (double v = -1e4; v <= 1e4; v += 0.5) {
    const double p[] = {v};
    CHECK(clf.predict(p) != 1);
  }
}

TEST_CASE("absent class is never predicted far from the data") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  FeatureMatrix x(60, 2);
  std::vector<int> y(60);
  for (int i = 0; i < 60; ++i) {
    y[i] = i % 2;
    x(i, 0) = -2 + 0.5 * g(rng);
    x(i, 1) = (y[i] ? 2 : -2) + 0.5 * g(rng);
  }
  const auto clf = train_logreg(LabeledDataset(x, y, 3));
  std::normal_distribution<double> wide(0, 50);
  for (int i = 0; i < 2000; ++i) {
    const double p[] = {wide(rng), wide(rng)};
    CHECK(clf.predict(p) != 2);
  }
}

TEST_CASE("prediction rules") {
  const auto z = LinearClassifier::zeros(3, 2);
  const double x[] = {4.0, -1.0};
  CHECK(z.predict(x) == 0);
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(3, 3);
  w(2, 2) = 50;
  const LinearClassifier big(w);
  CHECK(big.predict(x) == 2);
  const double wrong_dim[] = {1.0};
  CHECK_THROWS(big.predict(wrong_dim));
  Eigen::MatrixXd bad = w;
  bad(0, 0) = std::nan("");
  CHECK_THROWS(LinearClassifier{bad});

  // Against an explicit softmax.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd r(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = g(rng);
  const LinearClassifier rc(r);
  for (int t = 0; t < 100; ++t) {
    const double p[] = {g(rng), g(rng), g(rng)};
    std::vector<double> prob(4);
    double s = 0;
    for (int c = 0; c < 4; ++c) s += (prob[c] = std::exp(r(c, 0) * p[0] + r(c, 1) * p[1] + r(c, 2) * p[2] + r(c, 3)));
    const auto best = std::max_element(prob.begin(), prob.end()) - prob.begin();
    CHECK(rc.predict(p) == best);
    const auto lib = rc.probabilities(p);
    CHECK(lib.sum() == doctest::Approx(1.0));
    CHECK(lib(best) == doctest::Approx(prob[best] / s));
  }

  // Adding the same row to every class changes nothing.
  Eigen::MatrixXd shifted = r;
  for (int c = 0; c < 4; ++c) shifted.row(c) += Eigen::RowVector4d(0.3, -2, 1, 5);
  const LinearClassifier sc(shifted);
  for (int t = 0; t < 100; ++t) {
    const double p[] = {g(rng), g(rng), g(rng)};
    CHECK(sc.predict(p) == rc.predict(p));
  }
}

TEST_CASE("gradient against central differences") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int inst = 0; inst < 10; ++inst) {
    const auto d = gaussian_rows(20, 4, 3, rng);
    Eigen::MatrixXd w(3, 5);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) w(i, j) = g(rng);
    std::vector<std::vector<double>> xs;
    for (std::size_t i = 0; i < d.size(); ++i) xs.emplace_back(d.row(i).begin(), d.row(i).end());

    Eigen::MatrixXd grad;
    const double loss = cross_entropy(w, d, &grad);
    CHECK(loss == doctest::Approx(static_cast<double>(oracle::cross_entropy(w, xs, d.labels()))).epsilon(1e-12));
    const double h = 1e-5;
    double worst = 0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) {
        Eigen::MatrixXd wp = w, wm = w;
        wp(i, j) += h;
        wm(i, j) -= h;
        const auto fd = (oracle::cross_entropy(wp, xs, d.labels()) - oracle::cross_entropy(wm, xs, d.labels())) / (2 * h);
        const double rel = std::abs(grad(i, j) - static_cast<double>(fd)) / std::max(1e-8, std::abs(static_cast<double>(fd)));
        worst = std::max(worst, rel);
      }
    CHECK(worst <= 1e-5);
  }
}

TEST_CASE("loss never increases along the descent") {
  const auto d = gen_moons(200, 4);
  TrainOptions opts;
  opts.record_losses = true;
  const auto rep = train_logreg_report(d, opts);
  REQUIRE(rep.losses.size() >= 2);
  for (std::size_t i = 1; i < rep.losses.size(); ++i) CHECK(rep.losses[i] <= rep.losses[i - 1] + 1e-12);
  CHECK(rep.iterations <= opts.max_iterations);
  CHECK(train_logreg(d).weights() == rep.model.weights());
}

TEST_CASE("non-finite input aborts") {
  FeatureMatrix x(2, 1);
  x << 1e308, -1e308;
  x(0, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS(train_logreg(LabeledDataset(x, {0, 1}, 2)));
}

TEST_CASE("serialisation") {
  std::mt19937_64 rng(5);
  const auto d = gaussian_rows(30, 3, 3, rng);
  const auto clf = train_logreg(d);
  ByteWriter out;
  encode(out, clf);
  CHECK(out.bytes().size() == encoded_size(3, 3));
  CHECK(encoded_size(3, 3) == 16 + 8 * 3 * 4);
  ByteReader in(out.bytes());
  const auto back = decode_linear(in);
  CHECK(in.done());
  CHECK(back.weights() == clf.weights());
  ByteReader truncated(std::span(out.bytes()).first(20));
  CHECK_THROWS(decode_linear(truncated));
}

TEST_CASE("type-erased handle") {
  const auto lin = LinearClassifier::zeros(2, 1);
  const Classifier a(lin);
  const Classifier b = a;
  const Classifier c(lin);
  CHECK(a.shares_model_with(b));
  CHECK_FALSE(a.shares_model_with(c));
  CHECK(a.linear() != nullptr);
  const double x[] = {1.0};
  CHECK(a.predict(x) == 0);
}
