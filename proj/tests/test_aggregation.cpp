#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "delco/aggregation/ensemble.hpp"
#include "delco/copula/copula.hpp"
#include "delco/data/partition.hpp"
#include "delco/data/synthetic.hpp"
#include "oracles.hpp"

using namespace delco;

namespace {

OutputModel to_model(const oracle::Params& p) {
  std::vector<double> theta;
  for (const auto& tk : p.theta)
    for (const auto& row : tk) theta.insert(theta.end(), row.begin(), row.end());
  return OutputModel::from_parameters(p.gamma, theta, p.m);
}

std::vector<int> random_z(int m, int l, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> u(0, l - 1);
  std::vector<int> z(m);
  for (auto& v : z) v = u(rng);
  return z;
}

}  // namespace

TEST_CASE("smoothed estimates") {
  const PredictionMatrix empty(0, 2);
  const auto m0 = fit_output_model(empty, {}, 2);
  CHECK(m0.gamma(0) == 0.5);
  CHECK(m0.gamma(1) == 0.5);
  for (int k = 0; k < 2; ++k)
    for (int y = 0; y < 2; ++y) CHECK(m0.theta(k, y, 0) == 0.5);

  PredictionMatrix one(1, 1);
  one.at(0, 0) = 0;
  const std::vector<int> y0{0};
  const auto m1 = fit_output_model(one, y0, 2);
  CHECK(m1.gamma(0) == doctest::Approx(2.0 / 3));
  CHECK(m1.gamma(1) == doctest::Approx(1.0 / 3));
  CHECK(m1.theta(0, 0, 0) == doctest::Approx(2.0 / 3));
  CHECK(m1.theta(0, 0, 1) == doctest::Approx(1.0 / 3));
  CHECK(m1.theta(0, 1, 0) == 0.5);

  const auto m3 = OutputModel::from_parameters({0.5, 0.25, 0.25}, {0.2, 0.3, 0.5, 0.1, 0.1, 0.8, 0.4, 0.4, 0.2}, 1);
  CHECK(m3.cumulative(0, 0, 0) == doctest::Approx(0.2));
  CHECK(m3.cumulative(0, 0, 1) == doctest::Approx(0.5));
  CHECK(m3.cumulative(0, 0, 2) == doctest::Approx(1.0));
  CHECK_THROWS(OutputModel::from_parameters({0.5, 0.6}, {0.5, 0.5, 0.5, 0.5}, 1));
  CHECK_THROWS(OutputModel::from_parameters({0.5, 0.5}, {1.0, 0.0, 0.5, 0.5}, 1));

  // Invariants on a random fit, and count additivity.
  std::mt19937_64 rng(8);
  PredictionMatrix z(300, 4);
  std::vector<int> y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    y[i] = static_cast<int>(rng() % 3);
    for (int k = 0; k < 4; ++k) z.at(i, k) = static_cast<int>(rng() % 3);
  }
  const auto fit = fit_output_model(z, y, 3);
  CHECK(std::accumulate(fit.gamma_vector().begin(), fit.gamma_vector().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 0; k < 4; ++k)
    for (int c = 0; c < 3; ++c) {
      double s = 0;
      for (int j = 0; j < 3; ++j) {
        CHECK(fit.theta(k, c, j) > 0);
        s += fit.theta(k, c, j);
        if (j > 0) CHECK(fit.cumulative(k, c, j) >= fit.cumulative(k, c, j - 1));
      }
      CHECK(std::abs(s - 1) <= 1e-12);
      CHECK(std::abs(fit.cumulative(k, c, 2) - 1) <= 1e-12);
    }

  OutputCounts a(4, 3), b(4, 3), all(4, 3);
  for (std::size_t i = 0; i < 300; ++i) {
    (i < 120 ? a : b).add(z.row(i), y[i]);
    all.add(z.row(i), y[i]);
  }
  a += b;
  CHECK(a == all);
  CHECK(OutputModel(a) == fit);

  ByteWriter out;
  encode(out, fit);
  CHECK(out.bytes().size() == 8 * (3 + 4 * 9));
  ByteReader in(out.bytes());
  CHECK(decode_output_model(in, 4, 3) == fit);
}

TEST_CASE("scores") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    const int m = 1 + static_cast<int>(rng() % 3);
    const int l = 2 + static_cast<int>(rng() % 2);
    const auto p = oracle::random_params(m, l, rng);
    const auto model = to_model(p);
    const auto z = random_z(m, l, rng);

    // Independent model in log space.
    const auto s0 = ensemble_log_scores(model, z, 0.0);
    for (int y = 0; y < l; ++y) {
      double ref = std::log(p.gamma[y]);
      for (int k = 0; k < m; ++k) ref += std::log(p.theta[k][y][z[k]]);
      CHECK(s0[y] == ref);
    }

    // Posterior against the enumeration oracle.
    const double lambda = m >= 2 ? 0.5 : 0.0;
    const auto s = ensemble_log_scores(model, z, lambda);
    const auto ref = oracle::posterior(p, z, lambda);
    const double top = *std::max_element(s.begin(), s.end());
    double norm = 0;
    for (double v : s) norm += std::exp(v - top);
    double total = 0;
    for (int y = 0; y < l; ++y) {
      const double post = std::exp(s[y] - top) / norm;
      total += post;
      CHECK(std::abs(post - ref[y]) <= 1e-10);
    }
    CHECK(std::abs(total - 1) <= 1e-12);
  }
}

TEST_CASE("single member ignores lambda") {
  const auto model = OutputModel::from_parameters({0.3, 0.7}, {0.9, 0.1, 0.4, 0.6}, 1);
  const int z[] = {0};
  const auto a = ensemble_log_scores(model, z, 0.0);
  const auto b = ensemble_log_scores(model, z, 0.7);
  CHECK(a == b);
  CHECK(argmax_first(a) == (0.3 * 0.9 > 0.7 * 0.4 ? 0 : 1));
}

TEST_CASE("member order does not matter") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const auto p = oracle::random_params(3, 3, rng);
    auto q = p;
    std::swap(q.theta[0], q.theta[2]);
    const auto z = random_z(3, 3, rng);
    const std::vector<int> zq{z[2], z[1], z[0]};
    const auto a = ensemble_log_scores(to_model(p), z, 0.4);
    const auto b = ensemble_log_scores(to_model(q), zq, 0.4);
    for (int y = 0; y < 3; ++y) CHECK(a[y] == doctest::Approx(b[y]).epsilon(1e-12));
  }
}

TEST_CASE("near-identity confusion gives a prior-weighted majority") {
  // Each member is right with probability 1 - e.
  const double e = 1e-3;
  for (double g0 : {0.5, 0.3, 0.8}) {
    const auto model = OutputModel::from_parameters({g0, 1 - g0}, {1 - e, e, e, 1 - e, 1 - e, e, e, 1 - e, 1 - e, e, e, 1 - e}, 3);
    for (int c = 0; c < 8; ++c) {
      const std::vector<int> z{c & 1, (c >> 1) & 1, (c >> 2) & 1};
      const int ones = z[0] + z[1] + z[2];
      CHECK(argmax_first(ensemble_log_scores(model, z, 0.0)) == (ones >= 2 ? 1 : 0));
    }
  }
}

TEST_CASE("ties go to the lowest class") {
  const auto model = OutputModel::from_parameters({0.5, 0.5}, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, 2);
  const int z[] = {1, 0};
  CHECK(argmax_first(ensemble_log_scores(model, z, 0.0)) == 0);
  const double v[] = {1.0, 3.0, 3.0};
  CHECK(argmax_first(v) == 1);
}

TEST_CASE("grid search") {
  const auto model = OutputModel::from_parameters({0.5, 0.5}, {0.8, 0.2, 0.3, 0.7, 0.6, 0.4, 0.1, 0.9}, 2);
  PredictionMatrix z(4, 2);
  const std::vector<int> y{0, 1, 0, 1};
  const double zero[] = {0.0};
  CHECK(grid_search_lambda(model, z, y, zero) == 0.0);

  const double flat[] = {-0.6, -0.3, 0.3, 0.6};
  const std::uint64_t equal[] = {5, 5, 5, 5};
  CHECK(select_lambda(flat, equal) == -0.3);
  const std::uint64_t peak[] = {1, 5, 5, 9};
  CHECK(select_lambda(flat, peak) == 0.6);
  const double sym[] = {-0.2, 0.2};
  const std::uint64_t both[] = {3, 3};
  CHECK(select_lambda(sym, both) == -0.2);

  CHECK(default_grid(1) == std::vector<double>{0.0});
  CHECK(default_grid(3) == lambda_grid(3, 101));
}

TEST_CASE("training pipeline") {
  const auto data = gen_blobs(400, 3);
  const auto plan = partition_synthetic(data, RegionScheme::kBlobs2);
  DelcoOptions opts;
  opts.n_val = 40;
  opts.seed = 9;
  const auto a = fit_delco_detailed(data, plan, opts);
  const auto b = fit_delco_detailed(data, plan, opts);
  CHECK(a.ensemble.lambda_hat() == b.ensemble.lambda_hat());
  CHECK(a.split.val.size() == 40);
  const auto test = gen_blobs(2000, 4);
  CHECK(a.ensemble.predict_all(test) == b.ensemble.predict_all(test));
  CHECK(accuracy(a.ensemble.predict_all(test), test) > 0.85);

  // Retraining changes the members but keeps the estimates.
  opts.retrain = true;
  const auto r = fit_delco_detailed(data, plan, opts);
  CHECK(r.ensemble.model() == a.ensemble.model());
  CHECK(r.ensemble.lambda_hat() == a.ensemble.lambda_hat());
  CHECK(r.first_pass[0].weights() == a.first_pass[0].weights());
  CHECK_FALSE(r.final_members[0].weights() == a.first_pass[0].weights());

  // A single node with grid {0}: one member composed with its confusion correction.
  const PartitionPlan single(std::vector<int>(data.size(), 0), 1);
  DelcoOptions o1;
  o1.n_val = 40;
  o1.grid = {0.0};
  const auto s = fit_delco(data, single, o1);
  CHECK(s.num_classifiers() == 1);
  CHECK(s.lambda_hat() == 0.0);
  for (std::size_t i = 0; i < 50; ++i) {
    const int z = s.members()[0].predict(test.row(i));
    std::vector<double> post(3);
    for (int y = 0; y < 3; ++y) post[y] = s.model().gamma(y) * s.model().theta(0, y, z);
    CHECK(s.predict(test.row(i)) == argmax_first(post));
  }

  ByteWriter out;
  encode(out, r.ensemble);
  ByteReader in(out.bytes());
  const auto back = decode_ensemble(in);
  CHECK(in.done());
  CHECK(back.lambda_hat() == r.ensemble.lambda_hat());
  CHECK(back.model() == r.ensemble.model());
  CHECK(back.predict_all(test) == r.ensemble.predict_all(test));

  CHECK_THROWS(CopulaEnsemble(r.ensemble.members(), r.ensemble.model(), 1.5));
}
