#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "delco/data/csv.hpp"
#include "delco/data/partition.hpp"
#include "delco/data/synthetic.hpp"

using namespace delco;

namespace {

LabeledDataset make(std::vector<std::vector<double>> rows, std::vector<int> labels, int l) {
  FeatureMatrix x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) x(i, j) = rows[i][j];
  return LabeledDataset(std::move(x), std::move(labels), l);
}

std::size_t count_label(const LabeledDataset& d, int y) {
  return static_cast<std::size_t>(std::count(d.labels().begin(), d.labels().end(), y));
}

}  // namespace

TEST_CASE("dataset invariants are enforced") {
  CHECK_THROWS(make({{1.0}, {2.0}}, {0}, 2));
  CHECK_THROWS(make({{1.0}}, {2}, 2));
  CHECK_THROWS(make({{1.0}}, {-1}, 2));
  CHECK_THROWS(make({{1.0}}, {0}, 1));
  const auto d = make({{1, 2}, {3, 4}, {5, 6}}, {0, 1, 1}, 2);
  CHECK(d.size() == 3);
  CHECK(d.dim() == 2);
  CHECK(d.row(1)[1] == 4.0);
  CHECK(d.class_counts() == std::vector<std::size_t>{1, 2});
  const std::vector<std::size_t> rows{2, 0};
  const auto s = d.subset(rows);
  CHECK(s.label(0) == 1);
  CHECK(s.row(1)[0] == 1.0);
}

TEST_CASE("moons") {
  const auto d = gen_moons(400, 1);
  CHECK(d.size() == 400);
  CHECK(d.dim() == 2);
  CHECK(count_label(d, 0) == 200);
  CHECK(count_label(d, 1) == 200);
  CHECK_THROWS(gen_moons(401, 1));
  CHECK_THROWS(gen_moons(0, 1));
  CHECK(gen_moons(100, 7) == gen_moons(100, 7));
  CHECK_FALSE(gen_moons(100, 7) == gen_moons(100, 8));

  const auto clean = gen_moons(200, 3, 0.0);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto x = clean.row(i);
    if (clean.label(i) == 0) {
      CHECK(std::abs(x[0] * x[0] + x[1] * x[1] - 1.0) < 1e-9);
      CHECK(x[1] >= -1e-12);
    } else {
      CHECK(std::abs((x[0] - 1) * (x[0] - 1) + x[1] * x[1] - 1.0) < 1e-9);
      CHECK(x[1] <= 1e-12);
    }
  }
}

TEST_CASE("blobs") {
  const auto d = gen_blobs(400, 2);
  CHECK(count_label(d, 0) == 200);
  CHECK(count_label(d, 1) == 100);
  CHECK(count_label(d, 2) == 100);
  CHECK(d.num_classes() == 3);
  CHECK_THROWS(gen_blobs(402, 1));

  const auto clean = gen_blobs(40, 2, 0.0);
  std::set<std::tuple<double, double, int>> points;
  for (std::size_t i = 0; i < clean.size(); ++i) points.insert({clean.row(i)[0], clean.row(i)[1], clean.label(i)});
  CHECK(points == std::set<std::tuple<double, double, int>>{{-2, -2, 0}, {2, 2, 0}, {-2, 2, 1}, {2, -2, 2}});

  // Sample mean of class 1 against its corner.
  const auto big = gen_blobs(40000, 5);
  double sx = 0, sy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < big.size(); ++i)
    if (big.label(i) == 1) {
      sx += big.row(i)[0];
      sy += big.row(i)[1];
      ++n;
    }
  CHECK(std::abs(sx / n + 2) < 0.05);
  CHECK(std::abs(sy / n - 2) < 0.05);
}

TEST_CASE("circles") {
  const auto d = gen_circles(400, 4);
  CHECK(count_label(d, 0) == 200);
  CHECK(count_label(d, 1) == 200);
  CHECK_THROWS(gen_circles(3, 1));

  const auto clean = gen_circles(400, 4, 0.0);
  std::vector<double> outer_angles;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const auto x = clean.row(i);
    const double r = std::hypot(x[0], x[1]);
    CHECK(std::abs(r - (clean.label(i) == 0 ? 1.0 : 0.5)) < 1e-9);
    if (clean.label(i) == 0) outer_angles.push_back(std::atan2(x[1], x[0]));
  }
  const double step = 2 * std::numbers::pi / 200;
  for (std::size_t i = 1; i < outer_angles.size(); ++i) {
    double diff = outer_angles[i] - outer_angles[i - 1];
    if (diff < 0) diff += 2 * std::numbers::pi;
    CHECK(std::abs(diff - step) < 1e-9);
  }
}

TEST_CASE("region partitions") {
  CHECK_THROWS(parse_region_scheme("moons-4"));
  CHECK(region_count(RegionScheme::kBlobs2) == 2);
  CHECK(region_count(RegionScheme::kMoons3) == 3);
  const double far_left[] = {-10.0, 0.3};
  CHECK(region_of(RegionScheme::kMoons3, far_left) == 0);
  const double mid[] = {0.5, 0.0};
  CHECK(region_of(RegionScheme::kMoons3, mid) == 1);
  const double right[] = {1.5, 0.0};
  CHECK(region_of(RegionScheme::kMoons3, right) == 2);
  const double q2[] = {-0.5, 0.5};  // angle 135 degrees
  CHECK(region_of(RegionScheme::kCircles3, q2) == 1);
  const double q4[] = {0.5, -0.5};  // angle 315 degrees
  CHECK(region_of(RegionScheme::kCircles3, q4) == 2);

  const auto d = gen_blobs(400, 11);
  const auto plan = partition_synthetic(d, RegionScheme::kBlobs2);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(plan.node_of(i) == (d.row(i)[0] < 0 ? 0 : 1));

  for (auto p : {SyntheticProcess::kMoons, SyntheticProcess::kCircles}) {
    const auto data = generate(p, 400, 2);
    const auto parts = split_by_plan(data, partition_synthetic(data, default_region_scheme(p)));
    CHECK(parts.size() == 3);
    std::size_t total = 0;
    for (const auto& part : parts) total += part.size();
    CHECK(total == data.size());
  }

  // All points on one side: a region would be empty.
  const auto left = make({{-1, 0}, {-2, 1}}, {0, 1}, 2);
  CHECK_THROWS(partition_synthetic(left, RegionScheme::kBlobs2));
  CHECK_THROWS(PartitionPlan({0, 0, 2}, 3));
}

TEST_CASE("top eigenvector") {
  Eigen::MatrixXd a(2, 2);
  a << 2, 1, 1, 2;
  const auto v = top_eigenvector(a);
  CHECK(v(0) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
  CHECK(v(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-8));
  Eigen::MatrixXd b(3, 3);
  b << 1, 0, 0, 0, 5, 0, 0, 0, 2;
  const auto w = top_eigenvector(b);
  CHECK(std::abs(w(1)) == doctest::Approx(1.0));
  CHECK(w(1) > 0);
}

TEST_CASE("per-class principal split") {
  const auto one_d = make({{3}, {1}, {4}, {2}}, {0, 0, 0, 0}, 2);
  // Class 1 is empty, so it cannot give each node an example.
  CHECK_THROWS(pca_class_split(one_d, 2));

  const auto d = make({{3}, {1}, {4}, {2}, {10}, {20}}, {0, 0, 0, 0, 1, 1}, 2);
  const auto plan = pca_class_split(d, 2);
  CHECK(plan.node_of(1) == 0);  // value 1
  CHECK(plan.node_of(3) == 0);  // value 2
  CHECK(plan.node_of(0) == 1);  // value 3
  CHECK(plan.node_of(2) == 1);  // value 4
  CHECK(plan.node_of(4) == 0);
  CHECK(plan.node_of(5) == 1);

  const auto single = pca_class_split(d, 1);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(single.node_of(i) == 0);

  CHECK_THROWS(pca_class_split(d, 3));  // class 1 has two examples

  // Chunk sizes and invariance to row order.
  const auto blobs = gen_blobs(1000, 9);
  const int m = 7;
  const auto p = pca_class_split(blobs, m);
  for (int y = 0; y < 3; ++y) {
    const auto n_y = count_label(blobs, y);
    for (int node = 0; node < m; ++node) {
      std::size_t c = 0;
      for (auto i : p.members(node)) c += blobs.label(i) == y;
      CHECK(c >= n_y / m);
      CHECK(c <= (n_y + m - 1) / m);
    }
  }
  std::vector<std::size_t> rev(blobs.size());
  for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = rev.size() - 1 - i;
  const auto reversed = blobs.subset(rev);
  const auto pr = pca_class_split(reversed, m);
  for (std::size_t i = 0; i < blobs.size(); ++i) CHECK(pr.node_of(rev.size() - 1 - i) == p.node_of(i));
}

TEST_CASE("train/validation split") {
  const auto d = gen_moons(200, 3);
  const auto s = train_val_split(d, 0.1, 5);
  CHECK(s.val.size() == 20);
  CHECK(s.train.size() == 180);
  std::vector<std::size_t> all(s.train_rows);
  all.insert(all.end(), s.val_rows.begin(), s.val_rows.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == i);
  CHECK(train_val_split(d, 0.1, 5).val_rows == s.val_rows);

  const auto two = make({{0}, {1}}, {0, 1}, 2);
  CHECK_THROWS(train_val_split(two, 0.5, 1));  // one validation row cannot hold both classes
  const auto any = train_val_split(two, 0.5, 1, ClassCoverage::kAny);
  CHECK(any.val.size() == 1);
  CHECK(any.train.size() == 1);
  CHECK(any.val.label(0) != any.train.label(0));
  CHECK_THROWS(train_val_split(d, 0.0, 1));
  CHECK_THROWS(train_val_split(d, 1.0, 1));
}

TEST_CASE("csv ingestion") {
  std::istringstream plain("0.5,1.5,0\n1,2,1\n3,4,1\n");
  const auto d = read_csv(plain);
  CHECK(d.size() == 3);
  CHECK(d.num_classes() == 2);
  CHECK(d.row(0)[1] == 1.5);

  std::istringstream wine("acid,sugar,score\n0.1,2,5\n0.2,3,6\n0.3,1,7\n");
  CsvOptions wopts;
  wopts.binarize = BinarizeRule::parse("threshold:score:5");
  const auto w = read_csv(wine, wopts);
  CHECK(w.dim() == 2);
  CHECK(w.labels() == std::vector<int>{0, 1, 1});

  std::istringstream avila("f1,f2,who\n1,2,A\n3,4,F\n5,6,E\n7,8,X\n");
  CsvOptions aopts;
  aopts.label_column = "who";
  aopts.binarize = BinarizeRule::parse("group:A,B,C,D,E");
  const auto a = read_csv(avila, aopts);
  CHECK(a.labels() == std::vector<int>{0, 1, 0, 1});

  std::istringstream first_col("1,0.5,0.25\n0,0.1,0.2\n");
  CsvOptions fopts;
  fopts.label_column = "0";
  const auto f = read_csv(first_col, fopts);
  CHECK(f.labels() == std::vector<int>{1, 0});
  CHECK(f.row(0)[0] == 0.5);

  auto kind_of = [](const std::string& text, CsvOptions opts = {}) {
    std::istringstream in(text);
    try {
      read_csv(in, opts);
    } catch (const CsvError& e) {
      return e.kind();
    }
    FAIL("no error");
    return CsvError::Kind::kIo;
  };
  CHECK(kind_of("1,2,0\n1,0\n") == CsvError::Kind::kMalformedRow);
  CHECK(kind_of("1,2,0\n1,abc,1\n") == CsvError::Kind::kNonNumeric);
  CHECK(kind_of("1,2,0\n1,2,x\n") == CsvError::Kind::kLabel);
  CsvOptions three;
  three.num_classes = 2;
  CHECK(kind_of("1,2,0\n1,2,5\n", three) == CsvError::Kind::kLabel);
  CsvOptions missing;
  missing.label_column = "nope";
  CHECK(kind_of("a,b,c\n1,2,0\n", missing) == CsvError::Kind::kColumn);
  CHECK_THROWS_AS(load_csv("/nonexistent/file.csv"), CsvError);
  CHECK_THROWS(BinarizeRule::parse("threshold:score"));

  // Round trip.
  const auto g = gen_blobs(40, 1);
  std::stringstream buf;
  write_csv(buf, g);
  CHECK(read_csv(buf) == g);

  std::istringstream z("1,10,0\n3,30,1\n");
  CsvOptions zopts;
  zopts.standardize = true;
  const auto zs = read_csv(z, zopts);
  CHECK(zs.row(0)[0] == doctest::Approx(-1.0));
  CHECK(zs.row(1)[1] == doctest::Approx(1.0));
}
