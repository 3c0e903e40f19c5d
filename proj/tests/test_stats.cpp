#include <doctest.h>

#include <numeric>

#include "housereg/error.hpp"
#include "housereg/fixture.hpp"
#include "housereg/random.hpp"
#include "housereg/stats.hpp"
#include "oracles.hpp"

using namespace housereg;
using doctest::Approx;

namespace {

FeatureMatrix matrix(std::vector<std::string> names, std::vector<std::vector<double>> cols,
                     std::vector<double> y) {
  FeatureMatrix m;
  m.column_names = std::move(names);
  m.x.resize(static_cast<Eigen::Index>(y.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < y.size(); ++i)
      m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
  m.y = Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  return m;
}

}  // namespace

TEST_CASE("group summary examples") {
  using S = StoriesCategory;
  std::vector<S> one2{S::kOne, S::kOne};
  auto rows = group_summary(std::vector<double>{91300, 822367}, one2);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].minimum == 91300);
  CHECK(rows[0].maximum == 822367);

  rows = group_summary(std::vector<double>{5}, std::vector<S>{S::kTwo});
  CHECK(rows[0].minimum == 5);
  CHECK(rows[0].maximum == 5);
  CHECK(rows[0].mean == 5);
  CHECK(rows[0].median == 5);
  CHECK(rows[0].std == 0);
  CHECK(rows[0].group == S::kTwo);

  rows = group_summary(std::vector<double>{1, 2, 3, 4}, std::vector<S>(4, S::kThree));
  CHECK(rows[0].mean == 2.5);
  CHECK(rows[0].median == 2.5);
  CHECK(rows[0].std == Approx(1.2910).epsilon(1e-4));
  CHECK(rows[0].count == 4);

  CHECK_THROWS_AS(group_summary(std::vector<double>{1}, one2), DomainError);
}

TEST_CASE("group summary ordering and conservation") {
  Rng rng(4);
  std::vector<double> y;
  std::vector<StoriesCategory> g;
  for (int i = 0; i < 400; ++i) {
    y.push_back(1e5 + 1e5 * rng.uniform());
    g.push_back(kAllStories[rng.index(5)]);
  }
  const auto rows = group_summary(y, g);
  std::size_t total = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    CHECK(rows[r].minimum <= rows[r].median);
    CHECK(rows[r].median <= rows[r].maximum);
    if (r) CHECK(index_of(rows[r - 1].group) < index_of(rows[r].group));
    total += rows[r].count;
  }
  CHECK(total == y.size());
}

TEST_CASE("pearson examples") {
  const std::vector<double> v{1, 4, 2, 8, 5};
  std::vector<double> neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
  CHECK(pearson(v, v) == Approx(1.0).epsilon(1e-15));
  CHECK(pearson(v, neg) == Approx(-1.0).epsilon(1e-15));
  CHECK(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 7}) ==
        Approx(0.9934).epsilon(1e-4));
  CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DomainError);
}

TEST_CASE("pearson matrix is symmetric with unit diagonal") {
  Rng rng(8);
  const Eigen::MatrixXd x = oracle::random_matrix(rng, 60, 4);
  const Eigen::VectorXd y = oracle::random_vector(rng, 60);
  FeatureMatrix m;
  m.column_names = {"a", "b", "c", "d"};
  m.x = x;
  m.y = y;
  const CorrelationMatrix c = pearson_matrix(m);
  REQUIRE(c.names.size() == 5);
  CHECK(c.names.back() == kTargetName);
  for (Eigen::Index i = 0; i < 5; ++i) {
    CHECK(c.values(i, i) == Approx(1.0).epsilon(1e-12));
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(c.values(i, j) == c.values(j, i));
      CHECK(std::fabs(c.values(i, j)) <= 1 + 1e-12);
    }
  }
  std::vector<double> a(x.col(1).data(), x.col(1).data() + 60), b(y.data(), y.data() + 60);
  CHECK(c.values(1, 4) == Approx(oracle::pearson(a, b)).epsilon(1e-12));
}

TEST_CASE("point-biserial examples") {
  CHECK(point_biserial(std::vector<double>{0, 0, 1, 1}, std::vector<double>{1, 2, 3, 4}) ==
        Approx(0.8944).epsilon(1e-4));
  CHECK(point_biserial(std::vector<double>{0, 1, 0, 1}, std::vector<double>{3, 3, 7, 7}) == 0.0);
  CHECK_THROWS_AS(point_biserial(std::vector<double>{1, 1}, std::vector<double>{1, 2}), DomainError);
  CHECK_THROWS_AS(point_biserial(std::vector<double>{0, 2}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("point-biserial equals pearson on 0/1 coding") {
  Rng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.index(200);
    std::vector<double> b(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      b[i] = rng.uniform() < 0.3 ? 1.0 : 0.0;
      y[i] = 1e5 * rng.normal() + 3e5;
    }
    b[0] = 0;
    b[1] = 1;
    CHECK(std::fabs(point_biserial(b, y) - oracle::pearson(b, y)) <= 1e-12);
  }
}

TEST_CASE("standardize fit and apply") {
  const FeatureMatrix m = matrix({"a", "b", "c"}, {{1, 2, 3}, {5, 5, 5}, {10, 0, 20}}, {4, 5, 9});
  const auto p = standardize_fit(m, {"a"});
  CHECK(p.means[0] == 2.0);
  CHECK(p.stds[0] == 1.0);
  const FeatureMatrix s = standardize_apply(m, p);
  CHECK(s.x(0, 0) == -1.0);
  CHECK(s.x(1, 0) == 0.0);
  CHECK(s.x(2, 0) == 1.0);
  CHECK(s.x.col(2) == m.x.col(2));
  CHECK(s.standardized);

  CHECK_THROWS_AS(standardize_fit(m, {"b"}), DomainError);
  const auto two = standardize_fit(m, {"c", kTargetName});
  CHECK(two.column_names == std::vector<std::string>{"c", kTargetName});
  CHECK_THROWS_AS(standardize_fit(m, {"missing"}), DomainError);
}

TEST_CASE("standardized columns have zero mean and unit std") {
  Rng rng(3);
  FeatureMatrix m;
  m.column_names = {"a", "b"};
  m.x = oracle::random_matrix(rng, 200, 2) * 1000.0;
  m.x.array() += 5e5;
  m.y = oracle::random_vector(rng, 200) * 3e4;
  const auto p = standardize_fit(m, {"a", "b", kTargetName});
  const FeatureMatrix s = standardize_apply(m, p);
  for (Eigen::Index j = 0; j < 2; ++j) {
    const Eigen::VectorXd c = s.x.col(j);
    CHECK(std::fabs(mean(as_span(c))) <= 1e-10);
    CHECK(std::fabs(sample_std(as_span(c)) - 1.0) <= 1e-10);
  }
  CHECK(std::fabs(mean(as_span(s.y))) <= 1e-10);
  CHECK((unstandardize_target(s.y, p) - m.y).cwiseAbs().maxCoeff() <= 1e-8);

  // Params fit elsewhere are applied, not re-fit.
  FeatureMatrix other = m;
  other.x.array() += 250.0;
  const Eigen::VectorXd shifted = standardize_apply(other, p).x.col(0);
  CHECK(mean(as_span(shifted)) == Approx(250.0 / p.stds[0]).epsilon(1e-9));
}

TEST_CASE("histogram examples") {
  const auto h = histogram(std::vector<double>{1, 2, 3, 4}, 2);
  CHECK(h.bin_edges == std::vector<double>{1, 2.5, 4});
  CHECK(h.counts == std::vector<std::size_t>{2, 2});

  const auto single = histogram(std::vector<double>{7, 7, 7}, 10);
  std::size_t nonzero = 0;
  for (auto c : single.counts) nonzero += c ? 1 : 0;
  CHECK(nonzero == 1);
  CHECK(std::accumulate(single.counts.begin(), single.counts.end(), std::size_t{0}) == 3);

  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.index(300);
    std::vector<double> v(n);
    for (auto& d : v) d = rng.normal();
    const auto hh = histogram(v, 1 + rng.index(40));
    CHECK(std::accumulate(hh.counts.begin(), hh.counts.end(), std::size_t{0}) == n);
    CHECK(hh.bin_edges.size() == hh.counts.size() + 1);
  }
}

TEST_CASE("boxplot examples") {
  using S = StoriesCategory;
  auto b = boxplot_stats(std::vector<double>{1, 2, 3, 4, 100}, std::vector<S>(5, S::kOne));
  REQUIRE(b.size() == 1);
  CHECK(b[0].q1 == 2);
  CHECK(b[0].median == 3);
  CHECK(b[0].q3 == 4);
  CHECK(b[0].outliers == std::vector<double>{100});
  CHECK(b[0].whisker_high == 4);
  CHECK(b[0].whisker_low == 1);
  CHECK(b[0].count == 5);

  b = boxplot_stats(std::vector<double>{9, 9, 9}, std::vector<S>(3, S::kTwo));
  CHECK(b[0].q1 == 9);
  CHECK(b[0].median == 9);
  CHECK(b[0].q3 == 9);
  CHECK(b[0].outliers.empty());

  b = boxplot_stats(std::vector<double>{1, 2, 3}, std::vector<S>{S::kOne, S::kThree, S::kOne});
  REQUIRE(b.size() == 2);
  CHECK(b[0].count == 2);
  CHECK(b[1].count == 1);
}

TEST_CASE("quantiles follow linear interpolation") {
  const std::vector<double> v{10, 11, 12, 13, 1000};
  CHECK(quantile_sorted(v, 0.25) == 11);
  CHECK(quantile_sorted(v, 0.75) == 13);
  CHECK(quantile_sorted(std::vector<double>{1, 2, 3, 4}, 0.5) == 2.5);
  CHECK(quantile_sorted(std::vector<double>{1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile_sorted(std::vector<double>{4}, 0.9) == 4);
}
