#include <doctest.h>

#include <algorithm>
#include <set>
#include <numeric>

#include "housereg/error.hpp"
#include "housereg/features.hpp"
#include "housereg/fixture.hpp"
#include "housereg/random.hpp"

using namespace housereg;

namespace {

TypedPropertyRecord record(DwellingCategory dwelling, AddressType address, std::string code,
                           int grade, std::int64_t price = 300000) {
  TypedPropertyRecord r{};
  r.dwelling_type = dwelling;
  r.prior_year_sales_price = 280000;
  r.current_assessment_year = 2020;
  r.building_style_code = std::move(code);
  r.building_style_description = "";
  r.year_built = 1970;
  r.size_of_house = 1500;
  r.street_address_type = address;
  r.housing_sales_price = price;
  r.dwelling_grade = grade;
  return r;
}

double at(const FeatureMatrix& m, Eigen::Index row, const char* name) {
  return m.x(row, *m.column_index(name));
}

FeatureMatrix priced(const std::vector<double>& prices, const std::string& code = "S2B") {
  std::vector<TypedPropertyRecord> recs;
  for (double p : prices)
    recs.push_back(record(DwellingCategory::kStandardUnit, AddressType::kSingleFamily, code, 3,
                          static_cast<std::int64_t>(p)));
  return encode_features(recs, default_style_vocabulary());
}

}  // namespace

TEST_CASE("house age") {
  CHECK(derive_house_age(1950, 2020) == 70);
  CHECK(derive_house_age(2020, 2020) == 0);
  CHECK_THROWS_AS(derive_house_age(2021, 2020), DomainError);
}

TEST_CASE("building style from vocabulary and description") {
  StyleVocabulary vocab{{"X25", StyleInfo{true, StoriesCategory::kTwoHalf}}};
  CHECK(parse_building_style("X25", "", vocab) == StyleInfo{true, StoriesCategory::kTwoHalf});
  CHECK(parse_building_style("ZZZ", "STRY 2 1/2 WITH BASEMENT", vocab) ==
        StyleInfo{true, StoriesCategory::kTwoHalf});
  CHECK(parse_building_style("ZZZ", "stry 1 no basement", vocab) ==
        StyleInfo{false, StoriesCategory::kOne});
  CHECK(parse_building_style("ZZZ", "STRY 1.5 WITH BASEMENT", vocab) ==
        StyleInfo{true, StoriesCategory::kOneHalf});
  CHECK(parse_building_style("ZZZ", "STRY 3 NO BASEMENT", vocab) ==
        StyleInfo{false, StoriesCategory::kThree});
  try {
    parse_building_style("GAR", "GARAGE", vocab);
    FAIL("expected VocabularyError");
  } catch (const VocabularyError& e) {
    CHECK(e.code() == "GAR");
  }
  CHECK_THROWS_AS(parse_building_style("ZZZ", "STRY 2", vocab), VocabularyError);
}

TEST_CASE("default vocabulary descriptions scan back to the same style") {
  for (const auto& [code, info] : default_style_vocabulary())
    CHECK(parse_building_style("unknown", style_description(info), {}) == info);
}

TEST_CASE("encoding examples") {
  const std::vector<TypedPropertyRecord> recs = {
      record(DwellingCategory::kStandardUnit, AddressType::kSingleFamily, "S2B", 4),
      record(DwellingCategory::kEndUnit, AddressType::kTownhouse, "S1N", 1),
  };
  const FeatureMatrix m = encode_features(recs, default_style_vocabulary());
  CHECK(m.p() == 19);
  CHECK(m.column_names == feature_column_names());
  const std::set<std::string> ones = {"has_basement", "standard_unit", "floors_2", "single_family",
                                      "grade_4"};
  for (Eigen::Index j = 0; j < m.p(); ++j) {
    const auto& name = m.column_names[static_cast<std::size_t>(j)];
    if (std::find(numeric_column_names().begin(), numeric_column_names().end(), name) !=
        numeric_column_names().end())
      continue;
    CHECK_MESSAGE(m.x(0, j) == (ones.contains(name) ? 1.0 : 0.0), name);
  }
  CHECK(at(m, 1, "single_family") == 0.0);
  CHECK(at(m, 1, "end_unit") == 1.0);
  CHECK(at(m, 1, "floors_1") == 1.0);
  CHECK(at(m, 0, "house_age") == 50.0);
  CHECK(at(m, 0, "prior_year_sales_price") == 280000.0);
  CHECK(m.y(0) == 300000.0);
  CHECK_FALSE(m.standardized);
}

TEST_CASE("encoding shape is fixed and drop_reference removes two columns") {
  const auto recs = generate_fixture(200, 5, default_coefficient_profile());
  CHECK(encode_features(recs, default_style_vocabulary()).p() == 19);
  const FeatureMatrix d = encode_features(recs, default_style_vocabulary(), EncodeOptions{true});
  CHECK(d.p() == 17);
  CHECK_FALSE(d.column_index("standard_unit"));
  CHECK_FALSE(d.column_index("floors_1"));
  const auto groups = stories_groups(d);
  const auto full_groups = stories_groups(encode_features(recs, default_style_vocabulary()));
  CHECK(groups == full_groups);
  CHECK_THROWS_AS(encode_features({}, default_style_vocabulary()), DomainError);
}

TEST_CASE("indicator blocks sum to one per row and ages are non-negative") {
  const FeatureMatrix m = encode_features(generate_fixture(500, 9, default_coefficient_profile()),
                                          default_style_vocabulary());
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    double dwell = 0, floors = 0;
    for (const char* c : {"center_unit", "end_unit", "split_level", "standard_unit"}) dwell += at(m, i, c);
    for (const char* c : {"floors_1", "floors_1_5", "floors_2", "floors_2_5", "floors_3"}) floors += at(m, i, c);
    CHECK(dwell == 1.0);
    CHECK(floors == 1.0);
    CHECK(at(m, i, "house_age") >= 0.0);
  }
}

TEST_CASE("encoding is permutation-equivariant") {
  auto recs = generate_fixture(300, 13, default_coefficient_profile());
  const FeatureMatrix base = encode_features(recs, default_style_vocabulary());
  std::vector<std::size_t> perm(recs.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(2);
  rng.shuffle(perm);
  std::vector<TypedPropertyRecord> shuffled;
  for (std::size_t i : perm) shuffled.push_back(recs[i]);
  const FeatureMatrix m = encode_features(shuffled, default_style_vocabulary());
  for (std::size_t r = 0; r < perm.size(); ++r) {
    CHECK(m.x.row(static_cast<Eigen::Index>(r)) == base.x.row(static_cast<Eigen::Index>(perm[r])));
    CHECK(m.y(static_cast<Eigen::Index>(r)) == base.y(static_cast<Eigen::Index>(perm[r])));
  }
}

TEST_CASE("outlier examples") {
  const auto flat = remove_story_outliers(priced({100, 100, 100, 100, 100}), 3.0);
  CHECK(flat.removed_count == 0);
  CHECK(flat.matrix.n() == 5);

  // Q1 = 11, Q3 = 13, IQR = 2, upper fence 19.
  const auto spike = remove_story_outliers(priced({10, 11, 12, 13, 1000}), 3.0);
  CHECK(spike.removed_count == 1);
  CHECK(spike.kept_rows == std::vector<std::size_t>{0, 1, 2, 3});
  CHECK(spike.matrix.y.maxCoeff() == 13.0);

  CHECK_THROWS_AS(remove_story_outliers(priced({1, 2, 3, 4}), 0.0), DomainError);
}

TEST_CASE("outliers are judged within each stories group") {
  // 1000 is ordinary among the 3-story rows but extreme among the 1-story rows.
  std::vector<TypedPropertyRecord> recs;
  for (double p : {10, 11, 12, 13, 1000})
    recs.push_back(record(DwellingCategory::kStandardUnit, AddressType::kSingleFamily, "S1B", 3,
                          static_cast<std::int64_t>(p)));
  for (double p : {900, 950, 1000, 1050, 1100})
    recs.push_back(record(DwellingCategory::kStandardUnit, AddressType::kSingleFamily, "S3B", 3,
                          static_cast<std::int64_t>(p)));
  recs.push_back(record(DwellingCategory::kStandardUnit, AddressType::kSingleFamily, "S2B", 3, 5));
  const auto out = remove_story_outliers(encode_features(recs, default_style_vocabulary()), 3.0);
  CHECK(out.removed_count == 1);
  CHECK(std::find(out.kept_rows.begin(), out.kept_rows.end(), 4) == out.kept_rows.end());
  CHECK(out.unfiltered_groups == std::vector<StoriesCategory>{StoriesCategory::kTwo});
}

TEST_CASE("outlier removal is idempotent for k >= 1.5") {
  const FeatureMatrix m = encode_features(generate_fixture(2000, 21, default_coefficient_profile()),
                                          default_style_vocabulary());
  for (double k : {1.5, 2.0, 3.0}) {
    const auto once = remove_story_outliers(m, k);
    const auto twice = remove_story_outliers(once.matrix, k);
    CHECK(twice.removed_count == 0);
    CHECK(twice.matrix.x == once.matrix.x);
    CHECK(once.matrix.n() > 0);
  }
}

TEST_CASE("row subsets preserve order") {
  const FeatureMatrix m = priced({5, 6, 7, 8});
  const FeatureMatrix s = m.rows({3, 1});
  CHECK(s.y(0) == 8.0);
  CHECK(s.y(1) == 6.0);
  CHECK(s.column_names == m.column_names);
}
