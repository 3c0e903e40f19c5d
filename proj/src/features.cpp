#include "housereg/features.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "housereg/error.hpp"
#include "housereg/stats.hpp"

namespace housereg {

namespace {

const std::vector<std::string> kColumns = {
    "prior_year_sales_price", "size_of_house", "has_basement", "house_age",
    "center_unit",            "end_unit",      "split_level",  "standard_unit",
    "floors_1",               "floors_1_5",    "floors_2",     "floors_2_5",
    "floors_3",               "single_family", "grade_2",      "grade_3",
    "grade_4",                "grade_5",       "grade_6"};

const std::vector<std::string> kNumeric = {"prior_year_sales_price", "size_of_house",
                                           "house_age"};

const std::array<std::string, 5> kFloorColumns = {"floors_1", "floors_1_5", "floors_2",
                                                  "floors_2_5", "floors_3"};
const std::array<std::string, 4> kDwellingColumns = {"center_unit", "end_unit",
                                                     "split_level", "standard_unit"};

constexpr const char* kDroppedDwelling = "standard_unit";
constexpr const char* kDroppedFloors = "floors_1";

std::vector<std::string> upper_tokens(std::string_view text) {
  std::string upper;
  for (char c : text) upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  std::istringstream in(upper);
  std::vector<std::string> tokens;
  for (std::string t; in >> t;) tokens.push_back(t);
  return tokens;
}

std::optional<StoriesCategory> scan_stories(const std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    const bool half_follows = i + 1 < tokens.size() && tokens[i + 1] == "1/2";
    if (t == "1") return half_follows ? StoriesCategory::kOneHalf : StoriesCategory::kOne;
    if (t == "2") return half_follows ? StoriesCategory::kTwoHalf : StoriesCategory::kTwo;
    if (t == "3" && !half_follows) return StoriesCategory::kThree;
    if (t == "1.5") return StoriesCategory::kOneHalf;
    if (t == "2.5") return StoriesCategory::kTwoHalf;
  }
  return std::nullopt;
}

std::optional<bool> scan_basement(const std::vector<std::string>& tokens) {
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i + 1] != "BASEMENT") continue;
    if (tokens[i] == "WITH") return true;
    if (tokens[i] == "NO") return false;
  }
  return std::nullopt;
}

}  // namespace

StyleVocabulary default_style_vocabulary() {
  StyleVocabulary v;
  const std::array<std::pair<const char*, StoriesCategory>, 5> stories = {{
      {"S1", StoriesCategory::kOne},
      {"S15", StoriesCategory::kOneHalf},
      {"S2", StoriesCategory::kTwo},
      {"S25", StoriesCategory::kTwoHalf},
      {"S3", StoriesCategory::kThree},
  }};
  for (const auto& [prefix, s] : stories) {
    v.emplace(std::string(prefix) + "B", StyleInfo{true, s});
    v.emplace(std::string(prefix) + "N", StyleInfo{false, s});
  }
  return v;
}

std::string style_description(const StyleInfo& info) {
  return "STRY " + std::string(to_string(info.stories)) +
         (info.has_basement ? " WITH BASEMENT" : " NO BASEMENT");
}

const std::vector<std::string>& feature_column_names() { return kColumns; }
const std::vector<std::string>& numeric_column_names() { return kNumeric; }

std::optional<Eigen::Index> FeatureMatrix::column_index(std::string_view name) const {
  auto it = std::find(column_names.begin(), column_names.end(), name);
  if (it == column_names.end()) return std::nullopt;
  return static_cast<Eigen::Index>(it - column_names.begin());
}

FeatureMatrix FeatureMatrix::rows(const std::vector<std::size_t>& idx) const {
  FeatureMatrix out;
  out.column_names = column_names;
  out.standardized = standardized;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), p());
  out.y.resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(idx[r]);
    out.x.row(static_cast<Eigen::Index>(r)) = x.row(src);
    out.y(static_cast<Eigen::Index>(r)) = y(src);
  }
  return out;
}

int derive_house_age(int year_built, int assessment_year) {
  if (year_built > assessment_year)
    throw DomainError("year built " + std::to_string(year_built) +
                      " is after assessment year " + std::to_string(assessment_year));
  return assessment_year - year_built;
}

StyleInfo parse_building_style(std::string_view code, std::string_view description,
                               const StyleVocabulary& vocab) {
  if (auto it = vocab.find(code); it != vocab.end()) return it->second;
  const auto tokens = upper_tokens(description);
  auto stories = scan_stories(tokens);
  auto basement = scan_basement(tokens);
  if (!stories || !basement) throw VocabularyError(std::string(code));
  return {*basement, *stories};
}

FeatureMatrix encode_features(const std::vector<TypedPropertyRecord>& records,
                              const StyleVocabulary& vocab, const EncodeOptions& opts) {
  if (records.empty()) throw DomainError("cannot encode an empty record set");

  FeatureMatrix m;
  for (const auto& name : kColumns) {
    if (opts.drop_reference && (name == kDroppedDwelling || name == kDroppedFloors)) continue;
    m.column_names.push_back(name);
  }
  const auto n = static_cast<Eigen::Index>(records.size());
  m.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(m.column_names.size()));
  m.y.resize(n);

  auto set = [&](Eigen::Index row, const std::string& name, double value) {
    if (auto col = m.column_index(name)) m.x(row, *col) = value;
  };

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = records[static_cast<std::size_t>(i)];
    const StyleInfo style =
        parse_building_style(r.building_style_code, r.building_style_description, vocab);
    set(i, "prior_year_sales_price", static_cast<double>(r.prior_year_sales_price));
    set(i, "size_of_house", static_cast<double>(r.size_of_house));
    set(i, "has_basement", style.has_basement ? 1.0 : 0.0);
    set(i, "house_age", derive_house_age(r.year_built, r.current_assessment_year));
    set(i, kDwellingColumns[static_cast<std::size_t>(index_of(r.dwelling_type))], 1.0);
    set(i, kFloorColumns[static_cast<std::size_t>(index_of(style.stories))], 1.0);
    set(i, "single_family", r.street_address_type == AddressType::kSingleFamily ? 1.0 : 0.0);
    if (r.dwelling_grade >= 2) set(i, "grade_" + std::to_string(r.dwelling_grade), 1.0);
    m.y(i) = static_cast<double>(r.housing_sales_price);
  }
  return m;
}

std::vector<StoriesCategory> stories_groups(const FeatureMatrix& m) {
  std::array<std::optional<Eigen::Index>, 5> cols;
  for (std::size_t s = 0; s < kFloorColumns.size(); ++s) cols[s] = m.column_index(kFloorColumns[s]);

  std::vector<StoriesCategory> out(static_cast<std::size_t>(m.n()));
  for (Eigen::Index i = 0; i < m.n(); ++i) {
    std::optional<StoriesCategory> found;
    for (std::size_t s = 0; s < cols.size(); ++s) {
      if (cols[s] && m.x(i, *cols[s]) > 0.5) {
        found = kAllStories[s];
        break;
      }
    }
    if (!found) {
      // Only the dropped reference level can be all-zero.
      if (cols[0]) throw DomainError("row " + std::to_string(i) + " has no stories indicator");
      found = StoriesCategory::kOne;
    }
    out[static_cast<std::size_t>(i)] = *found;
  }
  return out;
}

OutlierRemoval remove_story_outliers(const FeatureMatrix& m, double k) {
  if (m.standardized) throw DomainError("outlier removal expects an unstandardized matrix");
  if (!(k > 0)) throw DomainError("outlier fence multiplier must be positive");

  const auto groups = stories_groups(m);
  OutlierRemoval out;
  std::vector<bool> keep(groups.size(), true);

  for (StoriesCategory g : kAllStories) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i] == g) members.push_back(i);
    if (members.empty()) continue;
    if (members.size() < 4) {
      out.unfiltered_groups.push_back(g);
      continue;
    }
    // Refence on the survivors until the group is stable.
    while (members.size() >= 4) {
      std::vector<double> values;
      values.reserve(members.size());
      for (auto i : members) values.push_back(m.y(static_cast<Eigen::Index>(i)));
      std::sort(values.begin(), values.end());
      const double q1 = quantile_sorted(values, 0.25);
      const double q3 = quantile_sorted(values, 0.75);
      const double iqr = q3 - q1;
      const double lo = q1 - k * iqr;
      const double hi = q3 + k * iqr;
      std::vector<std::size_t> inside;
      for (auto i : members) {
        const double v = m.y(static_cast<Eigen::Index>(i));
        if (v < lo || v > hi)
          keep[i] = false;
        else
          inside.push_back(i);
      }
      if (inside.size() == members.size()) break;
      members = std::move(inside);
    }
  }

  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i])
      out.kept_rows.push_back(i);
    else
      ++out.removed_count;
  }
  out.matrix = m.rows(out.kept_rows);
  return out;
}

}  // namespace housereg
