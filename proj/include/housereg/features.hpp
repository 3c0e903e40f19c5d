#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "housereg/categories.hpp"
#include "housereg/ingest.hpp"

namespace housereg {

struct StyleInfo {
  bool has_basement;
  StoriesCategory stories;

  bool operator==(const StyleInfo&) const = default;
};

/// building_style_code -> (basement, stories).
using StyleVocabulary = std::map<std::string, StyleInfo, std::less<>>;

/// Codes S1B/S1N, S15B/S15N, S2B/S2N, S25B/S25N, S3B/S3N.
StyleVocabulary default_style_vocabulary();

/// Description paired with a default vocabulary entry, e.g.
/// "STRY 2 1/2 WITH BASEMENT".
std::string style_description(const StyleInfo& info);

/// Column order of the full encoding. Intercept is not a column.
const std::vector<std::string>& feature_column_names();

inline constexpr const char* kTargetName = "housing_sales_price";

/// Continuous columns; everything else in the encoding is a 0/1 indicator.
const std::vector<std::string>& numeric_column_names();

struct FeatureMatrix {
  std::vector<std::string> column_names;
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  bool standardized = false;

  Eigen::Index n() const { return x.rows(); }
  Eigen::Index p() const { return x.cols(); }

  std::optional<Eigen::Index> column_index(std::string_view name) const;

  /// Row subset, preserving order.
  FeatureMatrix rows(const std::vector<std::size_t>& idx) const;
};

struct EncodeOptions {
  /// Drop one level per full categorical block (standard_unit, floors_1) so
  /// the design with an intercept is full rank.
  bool drop_reference = false;
};

/// Throws DomainError when year_built > assessment_year.
int derive_house_age(int year_built, int assessment_year);

/// Vocabulary lookup, falling back to scanning the description for a stories
/// token and a basement phrase. Throws VocabularyError if either is missing.
StyleInfo parse_building_style(std::string_view code, std::string_view description,
                               const StyleVocabulary& vocab);

FeatureMatrix encode_features(const std::vector<TypedPropertyRecord>& records,
                              const StyleVocabulary& vocab, const EncodeOptions& opts = {});

/// Stories level of every row, read from the floors_* indicator block.
std::vector<StoriesCategory> stories_groups(const FeatureMatrix& m);

struct OutlierRemoval {
  FeatureMatrix matrix;
  std::size_t removed_count = 0;
  std::vector<std::size_t> kept_rows;
  /// Groups with fewer than four rows, passed through unfiltered.
  std::vector<StoriesCategory> unfiltered_groups;
};

/// Per stories group, drops rows whose target lies outside
/// [Q1 - k*IQR, Q3 + k*IQR], refencing the survivors until none fall outside.
OutlierRemoval remove_story_outliers(const FeatureMatrix& m, double k = 3.0);

}  // namespace housereg
