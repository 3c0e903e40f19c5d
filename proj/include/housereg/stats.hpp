#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "housereg/categories.hpp"
#include "housereg/features.hpp"

namespace housereg {

/// Linear-interpolation quantile of ascending data (numpy's default rule).
double quantile_sorted(std::span<const double> sorted, double q);

double mean(std::span<const double> v);
/// Sample standard deviation (divisor n-1); 0 for a single value.
double sample_std(std::span<const double> v);

struct SummaryRow {
  StoriesCategory group;
  double minimum;
  double maximum;
  double mean;
  double median;
  double std;
  std::size_t count;
};

/// One row per stories level present, in level order.
std::vector<SummaryRow> group_summary(std::span<const double> y,
                                      std::span<const StoriesCategory> groups);

struct CorrelationMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
};

/// Pearson correlation of two equal-length vectors. Throws DomainError if
/// either is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// Pairwise Pearson correlations over every column of m plus the target,
/// which is appended last under its own name.
CorrelationMatrix pearson_matrix(const FeatureMatrix& m);

/// (M1 - M0)/s_n * sqrt(n1*n0/n^2), s_n the population std of `continuous`.
double point_biserial(std::span<const double> binary, std::span<const double> continuous);

struct StandardizationParams {
  std::vector<std::string> column_names;
  std::vector<double> means;
  std::vector<double> stds;
};

/// Mean and sample std of each named column. kTargetName selects y.
StandardizationParams standardize_fit(const FeatureMatrix& m,
                                      const std::vector<std::string>& columns);

/// (value - mean)/std on every named column; other columns untouched.
FeatureMatrix standardize_apply(const FeatureMatrix& m, const StandardizationParams& params);

/// Maps standardized target values back to the original scale. Identity if
/// the target was not part of the fit.
Eigen::VectorXd unstandardize_target(const Eigen::VectorXd& y,
                                     const StandardizationParams& params);

struct HistogramData {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max], half-open except the last.
HistogramData histogram(std::span<const double> v, std::size_t bins);

struct BoxplotData {
  StoriesCategory group;
  double q1;
  double median;
  double q3;
  double whisker_low;
  double whisker_high;
  std::vector<double> outliers;
  std::size_t count;
};

std::vector<BoxplotData> boxplot_stats(std::span<const double> y,
                                       std::span<const StoriesCategory> groups);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace housereg
