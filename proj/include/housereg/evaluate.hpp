#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "housereg/features.hpp"
#include "housereg/linmodel.hpp"

namespace housereg {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
  std::uint64_t seed = 0;
};

/// Shuffles 0..n-1 with Rng(seed); the first round-half-up(n * test_fraction)
/// indices form the test set.
SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed);

struct FoldAssignment {
  std::vector<int> fold_of;
  int k = 0;
  std::uint64_t seed = 0;

  std::vector<std::size_t> members(int fold) const;
  std::vector<std::size_t> complement(int fold) const;
};

/// Seeded shuffle, then round-robin assignment.
FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed);

double r2(std::span<const double> y, std::span<const double> yhat);
/// 1 - (1 - r2)(n - 1)/(n - p - 1).
double adjusted_r2(double r2_value, std::size_t n, std::size_t p);
double neg_rmse(std::span<const double> y, std::span<const double> yhat);
double neg_mse(std::span<const double> y, std::span<const double> yhat);
std::vector<double> residuals(std::span<const double> y, std::span<const double> yhat);

struct CvScores {
  std::vector<double> adjusted_r2;  // kUndefined when the fold has n <= p + 1
  std::vector<double> neg_rmse;
  std::vector<double> neg_mse;
};

struct FoldScore {
  double adjusted_r2;
  double neg_rmse;
  double neg_mse;
};

/// Scores one held-out fold. Standardization of `standardize_columns` (which
/// may include the target) and the model are both fit on the other folds
/// only.
FoldScore evaluate_fold(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& opts,
                        const FoldAssignment& folds, int fold,
                        const std::vector<std::string>& standardize_columns);

/// Scores every fold in fold order. Solver errors are rethrown with the fold
/// index attached.
CvScores cross_validate(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& opts,
                        int k, std::uint64_t seed,
                        const std::vector<std::string>& standardize_columns);

/// Thirteen half-decade steps from 1e-4 to 1e2.
std::vector<double> default_alpha_grid();

/// Alpha with the best mean cross-validated negative RMSE (ties: smaller alpha).
double select_alpha(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& base,
                    int k, std::uint64_t seed, const std::vector<std::string>& standardize_columns,
                    const std::vector<double>& grid = default_alpha_grid());

struct ModelScores {
  CvScores cv;
  double test_adjusted_r2 = 0.0;
  double test_neg_rmse = 0.0;
  double test_neg_mse = 0.0;
  std::vector<double> actual;
  std::vector<double> predicted;
  std::vector<double> residuals;  // actual - predicted on the test set
};

struct ModelComparison {
  std::map<ModelKind, ModelScores> models;
};

}  // namespace housereg
