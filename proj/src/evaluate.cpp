#include "housereg/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "housereg/error.hpp"
#include "housereg/random.hpp"
#include "housereg/stats.hpp"

namespace housereg {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw DomainError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);
  return idx;
}

// Columns of `wanted` present in m (the target always counts as present).
std::vector<std::string> present_columns(const FeatureMatrix& m,
                                         const std::vector<std::string>& wanted) {
  std::vector<std::string> out;
  for (const auto& name : wanted)
    if (name == kTargetName || m.column_index(name)) out.push_back(name);
  return out;
}

void check_partition(const std::vector<std::vector<std::size_t>>& parts, std::size_t n) {
  std::vector<char> seen(n, 0);
  std::size_t total = 0;
  for (const auto& part : parts) {
    if (part.empty()) throw DomainError("split produced an empty part");
    for (std::size_t i : part) {
      if (i >= n || seen[i]) throw DomainError("split is not a partition");
      seen[i] = 1;
    }
    total += part.size();
  }
  if (total != n) throw DomainError("split is not a partition");
}

}  // namespace

SplitIndices train_test_split(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n < 4) throw DomainError("train/test split needs at least 4 samples");
  if (!(test_fraction > 0 && test_fraction < 1))
    throw DomainError("test fraction must lie strictly between 0 and 1");
  const auto perm = shuffled_indices(n, seed);
  const auto n_test = static_cast<std::size_t>(std::floor(static_cast<double>(n) * test_fraction + 0.5));

  SplitIndices s;
  s.seed = seed;
  s.test.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  check_partition({s.test, s.train}, n);
  return s;
}

std::vector<std::size_t> FoldAssignment::members(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldAssignment::complement(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldAssignment kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw DomainError("k-fold needs k >= 2");
  if (n < static_cast<std::size_t>(k))
    throw DomainError("cannot split " + std::to_string(n) + " samples into " + std::to_string(k) +
                      " folds");
  const auto perm = shuffled_indices(n, seed);
  FoldAssignment f;
  f.k = k;
  f.seed = seed;
  f.fold_of.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) f.fold_of[perm[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
  std::vector<std::vector<std::size_t>> parts;
  for (int fold = 0; fold < k; ++fold) parts.push_back(f.members(fold));
  check_partition(parts, n);
  return f;
}

double r2(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y.size(), yhat.size());
  if (y.size() < 2) throw DomainError("R^2 needs at least two samples");
  const double mu = mean(y);
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mu) * (y[i] - mu);
  }
  if (ss_tot == 0) throw DomainError("R^2 undefined for a constant target");
  return 1.0 - ss_res / ss_tot;
}

double adjusted_r2(double r2_value, std::size_t n, std::size_t p) {
  if (n <= p + 1)
    throw DomainError("adjusted R^2 needs n > p + 1 (n=" + std::to_string(n) +
                      ", p=" + std::to_string(p) + ")");
  return 1.0 - (1.0 - r2_value) * static_cast<double>(n - 1) / static_cast<double>(n - p - 1);
}

double neg_mse(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y.size(), yhat.size());
  if (y.empty()) throw DomainError("MSE of empty vectors");
  double ss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) ss += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  return -ss / static_cast<double>(y.size());
}

double neg_rmse(std::span<const double> y, std::span<const double> yhat) {
  return -std::sqrt(-neg_mse(y, yhat));
}

std::vector<double> residuals(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y.size(), yhat.size());
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] - yhat[i];
  return out;
}

FoldScore evaluate_fold(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& opts,
                        const FoldAssignment& folds, int fold,
                        const std::vector<std::string>& standardize_columns) {
  if (folds.fold_of.size() != static_cast<std::size_t>(matrix.n()))
    throw DomainError("fold assignment does not match matrix rows");

  FeatureMatrix train = matrix.rows(folds.complement(fold));
  FeatureMatrix held = matrix.rows(folds.members(fold));
  const auto columns = present_columns(matrix, standardize_columns);
  if (!columns.empty()) {
    const auto params = standardize_fit(train, columns);
    train = standardize_apply(train, params);
    held = standardize_apply(held, params);
  }

  const FitResult fit = fit_model(kind, train.x, train.y, opts);
  const Eigen::VectorXd yhat = predict(fit, held.x);

  FoldScore score{};
  const auto n_held = static_cast<std::size_t>(held.n());
  const auto p = static_cast<std::size_t>(held.p());
  score.adjusted_r2 =
      n_held > p + 1 ? adjusted_r2(r2(as_span(held.y), as_span(yhat)), n_held, p) : kUndefined;
  score.neg_rmse = neg_rmse(as_span(held.y), as_span(yhat));
  score.neg_mse = neg_mse(as_span(held.y), as_span(yhat));
  return score;
}

CvScores cross_validate(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& opts,
                        int k, std::uint64_t seed,
                        const std::vector<std::string>& standardize_columns) {
  const FoldAssignment folds = kfold_split(static_cast<std::size_t>(matrix.n()), k, seed);
  CvScores scores;
  for (int f = 0; f < k; ++f) {
    FoldScore s{};
    try {
      s = evaluate_fold(matrix, kind, opts, folds, f, standardize_columns);
    } catch (const DomainError& e) {
      throw DomainError("fold " + std::to_string(f) + ": " + e.what());
    }
    scores.adjusted_r2.push_back(s.adjusted_r2);
    scores.neg_rmse.push_back(s.neg_rmse);
    scores.neg_mse.push_back(s.neg_mse);
  }
  return scores;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = -8; i <= 4; ++i) grid.push_back(std::pow(10.0, i / 2.0));
  return grid;
}

double select_alpha(const FeatureMatrix& matrix, ModelKind kind, const SolverOptions& base,
                    int k, std::uint64_t seed, const std::vector<std::string>& standardize_columns,
                    const std::vector<double>& grid) {
  if (grid.empty()) throw DomainError("empty alpha grid");
  double best_alpha = grid.front();
  double best_score = -std::numeric_limits<double>::infinity();
  for (double alpha : grid) {
    SolverOptions opts = base;
    opts.alpha = alpha;
    const CvScores s = cross_validate(matrix, kind, opts, k, seed, standardize_columns);
    const double score = mean(s.neg_rmse);
    if (score > best_score || (score == best_score && alpha < best_alpha)) {
      best_score = score;
      best_alpha = alpha;
    }
  }
  return best_alpha;
}

}  // namespace housereg
