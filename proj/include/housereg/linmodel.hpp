#pragma once

#include <array>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace housereg {

enum class ModelKind { kLinear, kRidge, kLasso };

std::string_view to_string(ModelKind kind);

inline constexpr std::array<ModelKind, 3> kAllModels = {ModelKind::kLinear, ModelKind::kRidge,
                                                        ModelKind::kLasso};

/// Marker for inference that is not defined (eliminated or inactive columns).
inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

inline bool is_undefined(double v) { return v != v; }

struct SolverOptions {
  double alpha = 0.0;
  /// Coordinate descent stops once a full sweep moves no coefficient by
  /// more than tol.
  double tol = 1e-7;
  int max_iter = 10000;
  /// Singular values below rank_tolerance * largest are treated as zero.
  double rank_tolerance = 1e-10;
  /// Keep the Lasso objective after every sweep in FitResult::objective_trace.
  bool record_objective = false;
};

/// Throws DomainError when an invariant of SolverOptions is violated.
void validate(const SolverOptions& opts);

struct FitResult {
  ModelKind model_kind = ModelKind::kLinear;
  double intercept = 0.0;
  Eigen::VectorXd coefficients;
  std::vector<std::string> column_names;

  // Filled by coefficient_inference; kUndefined where not defined.
  Eigen::VectorXd std_errors;
  Eigen::VectorXd t_stats;
  Eigen::VectorXd p_values;
  double intercept_std_error = kUndefined;
  double intercept_t = kUndefined;
  double intercept_p = kUndefined;
  double residual_dof = kUndefined;

  double alpha_used = 0.0;
  int iterations = 0;
  bool converged = true;
  /// Numerical rank of the centered retained design.
  Eigen::Index rank = 0;
  /// Columns with zero variance; their coefficient is exactly 0.
  std::vector<bool> eliminated;
  std::vector<double> objective_trace;

  Eigen::Index p() const { return coefficients.size(); }
};

/// sign(z) * max(|z| - gamma, 0).
double soft_threshold(double z, double gamma);

/// Least squares with an unpenalized intercept. Rank-deficient designs get
/// the minimum-norm solution through a truncated SVD.
FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SolverOptions& opts);

/// Minimizes ||y - b0 - X b||^2 + alpha ||b||^2 with b0 unpenalized.
FitResult fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts);

/// Minimizes (1/2n) ||y - b0 - X b||^2 + alpha ||b||_1 by cyclic coordinate
/// descent on centered data.
FitResult fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts);

FitResult fit_model(ModelKind kind, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts);

/// Smallest alpha at which every Lasso coefficient is zero: max_j |x_j'y|/n
/// on centered data.
double lasso_alpha_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// The Lasso objective at (intercept, coefficients).
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double intercept,
                       const Eigen::VectorXd& coefficients, double alpha);

/// intercept + x * coefficients. Throws DomainError on a column mismatch.
Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x);

/// Standard errors, t statistics and two-sided p-values.
///
/// sigma^2 = RSS / (n - p - 1), p the number of retained columns. The
/// covariance is sigma^2 * pinv(H) on the design augmented with a constant
/// column, where H = A'A for Linear, A'A + alpha*I (intercept unpenalized)
/// for Ridge, and A'A restricted to the active set for Lasso. Zero-variance
/// and inactive Lasso columns get kUndefined.
FitResult coefficient_inference(const FitResult& fit, const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double rank_tolerance = 1e-10);

/// 2 * P(T >= |t|) for Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct DesignDiagnostics {
  Eigen::Index columns = 0;  // including the intercept column
  Eigen::Index rank = 0;
  bool rank_deficient = false;
  Eigen::VectorXd singular_values;
  /// Condition number of A'A for A = [1 X]; +inf when singular.
  double normal_condition_number = 0.0;
};

DesignDiagnostics diagnose_design(const Eigen::MatrixXd& x, double rank_tolerance = 1e-10);

/// Solves (A'A) b = A'y by LU with no rank handling, A = [1 X]. Returns
/// (intercept, coefficients...). For contrast with the SVD path only.
Eigen::VectorXd naive_normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

}  // namespace housereg
