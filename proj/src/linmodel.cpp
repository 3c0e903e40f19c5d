#include "housereg/linmodel.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/beta.hpp>

#include "housereg/error.hpp"

namespace housereg {

namespace {

// Centered problem restricted to columns with nonzero variance.
struct CenteredProblem {
  Eigen::VectorXd x_mean;
  double y_mean = 0.0;
  Eigen::MatrixXd xc;  // retained columns only
  Eigen::VectorXd yc;
  std::vector<Eigen::Index> retained;
  std::vector<bool> eliminated;
};

CenteredProblem center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size())
    throw DomainError("design has " + std::to_string(x.rows()) + " rows but target has " +
                      std::to_string(y.size()));
  if (x.rows() < 2) throw DomainError("fitting needs at least two samples");
  if (x.cols() < 1) throw DomainError("fitting needs at least one column");
  if (!x.allFinite() || !y.allFinite()) throw DomainError("non-finite value in design or target");

  CenteredProblem c;
  c.x_mean = x.colwise().mean().transpose();
  c.y_mean = y.mean();
  c.yc = y.array() - c.y_mean;
  c.eliminated.assign(static_cast<std::size_t>(x.cols()), false);
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double spread = (x.col(j).array() - c.x_mean(j)).abs().maxCoeff();
    if (spread <= 1e-12 * std::max(1.0, std::abs(c.x_mean(j)))) {
      c.eliminated[static_cast<std::size_t>(j)] = true;
    } else {
      c.retained.push_back(j);
    }
  }
  c.xc.resize(x.rows(), static_cast<Eigen::Index>(c.retained.size()));
  for (std::size_t k = 0; k < c.retained.size(); ++k)
    c.xc.col(static_cast<Eigen::Index>(k)) = x.col(c.retained[k]).array() - c.x_mean(c.retained[k]);
  return c;
}

FitResult assemble(ModelKind kind, const CenteredProblem& c, const Eigen::VectorXd& beta_retained,
                   Eigen::Index p, const SolverOptions& opts) {
  FitResult fit;
  fit.model_kind = kind;
  fit.coefficients = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k < c.retained.size(); ++k)
    fit.coefficients(c.retained[k]) = beta_retained(static_cast<Eigen::Index>(k));
  fit.intercept = c.y_mean - c.x_mean.dot(fit.coefficients);
  fit.eliminated = c.eliminated;
  fit.alpha_used = opts.alpha;
  fit.std_errors = Eigen::VectorXd::Constant(p, kUndefined);
  fit.t_stats = Eigen::VectorXd::Constant(p, kUndefined);
  fit.p_values = Eigen::VectorXd::Constant(p, kUndefined);
  return fit;
}

// Shrinkage solve through the thin SVD of the centered design:
// beta = V diag(s / (s^2 + alpha)) U'y. With alpha = 0 this is the
// pseudo-inverse, truncated below rank_tolerance.
Eigen::VectorXd svd_solve(const Eigen::MatrixXd& xc, const Eigen::VectorXd& yc, double alpha,
                          double rank_tolerance, Eigen::Index& rank) {
  if (xc.cols() == 0) {
    rank = 0;
    return {};
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = rank_tolerance * s(0);
  const Eigen::VectorXd uty = svd.matrixU().transpose() * yc;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(s.size());
  rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) ++rank;
    if (alpha == 0.0 && s(i) <= cutoff) continue;
    scaled(i) = s(i) / (s(i) * s(i) + alpha) * uty(i);
  }
  return svd.matrixV() * scaled;
}

Eigen::Index numeric_rank(const Eigen::MatrixXd& xc, double rank_tolerance) {
  if (xc.cols() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(xc);
  const auto& s = svd.singularValues();
  return (s.array() > rank_tolerance * s(0)).count();
}

// pinv(B'B) = V diag(1/s^2) V' from the SVD of B, truncated like the solvers.
Eigen::MatrixXd gram_pinv(const Eigen::MatrixXd& b, double rank_tolerance) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tolerance * s(0)) inv(i) = 1.0 / (s(i) * s(i));
  return svd.matrixV() * inv.asDiagonal() * svd.matrixV().transpose();
}

void set_inference(double beta, double se, double dof, double& se_out, double& t_out,
                   double& p_out) {
  se_out = se;
  if (se > 0) {
    t_out = beta / se;
  } else if (beta != 0) {
    t_out = std::copysign(std::numeric_limits<double>::infinity(), beta);
  } else {
    t_out = 0.0;
  }
  p_out = student_t_two_sided_p(t_out, dof);
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kLinear: return "Linear";
    case ModelKind::kRidge: return "Ridge";
    case ModelKind::kLasso: return "Lasso";
  }
  return "?";
}

void validate(const SolverOptions& opts) {
  if (!(opts.alpha >= 0)) throw DomainError("alpha must be non-negative");
  if (!(opts.tol > 0)) throw DomainError("tol must be positive");
  if (opts.max_iter < 1) throw DomainError("max_iter must be at least 1");
  if (!(opts.rank_tolerance > 0)) throw DomainError("rank_tolerance must be positive");
}

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

FitResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SolverOptions& opts) {
  validate(opts);
  const CenteredProblem c = center(x, y);
  Eigen::Index rank = 0;
  const Eigen::VectorXd beta = svd_solve(c.xc, c.yc, 0.0, opts.rank_tolerance, rank);
  FitResult fit = assemble(ModelKind::kLinear, c, beta, x.cols(), opts);
  fit.alpha_used = 0.0;
  fit.rank = rank;
  return fit;
}

FitResult fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts) {
  validate(opts);
  const CenteredProblem c = center(x, y);
  Eigen::Index rank = 0;
  const Eigen::VectorXd beta = svd_solve(c.xc, c.yc, opts.alpha, opts.rank_tolerance, rank);
  FitResult fit = assemble(ModelKind::kRidge, c, beta, x.cols(), opts);
  fit.rank = rank;
  return fit;
}

FitResult fit_lasso(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts) {
  validate(opts);
  const CenteredProblem c = center(x, y);
  const double n = static_cast<double>(x.rows());
  const Eigen::Index q = c.xc.cols();

  // Covariance form of the coordinate update: with G = X'X/n and b = X'y/n,
  // x_j'(r + x_j beta_j)/n = b_j - (G beta)_j + G_jj beta_j.
  const Eigen::MatrixXd gram = c.xc.transpose() * c.xc / n;
  const Eigen::VectorXd xty = c.xc.transpose() * c.yc / n;
  const double yty = c.yc.squaredNorm() / n;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd g_beta = Eigen::VectorXd::Zero(q);

  auto objective = [&] {
    return 0.5 * (yty - 2.0 * xty.dot(beta) + beta.dot(g_beta)) + opts.alpha * beta.lpNorm<1>();
  };

  FitResult fit;
  std::vector<double> trace;
  if (opts.record_objective) trace.push_back(objective());

  int sweeps = 0;
  bool converged = q == 0;
  while (!converged && sweeps < opts.max_iter) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) {
      const double z = gram(j, j);
      const double cj = xty(j) - g_beta(j) + z * beta(j);
      const double updated = soft_threshold(cj, opts.alpha) / z;
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        g_beta += delta * gram.col(j);
        beta(j) = updated;
        max_delta = std::max(max_delta, std::abs(delta));
      }
    }
    ++sweeps;
    if (opts.record_objective) trace.push_back(objective());
    converged = max_delta < opts.tol;
  }

  fit = assemble(ModelKind::kLasso, c, beta, x.cols(), opts);
  fit.iterations = sweeps;
  fit.converged = converged;
  fit.rank = numeric_rank(c.xc, opts.rank_tolerance);
  fit.objective_trace = std::move(trace);
  return fit;
}

FitResult fit_model(ModelKind kind, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                    const SolverOptions& opts) {
  switch (kind) {
    case ModelKind::kLinear: return fit_ols(x, y, opts);
    case ModelKind::kRidge: return fit_ridge(x, y, opts);
    case ModelKind::kLasso: return fit_lasso(x, y, opts);
  }
  throw std::logic_error("unknown ModelKind");
}

double lasso_alpha_max(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const CenteredProblem c = center(x, y);
  if (c.xc.cols() == 0) return 0.0;
  return (c.xc.transpose() * c.yc).cwiseAbs().maxCoeff() / static_cast<double>(x.rows());
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double intercept,
                       const Eigen::VectorXd& coefficients, double alpha) {
  const Eigen::VectorXd r = y - x * coefficients -
                            Eigen::VectorXd::Constant(y.size(), intercept);
  return r.squaredNorm() / (2.0 * static_cast<double>(y.size())) +
         alpha * coefficients.lpNorm<1>();
}

Eigen::VectorXd predict(const FitResult& fit, const Eigen::MatrixXd& x) {
  if (x.cols() != fit.coefficients.size())
    throw DomainError("prediction input has " + std::to_string(x.cols()) +
                      " columns, model expects " + std::to_string(fit.coefficients.size()));
  return (x * fit.coefficients).array() + fit.intercept;
}

FitResult coefficient_inference(const FitResult& fit, const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y, double rank_tolerance) {
  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  if (y.size() != n) throw DomainError("target length does not match design rows");
  if (n <= p + 1)
    throw DomainError("inference needs n > p + 1 (n=" + std::to_string(n) +
                      ", p=" + std::to_string(p) + ")");

  FitResult out = fit;
  out.std_errors = Eigen::VectorXd::Constant(p, kUndefined);
  out.t_stats = Eigen::VectorXd::Constant(p, kUndefined);
  out.p_values = Eigen::VectorXd::Constant(p, kUndefined);

  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool eliminated = !fit.eliminated.empty() && fit.eliminated[static_cast<std::size_t>(j)];
    if (eliminated) continue;
    if (fit.model_kind == ModelKind::kLasso && fit.coefficients(j) == 0.0) continue;
    cols.push_back(j);
  }
  const auto k = static_cast<Eigen::Index>(cols.size());

  double rss = (y - predict(fit, x)).squaredNorm();
  // Residuals at rounding level count as an exact fit.
  const double eps = std::numeric_limits<double>::epsilon() * static_cast<double>(n);
  if (rss <= eps * eps * y.squaredNorm()) rss = 0.0;
  const double dof = static_cast<double>(n - k - 1);
  const double sigma2 = rss / dof;
  out.residual_dof = dof;

  // Ridge: A'A + alpha*D equals B'B for A stacked over sqrt(alpha) rows on
  // the penalized coordinates.
  const Eigen::Index extra = fit.model_kind == ModelKind::kRidge && fit.alpha_used > 0 ? k : 0;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + extra, k + 1);
  b.col(0).head(n).setOnes();
  for (Eigen::Index c = 0; c < k; ++c) {
    b.col(c + 1).head(n) = x.col(cols[static_cast<std::size_t>(c)]);
    if (extra) b(n + c, c + 1) = std::sqrt(fit.alpha_used);
  }
  const Eigen::MatrixXd cov = sigma2 * gram_pinv(b, rank_tolerance);
  auto se_at = [&](Eigen::Index i) { return std::sqrt(std::max(cov(i, i), 0.0)); };

  set_inference(fit.intercept, se_at(0), dof, out.intercept_std_error, out.intercept_t,
                out.intercept_p);
  for (Eigen::Index c = 0; c < k; ++c) {
    const Eigen::Index j = cols[static_cast<std::size_t>(c)];
    set_inference(fit.coefficients(j), se_at(c + 1), dof, out.std_errors(j), out.t_stats(j),
                  out.p_values(j));
  }
  return out;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0)) throw DomainError("degrees of freedom must be positive");
  if (std::isnan(t)) return kUndefined;
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;
  // P(|T| >= t) = I_{dof/(dof+t^2)}(dof/2, 1/2)
  const double xval = dof / (dof + t * t);
  return std::clamp(boost::math::ibeta(dof / 2.0, 0.5, xval), 0.0, 1.0);
}

DesignDiagnostics diagnose_design(const Eigen::MatrixXd& x, double rank_tolerance) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);

  DesignDiagnostics d;
  d.columns = a.cols();
  d.singular_values = svd.singularValues();
  const double smax = d.singular_values(0);
  d.rank = (d.singular_values.array() > rank_tolerance * smax).count();
  d.rank_deficient = d.rank < d.columns;
  const double smin = d.singular_values(d.singular_values.size() - 1);
  d.normal_condition_number =
      smin > 0 ? (smax / smin) * (smax / smin) : std::numeric_limits<double>::infinity();
  return d;
}

Eigen::VectorXd naive_normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  const Eigen::MatrixXd h = a.transpose() * a;
  return h.partialPivLu().solve(a.transpose() * y);
}

}  // namespace housereg
