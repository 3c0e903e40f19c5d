#include "housereg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "housereg/error.hpp"

namespace housereg {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b)
    throw DomainError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

std::vector<std::vector<double>> split_by_group(std::span<const double> y,
                                                std::span<const StoriesCategory> groups) {
  check_lengths(y.size(), groups.size());
  if (y.empty()) throw DomainError("empty input");
  std::vector<std::vector<double>> out(kAllStories.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    out[static_cast<std::size_t>(index_of(groups[i]))].push_back(y[i]);
  for (auto& g : out) std::sort(g.begin(), g.end());
  return out;
}

std::vector<double> column(const FeatureMatrix& m, std::string_view name) {
  if (name == kTargetName) return {m.y.data(), m.y.data() + m.y.size()};
  auto col = m.column_index(name);
  if (!col) throw DomainError("no column named '" + std::string(name) + "'");
  std::vector<double> out(static_cast<std::size_t>(m.n()));
  for (Eigen::Index i = 0; i < m.n(); ++i) out[static_cast<std::size_t>(i)] = m.x(i, *col);
  return out;
}

}  // namespace

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DomainError("quantile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> v) {
  if (v.empty()) throw DomainError("mean of empty data");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double mu = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::vector<SummaryRow> group_summary(std::span<const double> y,
                                      std::span<const StoriesCategory> groups) {
  const auto split = split_by_group(y, groups);
  std::vector<SummaryRow> rows;
  for (std::size_t g = 0; g < split.size(); ++g) {
    const auto& v = split[g];
    if (v.empty()) continue;
    rows.push_back({kAllStories[g], v.front(), v.back(), mean(v), quantile_sorted(v, 0.5),
                    sample_std(v), v.size()});
  }
  return rows;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  check_lengths(a.size(), b.size());
  if (a.size() < 2) throw DomainError("correlation needs at least two samples");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) throw DomainError("correlation of a constant vector");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

CorrelationMatrix pearson_matrix(const FeatureMatrix& m) {
  CorrelationMatrix out;
  out.names = m.column_names;
  out.names.emplace_back(kTargetName);

  std::vector<std::vector<double>> cols;
  for (const auto& name : out.names) {
    cols.push_back(column(m, name));
    if (sample_std(cols.back()) == 0)
      throw DomainError("column '" + name + "' is constant; correlation undefined");
  }

  const auto p = static_cast<Eigen::Index>(cols.size());
  out.values = Eigen::MatrixXd::Identity(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = i + 1; j < p; ++j)
      out.values(i, j) = out.values(j, i) =
          pearson(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
  return out;
}

double point_biserial(std::span<const double> binary, std::span<const double> continuous) {
  check_lengths(binary.size(), continuous.size());
  double sum1 = 0, sum0 = 0;
  std::size_t n1 = 0, n0 = 0;
  for (std::size_t i = 0; i < binary.size(); ++i) {
    if (binary[i] == 1.0) {
      sum1 += continuous[i];
      ++n1;
    } else if (binary[i] == 0.0) {
      sum0 += continuous[i];
      ++n0;
    } else {
      throw DomainError("binary vector holds a value other than 0 or 1");
    }
  }
  if (n1 == 0 || n0 == 0) throw DomainError("point-biserial needs both classes present");

  const double n = static_cast<double>(binary.size());
  const double mu = mean(continuous);
  double ss = 0;
  for (double v : continuous) ss += (v - mu) * (v - mu);
  const double s_n = std::sqrt(ss / n);
  const double m1 = sum1 / static_cast<double>(n1);
  const double m0 = sum0 / static_cast<double>(n0);
  if (m1 == m0) return 0.0;
  if (s_n == 0) throw DomainError("point-biserial of a constant continuous vector");
  return (m1 - m0) / s_n * std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) / (n * n));
}

StandardizationParams standardize_fit(const FeatureMatrix& m,
                                      const std::vector<std::string>& columns) {
  StandardizationParams params;
  for (const auto& name : columns) {
    const auto v = column(m, name);
    const double sd = sample_std(v);
    if (!(sd > 0)) throw DomainError("column '" + name + "' is constant; cannot standardize");
    params.column_names.push_back(name);
    params.means.push_back(mean(v));
    params.stds.push_back(sd);
  }
  return params;
}

FeatureMatrix standardize_apply(const FeatureMatrix& m, const StandardizationParams& params) {
  FeatureMatrix out = m;
  for (std::size_t k = 0; k < params.column_names.size(); ++k) {
    const auto& name = params.column_names[k];
    const double mu = params.means[k];
    const double sd = params.stds[k];
    if (name == kTargetName) {
      out.y = (m.y.array() - mu) / sd;
      continue;
    }
    auto col = m.column_index(name);
    if (!col) throw DomainError("no column named '" + name + "' to standardize");
    out.x.col(*col) = (m.x.col(*col).array() - mu) / sd;
  }
  out.standardized = true;
  return out;
}

Eigen::VectorXd unstandardize_target(const Eigen::VectorXd& y,
                                     const StandardizationParams& params) {
  for (std::size_t k = 0; k < params.column_names.size(); ++k)
    if (params.column_names[k] == kTargetName)
      return (y.array() * params.stds[k] + params.means[k]).matrix();
  return y;
}

HistogramData histogram(std::span<const double> v, std::size_t bins) {
  if (bins == 0) throw DomainError("histogram needs at least one bin");
  if (v.empty()) throw DomainError("histogram of empty data");
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;

  HistogramData h;
  if (lo == hi) {
    h.bin_edges = {lo, hi};
    h.counts = {v.size()};
    return h;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i < bins; ++i) h.bin_edges[i] = lo + width * static_cast<double>(i);
  h.bin_edges[bins] = hi;
  h.counts.assign(bins, 0);
  for (double x : v) {
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), x);
    auto idx = static_cast<std::size_t>(it - h.bin_edges.begin());
    idx = std::min(idx == 0 ? 0 : idx - 1, bins - 1);
    ++h.counts[idx];
  }
  return h;
}

std::vector<BoxplotData> boxplot_stats(std::span<const double> y,
                                       std::span<const StoriesCategory> groups) {
  const auto split = split_by_group(y, groups);
  std::vector<BoxplotData> out;
  for (std::size_t g = 0; g < split.size(); ++g) {
    const auto& v = split[g];
    if (v.empty()) continue;
    BoxplotData b{};
    b.group = kAllStories[g];
    b.q1 = quantile_sorted(v, 0.25);
    b.median = quantile_sorted(v, 0.5);
    b.q3 = quantile_sorted(v, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = b.q1;
    b.whisker_high = b.q3;
    for (double x : v) {
      if (x < lo_fence || x > hi_fence) {
        b.outliers.push_back(x);
        continue;
      }
      b.whisker_low = std::min(b.whisker_low, x);
      b.whisker_high = std::max(b.whisker_high, x);
    }
    b.count = v.size();
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace housereg
