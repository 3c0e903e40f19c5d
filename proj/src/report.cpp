#include "housereg/report.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "housereg/error.hpp"

namespace housereg {

using json = nlohmann::json;

namespace {

const std::vector<SchemaRow> kSchema = {
    {"dwelling_type", "category", "Categorical feature: center unit, end unit, split level, standard unit"},
    {"prior_year_sales_price", "integer dollars", "Continuous feature"},
    {"current_assessment_year", "integer year", "Used with year_built to derive house_age"},
    {"building_style_code", "text", "With its description, derives has_basement and number of stories"},
    {"building_style_description", "text", "With the style code, derives has_basement and number of stories"},
    {"year_built", "integer year", "Used with current_assessment_year to derive house_age"},
    {"size_of_house", "integer square feet", "Continuous feature"},
    {"street_address_type", "category {SF, TH}", "Categorical feature: single family or townhouse"},
    {"housing_sales_price", "integer dollars", "Target variable"},
    {"dwelling_grade", "integer 1-6", "Categorical feature (grades 2-6 as indicators)"},
};

const std::map<std::string, std::string> kDisplayNames = {
    {"prior_year_sales_price", "Prior Year Housing Sales Price"},
    {"size_of_house", "Size of House"},
    {"has_basement", "Has Basement"},
    {"house_age", "House Age"},
    {"center_unit", "Center Unit"},
    {"end_unit", "End Unit"},
    {"split_level", "Split Level"},
    {"standard_unit", "Standard Unit"},
    {"floors_1", "1 Floor"},
    {"floors_1_5", "1 and 1/2 Floors"},
    {"floors_2", "2 Floors"},
    {"floors_2_5", "2 and 1/2 Floors"},
    {"floors_3", "3 Floors"},
    {"single_family", "Single Family"},
    {"grade_2", "2 Dwelling Grade"},
    {"grade_3", "3 Dwelling Grade"},
    {"grade_4", "4 Dwelling Grade"},
    {"grade_5", "5 Dwelling Grade"},
    {"grade_6", "6 Dwelling Grade"},
};

std::string display_name(const std::string& column) {
  auto it = kDisplayNames.find(column);
  return it == kDisplayNames.end() ? column : it->second;
}

json json_number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  return v;
}

json json_numbers(const std::vector<double>& v) {
  json arr = json::array();
  for (double d : v) arr.push_back(json_number(d));
  return arr;
}

template <typename Fn>
auto run_stage(const std::string& name, std::size_t records, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(e.category(), name, records, e.what());
  }
}

double mean_defined(const std::vector<double>& v) {
  double sum = 0;
  std::size_t count = 0;
  for (double d : v) {
    if (is_undefined(d)) continue;
    sum += d;
    ++count;
  }
  return count ? sum / static_cast<double>(count) : kUndefined;
}

std::string fixed(double v, int digits) {
  if (is_undefined(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::string s = fmt::format("{:.{}f}", v, digits);
  // Avoid "-0.000".
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string p_value_text(double p) {
  if (is_undefined(p)) return "NaN";
  if (p < 0.001) return "<0.001";
  return fixed(p, 3);
}

std::string dollars(double v) {
  auto whole = static_cast<long long>(std::llround(v));
  std::string digits = std::to_string(std::llabs(whole));
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return std::string(whole < 0 ? "-$" : "$") + out;
}

std::string to_markdown(const Table& t) {
  std::string out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    out += "|";
    for (const auto& cell : t[r]) out += " " + cell + " |";
    out += "\n";
    if (r == 0) {
      out += "|";
      for (std::size_t c = 0; c < t[r].size(); ++c) out += c == 0 ? " --- |" : " ---: |";
      out += "\n";
    }
  }
  return out;
}

json to_json_rows(const Table& t) {
  json rows = json::array();
  for (std::size_t r = 1; r < t.size(); ++r) {
    json obj = json::object();
    for (std::size_t c = 0; c < t[0].size(); ++c) {
      const std::string& cell = t[r][c];
      double value = 0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(value))
        obj[t[0][c]] = value;
      else
        obj[t[0][c]] = cell;
    }
    rows.push_back(std::move(obj));
  }
  return rows;
}

// Display variants for markdown output.
Table table1_display(const ReportBundle& b) {
  Table t{{"No of Stories", "Count", "Minimum", "Maximum", "Mean", "Median",
           "Standard Deviation"}};
  for (const auto& r : b.summary_table)
    t.push_back({std::string(to_string(r.group)), std::to_string(r.count), dollars(r.minimum),
                 dollars(r.maximum), dollars(r.mean), dollars(r.median), dollars(r.std)});
  return t;
}

Table table3_display(const ReportBundle& b) {
  Table t{{"Feature Name", "Correlation"}};
  for (const auto& [name, r] : b.pbc_table) t.push_back({display_name(name), fixed(r, 2)});
  return t;
}

Table table4_display(const std::map<ModelKind, FitResult>& fits) {
  Table t{{"Regression Variables"}};
  for (const auto& [kind, fit] : fits) {
    const std::string m(to_string(kind));
    for (const char* col : {" Coef.", " Std.E.", " t", " p"}) t[0].push_back(m + col);
  }
  if (fits.empty()) return t;
  const auto& names = fits.begin()->second.column_names;
  std::vector<std::string> row{"Intercept"};
  for (const auto& [kind, fit] : fits) {
    row.push_back(fixed(fit.intercept, 3));
    row.push_back(fixed(fit.intercept_std_error, 3));
    row.push_back(fixed(fit.intercept_t, 3));
    row.push_back(p_value_text(fit.intercept_p));
  }
  t.push_back(row);
  for (std::size_t j = 0; j < names.size(); ++j) {
    row = {display_name(names[j])};
    const auto jj = static_cast<Eigen::Index>(j);
    for (const auto& [kind, fit] : fits) {
      row.push_back(fixed(fit.coefficients(jj), 3));
      row.push_back(fixed(fit.std_errors(jj), 3));
      row.push_back(fixed(fit.t_stats(jj), 3));
      row.push_back(p_value_text(fit.p_values(jj)));
    }
    t.push_back(row);
  }
  return t;
}

Table table5_display(const ModelComparison& c) {
  Table t{{"Regression Method", "CV Adjusted R^2", "CV Negative Root Mean Squared",
           "Test Adjusted R^2", "Test Negative Root Mean Squared"}};
  for (const auto& [kind, s] : c.models)
    t.push_back({std::string(to_string(kind)), fixed(mean_defined(s.cv.adjusted_r2), 4),
                 fmt::format("{:.4g}", mean_defined(s.cv.neg_rmse)), fixed(s.test_adjusted_r2, 4),
                 fmt::format("{:.4g}", s.test_neg_rmse)});
  return t;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json options_json(const PipelineOptions& o) {
  return {{"seed", o.seed},
          {"test_fraction", o.test_fraction},
          {"folds", o.folds},
          {"alpha_ridge", o.alpha_ridge},
          {"alpha_lasso", o.alpha_lasso},
          {"alpha_search", o.alpha_search},
          {"drop_reference", o.drop_reference},
          {"outlier_k", o.outlier_k},
          {"histogram_bins", o.histogram_bins},
          {"tol", o.tol},
          {"max_iter", o.max_iter},
          {"rank_tolerance", o.rank_tolerance}};
}

}  // namespace

const std::vector<SchemaRow>& schema_table() { return kSchema; }

std::optional<TableFormat> parse_table_format(std::string_view text) {
  if (text == "csv") return TableFormat::kCsv;
  if (text == "markdown" || text == "md") return TableFormat::kMarkdown;
  if (text == "json") return TableFormat::kJson;
  return std::nullopt;
}

std::string format_number(double v) {
  if (is_undefined(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

double parse_number(std::string_view text) {
  if (text == "NaN") return kUndefined;
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw ParseError("not a number: '" + std::string(text) + "'", 1, 0);
  return v;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& row : t) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(',');
      out += csv_escape(row[c]);
    }
    out += "\n";
  }
  return out;
}

Table parse_csv_table(std::string_view text) {
  CsvDocument doc = parse_csv(text);
  Table t;
  t.push_back(std::move(doc.header));
  for (auto& row : doc.rows) t.push_back(std::move(row));
  return t;
}

Table table1(const ReportBundle& b) {
  Table t{{"stories", "count", "minimum", "maximum", "mean", "median", "std"}};
  for (const auto& r : b.summary_table)
    t.push_back({std::string(to_string(r.group)), std::to_string(r.count), format_number(r.minimum),
                 format_number(r.maximum), format_number(r.mean), format_number(r.median),
                 format_number(r.std)});
  return t;
}

Table table2(const ReportBundle& b) {
  Table t{{"field", "type", "notes"}};
  for (const auto& r : b.schema_table) t.push_back({r.field, r.type, r.notes});
  return t;
}

Table table3(const ReportBundle& b) {
  Table t{{"feature", "correlation"}};
  for (const auto& [name, r] : b.pbc_table) t.push_back({name, format_number(r)});
  return t;
}

Table table4(const std::map<ModelKind, FitResult>& fits) {
  Table t{{"variable"}};
  for (const auto& [kind, fit] : fits) {
    const std::string m(to_string(kind));
    for (const char* col : {"_coef", "_std_err", "_t", "_p"}) t[0].push_back(m + col);
  }
  if (fits.empty()) return t;
  const auto& names = fits.begin()->second.column_names;
  std::vector<std::string> row{"intercept"};
  for (const auto& [kind, fit] : fits) {
    for (double v : {fit.intercept, fit.intercept_std_error, fit.intercept_t, fit.intercept_p})
      row.push_back(format_number(v));
  }
  t.push_back(row);
  for (std::size_t j = 0; j < names.size(); ++j) {
    row = {names[j]};
    const auto jj = static_cast<Eigen::Index>(j);
    for (const auto& [kind, fit] : fits) {
      for (double v : {fit.coefficients(jj), fit.std_errors(jj), fit.t_stats(jj), fit.p_values(jj)})
        row.push_back(format_number(v));
    }
    t.push_back(row);
  }
  return t;
}

Table table5(const ModelComparison& comparison, const std::map<ModelKind, FitResult>& fits) {
  Table t{{"model", "alpha", "cv_mean_adjusted_r2", "cv_mean_neg_rmse", "cv_mean_neg_mse",
           "test_adjusted_r2", "test_neg_rmse", "test_neg_mse"}};
  for (const auto& [kind, s] : comparison.models) {
    auto fit = fits.find(kind);
    const double alpha = fit == fits.end() ? kUndefined : fit->second.alpha_used;
    t.push_back({std::string(to_string(kind)), format_number(alpha),
                 format_number(mean_defined(s.cv.adjusted_r2)),
                 format_number(mean_defined(s.cv.neg_rmse)), format_number(mean_defined(s.cv.neg_mse)),
                 format_number(s.test_adjusted_r2), format_number(s.test_neg_rmse),
                 format_number(s.test_neg_mse)});
  }
  return t;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 computation failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

FeatureMatrix read_matrix_csv(std::string_view text, const std::string& target) {
  const CsvDocument doc = parse_csv(text);
  auto target_it = std::find(doc.header.begin(), doc.header.end(), target);
  if (target_it == doc.header.end()) throw SchemaError(target);
  const auto target_col = static_cast<std::size_t>(target_it - doc.header.begin());

  FeatureMatrix m;
  for (std::size_t c = 0; c < doc.header.size(); ++c)
    if (c != target_col) m.column_names.push_back(doc.header[c]);
  const auto n = static_cast<Eigen::Index>(doc.rows.size());
  m.x.resize(n, static_cast<Eigen::Index>(m.column_names.size()));
  m.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = doc.rows[static_cast<std::size_t>(i)];
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      double v = 0;
      try {
        v = parse_number(row[c]);
      } catch (const ParseError&) {
        throw ParseError("non-numeric cell '" + row[c] + "' in column '" + doc.header[c] + "'",
                         static_cast<std::size_t>(i) + 2, 0);
      }
      if (c == target_col)
        m.y(i) = v;
      else
        m.x(i, col++) = v;
    }
  }
  m.standardized = true;
  return m;
}

ModelRun fit_models(const FeatureMatrix& train_raw, const FeatureMatrix& train,
                    const FeatureMatrix& test, const std::vector<std::string>& standardize_columns,
                    const PipelineOptions& options) {
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };
  ModelRun run;
  for (ModelKind kind : kAllModels) {
    SolverOptions opts;
    opts.tol = options.tol;
    opts.max_iter = options.max_iter;
    opts.rank_tolerance = options.rank_tolerance;
    opts.alpha = kind == ModelKind::kRidge   ? options.alpha_ridge
                 : kind == ModelKind::kLasso ? options.alpha_lasso
                                             : 0.0;
    if (options.alpha_search && kind != ModelKind::kLinear) {
      opts.alpha = select_alpha(train_raw, kind, opts, options.folds, options.seed,
                                standardize_columns);
      log(fmt::format("fit: {} alpha selected by cross-validation: {}", to_string(kind), opts.alpha));
    }

    ModelScores scores;
    scores.cv = cross_validate(train_raw, kind, opts, options.folds, options.seed,
                               standardize_columns);

    FitResult fit = fit_model(kind, train.x, train.y, opts);
    fit.column_names = train.column_names;
    if (kind == ModelKind::kLasso && !fit.converged)
      log(fmt::format("fit: Lasso hit max_iter={} before tol={}", opts.max_iter, opts.tol));
    fit = coefficient_inference(fit, train.x, train.y, opts.rank_tolerance);

    const Eigen::VectorXd yhat = predict(fit, test.x);
    const auto n_test = static_cast<std::size_t>(test.n());
    const auto p = static_cast<std::size_t>(test.p());
    scores.test_adjusted_r2 = n_test > p + 1
                                  ? adjusted_r2(r2(as_span(test.y), as_span(yhat)), n_test, p)
                                  : kUndefined;
    scores.test_neg_rmse = neg_rmse(as_span(test.y), as_span(yhat));
    scores.test_neg_mse = neg_mse(as_span(test.y), as_span(yhat));
    scores.actual.assign(test.y.data(), test.y.data() + test.n());
    scores.predicted.assign(yhat.data(), yhat.data() + yhat.size());
    scores.residuals = residuals(as_span(test.y), as_span(yhat));

    run.fits.emplace(kind, std::move(fit));
    run.comparison.models.emplace(kind, std::move(scores));
  }
  return run;
}

ReportBundle run_pipeline(const PipelineConfig& config, const std::vector<RawPropertyRecord>& raw,
                          const PipelineOptions& options, json input) {
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  ReportBundle b;
  b.schema_table = kSchema;

  const CoercionOutcome coerced = run_stage("coerce", raw.size(), [&] { return coerce_all(raw); });
  log(fmt::format("coerce: {} of {} records valid, {} rejected", coerced.records.size(), raw.size(),
                  coerced.rejected.size()));
  for (const auto& rej : coerced.rejected) {
    std::string fields;
    for (const auto& e : rej.errors) fields += " " + e.field + " (" + e.message + ")";
    log(fmt::format("  dropped record {}:{}", rej.index, fields));
  }

  const std::size_t valid = coerced.records.size();
  FeatureMatrix encoded = run_stage("features", valid, [&] {
    return encode_features(coerced.records, config.style_vocabulary,
                           EncodeOptions{options.drop_reference});
  });

  OutlierRemoval filtered =
      run_stage("outliers", valid, [&] { return remove_story_outliers(encoded, options.outlier_k); });
  for (StoriesCategory g : filtered.unfiltered_groups)
    log(fmt::format("outliers: stories group {} has fewer than 4 rows, left unfiltered",
                    to_string(g)));
  log(fmt::format("outliers: removed {} of {} rows (k = {})", filtered.removed_count, encoded.n(),
                  options.outlier_k));
  const FeatureMatrix& m = filtered.matrix;
  const auto rows = static_cast<std::size_t>(m.n());

  run_stage("stats", rows, [&] {
    const auto groups = stories_groups(m);
    b.summary_table = group_summary(as_span(m.y), groups);
    b.boxplots = boxplot_stats(as_span(m.y), groups);
    b.histogram = histogram(as_span(m.y), options.histogram_bins);

    FeatureMatrix varying = m;
    varying.column_names.clear();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < m.p(); ++j) {
      const Eigen::VectorXd col = m.x.col(j);
      if (sample_std(as_span(col)) > 0) {
        keep.push_back(j);
        varying.column_names.push_back(m.column_names[static_cast<std::size_t>(j)]);
      } else {
        b.correlation_skipped.push_back(m.column_names[static_cast<std::size_t>(j)]);
      }
    }
    varying.x.resize(m.n(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k)
      varying.x.col(static_cast<Eigen::Index>(k)) = m.x.col(keep[k]);
    b.correlation = pearson_matrix(varying);

    const auto& numeric = numeric_column_names();
    for (Eigen::Index j = 0; j < m.p(); ++j) {
      const auto& name = m.column_names[static_cast<std::size_t>(j)];
      if (std::find(numeric.begin(), numeric.end(), name) != numeric.end()) continue;
      const Eigen::VectorXd col = m.x.col(j);
      double r = kUndefined;
      if (col.minCoeff() != col.maxCoeff()) r = point_biserial(as_span(col), as_span(m.y));
      b.pbc_table.emplace_back(name, r);
    }
    return 0;
  });

  const SplitIndices split =
      run_stage("split", rows, [&] { return train_test_split(rows, options.test_fraction, options.seed); });
  const FeatureMatrix train_raw = m.rows(split.train);
  const FeatureMatrix test_raw = m.rows(split.test);

  std::vector<std::string> standardize_columns;
  for (const auto& name : numeric_column_names())
    if (m.column_index(name)) standardize_columns.push_back(name);
  standardize_columns.emplace_back(kTargetName);

  FeatureMatrix train, test;
  run_stage("standardize", split.train.size(), [&] {
    b.standardization = standardize_fit(train_raw, standardize_columns);
    train = standardize_apply(train_raw, b.standardization);
    test = standardize_apply(test_raw, b.standardization);
    return 0;
  });

  b.design = diagnose_design(train.x, options.rank_tolerance);
  log(fmt::format("design: {} columns with intercept, rank {}, cond(X'X) = {:.3g}",
                  b.design.columns, b.design.rank, b.design.normal_condition_number));

  for (const auto& name : numeric_column_names()) {
    auto col = train.column_index(name);
    if (!col) continue;
    ScatterSeries s;
    s.feature = name;
    s.x.assign(train.x.col(*col).data(), train.x.col(*col).data() + train.n());
    s.y.assign(train.y.data(), train.y.data() + train.n());
    b.scatter.push_back(std::move(s));
  }

  const ModelRun run = run_stage("fit", split.train.size(), [&] {
    return fit_models(train_raw, train, test, standardize_columns, options);
  });
  b.coef_table = run.fits;
  b.fit_table = run.comparison;
  json alphas = json::object();
  for (const auto& [kind, fit] : run.fits) alphas[std::string(to_string(kind))] = fit.alpha_used;

  b.manifest = {
      {"tool", "housereg"},
      {"options", options_json(options)},
      {"input", std::move(input)},
      {"records",
       {{"raw", raw.size()},
        {"valid", valid},
        {"rejected", coerced.rejected.size()},
        {"outliers_removed", filtered.removed_count},
        {"modelled", rows},
        {"train", split.train.size()},
        {"test", split.test.size()}}},
      {"alphas", alphas},
      {"design",
       {{"columns_with_intercept", b.design.columns},
        {"rank", b.design.rank},
        {"rank_deficient", b.design.rank_deficient},
        {"normal_condition_number", json_number(b.design.normal_condition_number)}}},
      {"standardization",
       {{"columns", b.standardization.column_names},
        {"means", json_numbers(b.standardization.means)},
        {"stds", json_numbers(b.standardization.stds)}}},
      {"generated_at", utc_timestamp()},
  };
  return b;
}

ReportBundle run_pipeline(const PipelineConfig& config, const std::filesystem::path& input_path,
                          DocumentFormat format, const PipelineOptions& options) {
  const std::string text = read_file(input_path);
  auto raw = run_stage("ingest", 0, [&] {
    return parse_records(text, format, config.source.field_mapping);
  });
  json input = {{"path", input_path.string()},
                {"format", format == DocumentFormat::kCsv ? "csv" : "json"},
                {"sha256", sha256_hex(text)}};
  return run_pipeline(config, raw, options, std::move(input));
}

std::vector<std::filesystem::path> emit_bundle(const ReportBundle& bundle,
                                               const std::filesystem::path& out_dir,
                                               const std::set<TableFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, std::string_view contents) {
    const auto path = out_dir / name;
    write_file(path, contents);
    written.push_back(path);
  };

  struct NamedTable {
    std::string stem;
    Table raw;
    Table display;
  };
  const std::vector<NamedTable> tables = {
      {"table1_summary", table1(bundle), table1_display(bundle)},
      {"table2_schema", table2(bundle), table2(bundle)},
      {"table3_point_biserial", table3(bundle), table3_display(bundle)},
      {"table4_coefficients", table4(bundle.coef_table), table4_display(bundle.coef_table)},
      {"table5_fit", table5(bundle.fit_table, bundle.coef_table), table5_display(bundle.fit_table)},
  };
  for (const auto& t : tables) {
    if (formats.contains(TableFormat::kCsv)) emit(t.stem + ".csv", to_csv(t.raw));
    if (formats.contains(TableFormat::kMarkdown)) emit(t.stem + ".md", to_markdown(t.display));
    if (formats.contains(TableFormat::kJson)) emit(t.stem + ".json", to_json_rows(t.raw).dump(2) + "\n");
  }

  json box = json::array();
  for (const auto& bp : bundle.boxplots)
    box.push_back({{"stories", to_string(bp.group)},
                   {"count", bp.count},
                   {"q1", bp.q1},
                   {"median", bp.median},
                   {"q3", bp.q3},
                   {"whisker_low", bp.whisker_low},
                   {"whisker_high", bp.whisker_high},
                   {"outliers", json_numbers(bp.outliers)}});
  emit("fig1_boxplot.json", json{{"variable", kTargetName}, {"groups", box}}.dump(2) + "\n");

  emit("fig2_histogram.json", json{{"variable", kTargetName},
                                   {"bin_edges", json_numbers(bundle.histogram.bin_edges)},
                                   {"counts", bundle.histogram.counts}}
                                      .dump(2) + "\n");

  json matrix = json::array();
  for (Eigen::Index i = 0; i < bundle.correlation.values.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(bundle.correlation.values.cols()));
    for (Eigen::Index j = 0; j < bundle.correlation.values.cols(); ++j)
      row[static_cast<std::size_t>(j)] = bundle.correlation.values(i, j);
    matrix.push_back(json_numbers(row));
  }
  emit("fig3_correlation.json", json{{"names", bundle.correlation.names},
                                     {"values", matrix},
                                     {"skipped_constant_columns", bundle.correlation_skipped}}
                                        .dump(2) + "\n");

  json series = json::array();
  for (const auto& s : bundle.scatter)
    series.push_back({{"feature", s.feature}, {"x", json_numbers(s.x)}, {"y", json_numbers(s.y)}});
  emit("fig4_scatter.json",
       json{{"units", "standardized"}, {"target", kTargetName}, {"series", series}}.dump(2) + "\n");

  json models = json::array();
  for (const auto& [kind, s] : bundle.fit_table.models) {
    const Eigen::VectorXd actual = Eigen::Map<const Eigen::VectorXd>(s.actual.data(), static_cast<Eigen::Index>(s.actual.size()));
    const Eigen::VectorXd predicted = Eigen::Map<const Eigen::VectorXd>(s.predicted.data(), static_cast<Eigen::Index>(s.predicted.size()));
    const Eigen::VectorXd actual_usd = unstandardize_target(actual, bundle.standardization);
    const Eigen::VectorXd predicted_usd = unstandardize_target(predicted, bundle.standardization);
    models.push_back({{"model", to_string(kind)},
                      {"actual", json_numbers(s.actual)},
                      {"predicted", json_numbers(s.predicted)},
                      {"residuals", json_numbers(s.residuals)},
                      {"residuals_dollars",
                       json_numbers(residuals(as_span(actual_usd), as_span(predicted_usd)))}});
  }
  emit("fig5_residuals.json", json{{"units", "standardized"}, {"models", models}}.dump(2) + "\n");

  json manifest = bundle.manifest;
  json files = json::array();
  for (const auto& p : written) files.push_back(p.filename().string());
  files.push_back("manifest.json");
  manifest["files"] = files;
  emit("manifest.json", manifest.dump(2) + "\n");
  return written;
}

}  // namespace housereg

namespace housereg {

std::vector<std::filesystem::path> emit_model_tables(const ModelRun& run,
                                                     const std::filesystem::path& out_dir,
                                                     const std::set<TableFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, std::string_view contents) {
    const auto path = out_dir / name;
    write_file(path, contents);
    written.push_back(path);
  };

  const std::vector<std::tuple<std::string, Table, Table>> tables = {
      {"table4_coefficients", table4(run.fits), table4_display(run.fits)},
      {"table5_fit", table5(run.comparison, run.fits), table5_display(run.comparison)},
  };
  for (const auto& [stem, raw, display] : tables) {
    if (formats.contains(TableFormat::kCsv)) emit(stem + ".csv", to_csv(raw));
    if (formats.contains(TableFormat::kMarkdown)) emit(stem + ".md", to_markdown(display));
    if (formats.contains(TableFormat::kJson)) emit(stem + ".json", to_json_rows(raw).dump(2) + "\n");
  }

  json models = json::array();
  for (const auto& [kind, s] : run.comparison.models)
    models.push_back({{"model", to_string(kind)},
                      {"actual", json_numbers(s.actual)},
                      {"predicted", json_numbers(s.predicted)},
                      {"residuals", json_numbers(s.residuals)}});
  emit("fig5_residuals.json", json{{"units", "standardized"}, {"models", models}}.dump(2) + "\n");
  return written;
}

}  // namespace housereg
