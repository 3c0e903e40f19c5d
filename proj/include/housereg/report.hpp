#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "housereg/config.hpp"
#include "housereg/evaluate.hpp"
#include "housereg/features.hpp"
#include "housereg/linmodel.hpp"
#include "housereg/stats.hpp"

namespace housereg {

struct PipelineOptions {
  std::uint64_t seed = 42;
  double test_fraction = 0.3;
  int folds = 7;
  double alpha_ridge = 1.0;
  double alpha_lasso = 0.001;
  bool alpha_search = false;
  bool drop_reference = false;
  double outlier_k = 3.0;
  std::size_t histogram_bins = 30;
  double tol = 1e-7;
  int max_iter = 10000;
  double rank_tolerance = 1e-10;
  /// Progress and dropped-record notices. Defaults to silence.
  std::function<void(const std::string&)> log;
};

struct SchemaRow {
  std::string field;
  std::string type;
  std::string notes;
};

/// The ten ingested fields and how each is used.
const std::vector<SchemaRow>& schema_table();

struct ScatterSeries {
  std::string feature;
  std::vector<double> x;  // standardized feature
  std::vector<double> y;  // standardized target
};

struct ReportBundle {
  std::vector<SummaryRow> summary_table;
  std::vector<SchemaRow> schema_table;
  /// Indicator column -> point-biserial r against the target
  /// (kUndefined when the column holds one class only).
  std::vector<std::pair<std::string, double>> pbc_table;
  std::map<ModelKind, FitResult> coef_table;
  ModelComparison fit_table;

  std::vector<BoxplotData> boxplots;
  HistogramData histogram;
  CorrelationMatrix correlation;
  std::vector<std::string> correlation_skipped;  // constant columns
  std::vector<ScatterSeries> scatter;
  StandardizationParams standardization;
  DesignDiagnostics design;

  nlohmann::json manifest;
};

struct ModelRun {
  std::map<ModelKind, FitResult> fits;
  ModelComparison comparison;
};

/// Fits Linear, Ridge and Lasso on `train` with inference and scores them on
/// `test`. Cross-validation runs on `train_raw`, standardizing
/// `standardize_columns` per fold; pass train as train_raw and no columns
/// for a design that is already standardized.
ModelRun fit_models(const FeatureMatrix& train_raw, const FeatureMatrix& train,
                    const FeatureMatrix& test, const std::vector<std::string>& standardize_columns,
                    const PipelineOptions& options);

/// Runs coercion through test scoring on already-parsed records.
/// `input` describes the source for the manifest (path, format, digest).
/// Stage failures are rethrown as StageError.
ReportBundle run_pipeline(const PipelineConfig& config,
                          const std::vector<RawPropertyRecord>& raw,
                          const PipelineOptions& options, nlohmann::json input = {});

/// Reads and parses `input_path`, then runs the pipeline above.
ReportBundle run_pipeline(const PipelineConfig& config, const std::filesystem::path& input_path,
                          DocumentFormat format, const PipelineOptions& options);

enum class TableFormat { kCsv, kMarkdown, kJson };

std::optional<TableFormat> parse_table_format(std::string_view text);

/// Writes table4 and table5 in every requested format plus fig5_residuals.json.
std::vector<std::filesystem::path> emit_model_tables(const ModelRun& run,
                                                     const std::filesystem::path& out_dir,
                                                     const std::set<TableFormat>& formats);

/// Writes the five tables in every requested format, the five plot-data JSON
/// files and manifest.json. Returns written paths in write order.
std::vector<std::filesystem::path> emit_bundle(const ReportBundle& bundle,
                                               const std::filesystem::path& out_dir,
                                               const std::set<TableFormat>& formats);

/// A table as rows of cells, header first. Numbers use format_number.
using Table = std::vector<std::vector<std::string>>;

Table table1(const ReportBundle& b);
Table table2(const ReportBundle& b);
Table table3(const ReportBundle& b);
Table table4(const std::map<ModelKind, FitResult>& fits);
Table table5(const ModelComparison& comparison, const std::map<ModelKind, FitResult>& fits);

/// Shortest text that parses back to the same double; "NaN" when undefined.
std::string format_number(double v);
/// Inverse of format_number.
double parse_number(std::string_view text);

std::string to_csv(const Table& t);
/// Parses CSV produced by to_csv.
Table parse_csv_table(std::string_view text);

/// SHA-256 of `data` as lowercase hex.
std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// A prepared design for the `fit` subcommand: CSV with a header, one column
/// named `target`, every other column a feature.
FeatureMatrix read_matrix_csv(std::string_view text, const std::string& target);

}  // namespace housereg
