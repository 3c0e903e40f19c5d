#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "housereg/config.hpp"
#include "housereg/error.hpp"
#include "housereg/evaluate.hpp"
#include "housereg/fixture.hpp"
#include "housereg/ingest.hpp"
#include "housereg/report.hpp"

namespace fs = std::filesystem;
using namespace housereg;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitPipeline = 2;
constexpr int kExitIo = 3;

int exit_code(Error::Category c) {
  switch (c) {
    case Error::Category::kInput: return kExitInput;
    case Error::Category::kPipeline: return kExitPipeline;
    case Error::Category::kIo: return kExitIo;
  }
  return kExitPipeline;
}

DocumentFormat resolve_format(const std::string& flag, const fs::path& path) {
  std::string text = flag;
  if (text.empty()) text = path.extension() == ".json" ? "json" : "csv";
  auto f = parse_format(text);
  if (!f) throw ConfigError("unknown format '" + text + "' (expected csv or json)");
  return *f;
}

std::set<TableFormat> parse_emit(const std::string& list) {
  std::set<TableFormat> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    std::size_t comma = list.find(',', start);
    if (comma == std::string::npos) comma = list.size();
    const std::string item = list.substr(start, comma - start);
    if (!item.empty()) {
      auto f = parse_table_format(item);
      if (!f) throw ConfigError("unknown --emit format '" + item + "'");
      out.insert(*f);
    }
    start = comma + 1;
  }
  return out;
}

PipelineConfig config_from(const std::string& path) {
  return path.empty() ? default_config() : load_config(path);
}

void log_line(const std::string& msg) { std::cerr << msg << "\n"; }

struct ModelFlags {
  std::uint64_t seed = 42;
  double test_frac = 0.3;
  int folds = 7;
  double alpha_ridge = 1.0;
  double alpha_lasso = 0.001;
  bool alpha_search = false;
  bool quiet = false;
  std::string out;
  std::string emit = "csv,markdown,json";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Random seed for split and folds")->capture_default_str();
    cmd->add_option("--test-frac", test_frac, "Held-out test fraction")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    cmd->add_option("--folds", folds, "Cross-validation folds")
        ->check(CLI::Range(2, 1000))
        ->capture_default_str();
    cmd->add_option("--alpha-ridge", alpha_ridge, "Ridge penalty")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--alpha-lasso", alpha_lasso, "Lasso penalty")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_flag("--alpha-search", alpha_search, "Select penalties by cross-validation");
    cmd->add_option("--emit", emit, "Table formats: any of csv,markdown,json")->capture_default_str();
    cmd->add_flag("-q,--quiet", quiet, "Suppress progress messages");
  }

  PipelineOptions options() const {
    PipelineOptions o;
    o.seed = seed;
    o.test_fraction = test_frac;
    o.folds = folds;
    o.alpha_ridge = alpha_ridge;
    o.alpha_lasso = alpha_lasso;
    o.alpha_search = alpha_search;
    if (!quiet) o.log = log_line;
    return o;
  }
};

void print_summary(const ModelComparison& comparison) {
  for (const auto& [kind, s] : comparison.models)
    std::cerr << fmt::format("{:<7} test adjusted R^2 {:.4f}  test neg RMSE {:.4f}\n",
                             to_string(kind), s.test_adjusted_r2, s.test_neg_rmse);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Housing price regression pipeline: Linear, Ridge and Lasso on assessment records"};
  app.require_subcommand(1);

  // fetch
  std::string fetch_config, fetch_out, fetch_format;
  std::size_t fetch_max = 0;
  auto* fetch = app.add_subcommand("fetch", "Download records from the open-data endpoint");
  fetch->add_option("--config", fetch_config, "JSON config file");
  fetch->add_option("--out", fetch_out, "Output file")->required();
  fetch->add_option("--format", fetch_format, "csv or json (default: from extension)");
  fetch->add_option("--max-records", fetch_max, "Override the configured record cap");

  // report
  std::string report_input, report_format, report_config;
  bool drop_reference = false;
  double outlier_k = 3.0;
  ModelFlags report_flags;
  report_flags.out = "report";
  auto* report = app.add_subcommand("report", "Run the full pipeline and write tables and plot data");
  report->add_option("--input", report_input, "Records file")->required()->check(CLI::ExistingFile);
  report->add_option("--format", report_format, "csv or json (default: from extension)");
  report->add_option("--config", report_config, "JSON config file");
  report->add_flag("--drop-reference", drop_reference,
                   "Drop the standard_unit and floors_1 indicators");
  report->add_option("--outlier-k", outlier_k, "IQR fence multiplier")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  report->add_option("--out", report_flags.out, "Output directory")->capture_default_str();
  report_flags.add_to(report);

  // fit
  std::string fit_input, fit_target = std::string(kTargetName);
  ModelFlags fit_flags;
  fit_flags.out = "fit";
  auto* fit = app.add_subcommand("fit", "Fit the three models on a prepared, standardized matrix");
  fit->add_option("--input", fit_input, "CSV matrix with a header row")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--target", fit_target, "Target column")->capture_default_str();
  fit->add_option("--out", fit_flags.out, "Output directory")->capture_default_str();
  fit_flags.add_to(fit);

  // fixture
  std::size_t fixture_n = 11000;
  std::uint64_t fixture_seed = 42;
  std::string fixture_profile, fixture_out, fixture_format, fixture_config;
  bool zero_profile = false;
  auto* fixture = app.add_subcommand("fixture", "Generate synthetic assessment records");
  fixture->add_option("--n", fixture_n, "Record count (at least 100)")->capture_default_str();
  fixture->add_option("--seed", fixture_seed, "Generator seed")->capture_default_str();
  auto* profile_opt = fixture->add_option("--profile", fixture_profile, "Coefficient profile JSON")
                          ->check(CLI::ExistingFile);
  fixture->add_flag("--zero-profile", zero_profile, "All-zero coefficient profile")
      ->excludes(profile_opt);
  fixture->add_option("--config", fixture_config, "JSON config file (column names)");
  fixture->add_option("--out", fixture_out, "Output file")->required();
  fixture->add_option("--format", fixture_format, "csv or json (default: from extension)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*fetch) {
      PipelineConfig config = config_from(fetch_config);
      if (fetch_max) config.source.max_records = fetch_max;
      const DocumentFormat format = resolve_format(fetch_format, fetch_out);
      const auto records = fetch_records(config.source);
      write_file(fetch_out, write_records(records, format, config.source.field_mapping));
      std::cerr << fmt::format("fetched {} records into {}\n", records.size(), fetch_out);
    } else if (*report) {
      const PipelineConfig config = config_from(report_config);
      const DocumentFormat format = resolve_format(report_format, report_input);
      const auto formats = parse_emit(report_flags.emit);
      PipelineOptions options = report_flags.options();
      options.drop_reference = drop_reference;
      options.outlier_k = outlier_k;
      const ReportBundle bundle = run_pipeline(config, report_input, format, options);
      const auto files = emit_bundle(bundle, report_flags.out, formats);
      if (!report_flags.quiet) {
        print_summary(bundle.fit_table);
        std::cerr << fmt::format("wrote {} files to {}\n", files.size(), report_flags.out);
      }
    } else if (*fit) {
      const auto formats = parse_emit(fit_flags.emit);
      const PipelineOptions options = fit_flags.options();
      const FeatureMatrix m = read_matrix_csv(read_file(fit_input), fit_target);
      const SplitIndices split =
          train_test_split(static_cast<std::size_t>(m.n()), options.test_fraction, options.seed);
      const FeatureMatrix train = m.rows(split.train);
      const FeatureMatrix test = m.rows(split.test);
      const ModelRun run = fit_models(train, train, test, {}, options);
      const auto files = emit_model_tables(run, fit_flags.out, formats);
      if (!fit_flags.quiet) {
        print_summary(run.comparison);
        std::cerr << fmt::format("wrote {} files to {}\n", files.size(), fit_flags.out);
      }
    } else if (*fixture) {
      const CoefficientProfile profile = zero_profile ? zero_coefficient_profile()
                                         : fixture_profile.empty()
                                             ? default_coefficient_profile()
                                             : parse_coefficient_profile(read_file(fixture_profile));
      const PipelineConfig config = config_from(fixture_config);
      const DocumentFormat format = resolve_format(fixture_format, fixture_out);
      std::vector<RawPropertyRecord> rows;
      for (const auto& r : generate_fixture(fixture_n, fixture_seed, profile))
        rows.push_back(render_record(r));
      write_file(fixture_out, write_records(rows, format, config.source.field_mapping));
      std::cerr << fmt::format("wrote {} records to {}\n", rows.size(), fixture_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPipeline;
  }
  return 0;
}
