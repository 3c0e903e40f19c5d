#pragma once

#include <filesystem>
#include <string>

#include "housereg/features.hpp"
#include "housereg/ingest.hpp"

namespace housereg {

/// Everything the pipeline reads from its config file.
struct PipelineConfig {
  SourceConfig source;
  StyleVocabulary style_vocabulary;
};

/// Maryland assessment dataset on the state open-data portal, identity field
/// mapping, default style vocabulary.
PipelineConfig default_config();

/// JSON document:
///   {"source": {"endpoint", "dataset_id", "page_size", "max_records",
///               "retry_limit", "retry_delay_ms", "timeout_s", "order_by",
///               "field_mapping": {source column: field name}},
///    "style_vocabulary": {code: {"basement": bool, "stories": "2 1/2"}}}
/// Absent keys keep their defaults. Throws ConfigError.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

std::string config_to_json(const PipelineConfig& config);

}  // namespace housereg
