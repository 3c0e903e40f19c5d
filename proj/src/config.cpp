#include "housereg/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "housereg/error.hpp"

namespace housereg {

using json = nlohmann::json;

PipelineConfig default_config() {
  PipelineConfig c;
  c.source.endpoint = "https://opendata.maryland.gov";
  c.source.dataset_id = "ed4q-f8tm";
  c.style_vocabulary = default_style_vocabulary();
  return c;
}

PipelineConfig parse_config(const std::string& json_text) {
  PipelineConfig c = default_config();
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  try {
    if (doc.contains("source")) {
      const json& s = doc.at("source");
      SourceConfig& src = c.source;
      src.endpoint = s.value("endpoint", src.endpoint);
      src.dataset_id = s.value("dataset_id", src.dataset_id);
      src.page_size = s.value("page_size", src.page_size);
      src.max_records = s.value("max_records", src.max_records);
      src.retry_limit = s.value("retry_limit", src.retry_limit);
      src.retry_delay = std::chrono::milliseconds(
          s.value("retry_delay_ms", static_cast<long long>(src.retry_delay.count())));
      src.timeout =
          std::chrono::seconds(s.value("timeout_s", static_cast<long long>(src.timeout.count())));
      src.order_by = s.value("order_by", src.order_by);
      if (s.contains("field_mapping")) {
        FieldMapping mapping;
        for (const auto& [column, field] : s.at("field_mapping").items()) {
          auto f = raw_field_from_name(field.get<std::string>());
          if (!f) throw ConfigError("field_mapping targets unknown field '" + field.get<std::string>() + "'");
          mapping.emplace(column, *f);
        }
        src.field_mapping = std::move(mapping);
      }
      if (src.page_size < 1) throw ConfigError("page_size must be at least 1");
      if (src.max_records < 1) throw ConfigError("max_records must be at least 1");
      if (src.retry_limit < 0) throw ConfigError("retry_limit must be non-negative");
    }
    if (doc.contains("style_vocabulary")) {
      StyleVocabulary vocab;
      for (const auto& [code, entry] : doc.at("style_vocabulary").items()) {
        const auto stories_text = entry.at("stories").get<std::string>();
        auto stories = parse_stories(stories_text);
        if (!stories)
          throw ConfigError("style code '" + code + "' has unknown stories '" + stories_text + "'");
        vocab.emplace(code, StyleInfo{entry.at("basement").get<bool>(), *stories});
      }
      c.style_vocabulary = std::move(vocab);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_mapping(c.source.field_mapping);
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const PipelineConfig& config) {
  const SourceConfig& s = config.source;
  json mapping = json::object();
  for (const auto& [column, field] : s.field_mapping) mapping[column] = field_name(field);
  json vocab = json::object();
  for (const auto& [code, info] : config.style_vocabulary)
    vocab[code] = {{"basement", info.has_basement}, {"stories", to_string(info.stories)}};
  json doc = {
      {"source",
       {{"endpoint", s.endpoint},
        {"dataset_id", s.dataset_id},
        {"page_size", s.page_size},
        {"max_records", s.max_records},
        {"retry_limit", s.retry_limit},
        {"retry_delay_ms", s.retry_delay.count()},
        {"timeout_s", s.timeout.count()},
        {"order_by", s.order_by},
        {"field_mapping", mapping}}},
      {"style_vocabulary", vocab},
  };
  return doc.dump(2) + "\n";
}

}  // namespace housereg
