#include "housereg/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace housereg {

using json = nlohmann::json;

CoercionError::CoercionError(std::vector<FieldError> errors)
    : Error(Category::kInput,
            [&] {
              std::string msg = "record rejected:";
              for (const auto& e : errors) msg += " [" + e.field + ": " + e.message + "]";
              return msg;
            }()),
      errors_(std::move(errors)) {}

namespace {

constexpr std::array<std::string_view, kRawFieldCount> kFieldNames = {
    "dwelling_type",        "prior_year_sales_price", "current_assessment_year",
    "building_style_code",  "building_style_description", "year_built",
    "size_of_house",        "street_address_type",    "housing_sales_price",
    "dwelling_grade"};

// ---------------------------------------------------------------------------
// CSV (RFC 4180)

class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {
    // Skip a UTF-8 byte order mark.
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  CsvDocument read() {
    CsvDocument table;
    if (at_end()) throw ParseError("CSV document has no header row", 1, pos_);
    table.header = read_row();
    const std::size_t width = table.header.size();
    while (!at_end()) {
      const std::size_t row_line = line_;
      const std::size_t row_offset = pos_;
      auto row = read_row();
      // Blank lines carry no record.
      if (row.size() == 1 && row[0].empty()) continue;
      if (row.size() != width)
        throw ParseError("expected " + std::to_string(width) + " fields, found " +
                             std::to_string(row.size()),
                         row_line, row_offset);
      table.rows.push_back(std::move(row));
    }
    return table;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  std::vector<std::string> read_row() {
    std::vector<std::string> fields;
    std::string field;
    for (;;) {
      if (!at_end() && text_[pos_] == '"') {
        read_quoted(field);
      } else {
        while (!at_end() && text_[pos_] != ',' && text_[pos_] != '\n' &&
               text_[pos_] != '\r') {
          if (text_[pos_] == '"')
            throw ParseError("unexpected quote in unquoted field", line_, pos_);
          field.push_back(text_[pos_++]);
        }
      }
      fields.push_back(std::move(field));
      field.clear();
      if (at_end()) return fields;
      const char c = text_[pos_];
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == '\r') {
        ++pos_;
        if (!at_end() && text_[pos_] == '\n') ++pos_;
      } else if (c == '\n') {
        ++pos_;
      } else {
        throw ParseError("garbage after quoted field", line_, pos_);
      }
      ++line_;
      return fields;
    }
  }

  void read_quoted(std::string& field) {
    const std::size_t open_line = line_;
    const std::size_t open_pos = pos_;
    ++pos_;
    for (;;) {
      if (at_end()) throw ParseError("unterminated quoted field", open_line, open_pos);
      const char c = text_[pos_++];
      if (c == '"') {
        if (!at_end() && text_[pos_] == '"') {
          field.push_back('"');
          ++pos_;
          continue;
        }
        return;
      }
      if (c == '\n') ++line_;
      field.push_back(c);
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::vector<RawPropertyRecord> records_from_csv(std::string_view text,
                                                const FieldMapping& mapping) {
  CsvDocument table = parse_csv(text);

  // Column index per mapped field; the header must carry every mapped column.
  std::vector<std::pair<std::size_t, RawField>> bindings;
  for (const auto& [column, field] : mapping) {
    auto it = std::find(table.header.begin(), table.header.end(), column);
    if (it == table.header.end()) throw SchemaError(column);
    bindings.emplace_back(static_cast<std::size_t>(it - table.header.begin()), field);
  }

  std::vector<RawPropertyRecord> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    RawPropertyRecord rec;
    for (const auto& [idx, field] : bindings) rec.at(field) = row[idx];
    out.push_back(std::move(rec));
  }
  return out;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text,
                                                    std::size_t byte) {
  std::size_t line = 1;
  std::size_t last_newline = 0;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      last_newline = i + 1;
    }
  }
  return {line, byte - last_newline};
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return {};
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw ParseError("nested value where a scalar was expected", 1, 0);
}

RawPropertyRecord record_from_object(const json& obj, const FieldMapping& mapping) {
  RawPropertyRecord rec;
  for (const auto& [column, field] : mapping) {
    auto it = obj.find(column);
    if (it != obj.end()) rec.at(field) = scalar_text(*it);
  }
  return rec;
}

std::vector<RawPropertyRecord> records_from_json(std::string_view text,
                                                 const FieldMapping& mapping) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(std::string("malformed JSON: ") + e.what(), line, col);
  }
  if (!doc.is_array()) throw ParseError("JSON document is not an array", 1, 0);
  std::vector<RawPropertyRecord> out;
  out.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_object())
      throw ParseError("array element " + std::to_string(i) + " is not an object", 1, 0);
    out.push_back(record_from_object(doc[i], mapping));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coercion helpers

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::optional<std::int64_t> parse_digits(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value < 0) return std::nullopt;
  if (s.front() == '+' || s.front() == '-') return std::nullopt;
  return value;
}

// "$259,367" -> 259367. A fractional part is tolerated only if it is zero.
std::optional<std::int64_t> parse_currency(std::string_view text) {
  std::string cleaned;
  for (char c : trim(text))
    if (c != '$' && c != ',') cleaned.push_back(c);
  std::string_view s = trim(cleaned);
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view frac = s.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of('0') != std::string_view::npos)
      return std::nullopt;
    s = s.substr(0, dot);
  }
  return parse_digits(s);
}

constexpr int kEarliestYear = 1700;

}  // namespace

CsvDocument parse_csv(std::string_view text) { return CsvReader(text).read(); }

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string_view field_name(RawField f) { return kFieldNames[static_cast<std::size_t>(f)]; }

std::optional<RawField> raw_field_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kFieldNames.size(); ++i)
    if (kFieldNames[i] == name) return static_cast<RawField>(i);
  return std::nullopt;
}

const std::vector<RawField>& all_raw_fields() {
  static const std::vector<RawField> fields = [] {
    std::vector<RawField> v;
    for (std::size_t i = 0; i < kRawFieldCount; ++i) v.push_back(static_cast<RawField>(i));
    return v;
  }();
  return fields;
}

std::string& RawPropertyRecord::at(RawField f) {
  return const_cast<std::string&>(std::as_const(*this).at(f));
}

const std::string& RawPropertyRecord::at(RawField f) const {
  switch (f) {
    case RawField::kDwellingType: return dwelling_type;
    case RawField::kPriorYearSalesPrice: return prior_year_sales_price;
    case RawField::kCurrentAssessmentYear: return current_assessment_year;
    case RawField::kBuildingStyleCode: return building_style_code;
    case RawField::kBuildingStyleDescription: return building_style_description;
    case RawField::kYearBuilt: return year_built;
    case RawField::kSizeOfHouse: return size_of_house;
    case RawField::kStreetAddressType: return street_address_type;
    case RawField::kHousingSalesPrice: return housing_sales_price;
    case RawField::kDwellingGrade: return dwelling_grade;
  }
  throw std::logic_error("unknown RawField");
}

FieldMapping identity_mapping() {
  FieldMapping m;
  for (RawField f : all_raw_fields()) m.emplace(std::string(field_name(f)), f);
  return m;
}

void validate_mapping(const FieldMapping& mapping) {
  for (RawField f : all_raw_fields()) {
    bool covered = std::any_of(mapping.begin(), mapping.end(),
                               [f](const auto& kv) { return kv.second == f; });
    if (!covered)
      throw ConfigError("field mapping does not cover '" + std::string(field_name(f)) + "'");
  }
}

std::optional<DocumentFormat> parse_format(std::string_view text) {
  if (text == "csv") return DocumentFormat::kCsv;
  if (text == "json") return DocumentFormat::kJson;
  return std::nullopt;
}

std::vector<RawPropertyRecord> parse_records(std::string_view text, DocumentFormat format,
                                             const FieldMapping& mapping) {
  return format == DocumentFormat::kCsv ? records_from_csv(text, mapping)
                                        : records_from_json(text, mapping);
}

std::vector<RawPropertyRecord> fetch_records(const SourceConfig& config) {
  if (config.page_size < 1) throw ConfigError("page_size must be at least 1");
  validate_mapping(config.field_mapping);

  // Split "scheme://host[:port]/base" into client host part and path prefix.
  std::string host = config.endpoint;
  std::string base;
  if (auto scheme = host.find("://"); scheme != std::string::npos) {
    if (auto slash = host.find('/', scheme + 3); slash != std::string::npos) {
      base = host.substr(slash);
      host.resize(slash);
    }
  }
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::string path = base + "/resource/" + config.dataset_id + ".json";

  httplib::Client client(host);
  client.set_connection_timeout(config.timeout);
  client.set_read_timeout(config.timeout);

  std::vector<RawPropertyRecord> out;
  std::size_t offset = 0;
  while (out.size() < config.max_records) {
    const std::size_t limit = std::min(config.page_size, config.max_records - out.size());
    httplib::Params params{{"$limit", std::to_string(limit)},
                           {"$offset", std::to_string(offset)}};
    if (!config.order_by.empty()) params.emplace("$order", config.order_by);

    httplib::Result res;
    int attempts = 0;
    for (;;) {
      ++attempts;
      res = client.Get(path, params, httplib::Headers{});
      if (res) break;
      if (attempts > config.retry_limit)
        throw TransportError("request to " + host + path + " failed (" +
                                 httplib::to_string(res.error()) + ")",
                             attempts);
      std::this_thread::sleep_for(config.retry_delay);
    }
    if (res->status < 200 || res->status >= 300) throw SourceError(res->status);

    auto page = records_from_json(res->body, config.field_mapping);
    const std::size_t got = page.size();
    for (auto& r : page) {
      if (out.size() == config.max_records) break;
      out.push_back(std::move(r));
    }
    if (got < limit) break;
    offset += got;
  }
  return out;
}

TypedPropertyRecord coerce_record(const RawPropertyRecord& raw) {
  std::vector<FieldError> errors;
  auto fail = [&](FieldError::Kind kind, RawField f, std::string message) {
    errors.push_back({kind, std::string(field_name(f)), raw.at(f), std::move(message)});
  };

  auto currency = [&](RawField f) -> std::int64_t {
    if (auto v = parse_currency(raw.at(f))) return *v;
    fail(FieldError::Kind::kCoercion, f, "not a non-negative dollar amount: '" + raw.at(f) + "'");
    return 0;
  };
  auto year = [&](RawField f) -> std::optional<int> {
    std::string_view s = trim(raw.at(f));
    auto v = s.size() == 4 ? parse_digits(s) : std::nullopt;
    if (!v) {
      fail(FieldError::Kind::kCoercion, f, "not a 4-digit year: '" + raw.at(f) + "'");
      return std::nullopt;
    }
    return static_cast<int>(*v);
  };

  TypedPropertyRecord t{};

  if (auto d = parse_dwelling(raw.dwelling_type))
    t.dwelling_type = *d;
  else
    fail(FieldError::Kind::kCategory, RawField::kDwellingType,
         "unknown dwelling type '" + raw.dwelling_type + "'");

  t.prior_year_sales_price = currency(RawField::kPriorYearSalesPrice);
  t.housing_sales_price = currency(RawField::kHousingSalesPrice);

  auto assessed = year(RawField::kCurrentAssessmentYear);
  auto built = year(RawField::kYearBuilt);
  if (assessed) {
    t.current_assessment_year = *assessed;
    if (*assessed < kEarliestYear)
      fail(FieldError::Kind::kRange, RawField::kCurrentAssessmentYear,
           "year before " + std::to_string(kEarliestYear));
  }
  if (built) {
    t.year_built = *built;
    if (*built < kEarliestYear)
      fail(FieldError::Kind::kRange, RawField::kYearBuilt,
           "year before " + std::to_string(kEarliestYear));
    else if (assessed && *built > *assessed)
      fail(FieldError::Kind::kRange, RawField::kYearBuilt,
           "year built after assessment year " + std::to_string(*assessed));
  }

  t.building_style_code = std::string(trim(raw.building_style_code));
  t.building_style_description = std::string(trim(raw.building_style_description));

  if (auto size = parse_currency(raw.size_of_house); size && *size > 0)
    t.size_of_house = *size;
  else
    fail(FieldError::Kind::kCoercion, RawField::kSizeOfHouse,
         "not a positive square-foot count: '" + raw.size_of_house + "'");

  if (auto a = parse_address_type(raw.street_address_type))
    t.street_address_type = *a;
  else
    fail(FieldError::Kind::kCategory, RawField::kStreetAddressType,
         "address type must be SF or TH, got '" + raw.street_address_type + "'");

  if (auto g = parse_digits(trim(raw.dwelling_grade))) {
    if (*g >= 1 && *g <= 6)
      t.dwelling_grade = static_cast<int>(*g);
    else
      fail(FieldError::Kind::kRange, RawField::kDwellingGrade, "grade outside 1..6");
  } else {
    fail(FieldError::Kind::kCoercion, RawField::kDwellingGrade,
         "not an integer grade: '" + raw.dwelling_grade + "'");
  }

  if (!errors.empty()) throw CoercionError(std::move(errors));
  return t;
}

RawPropertyRecord render_record(const TypedPropertyRecord& t) {
  RawPropertyRecord r;
  r.dwelling_type = std::string(to_string(t.dwelling_type));
  r.prior_year_sales_price = std::to_string(t.prior_year_sales_price);
  r.current_assessment_year = std::to_string(t.current_assessment_year);
  r.building_style_code = t.building_style_code;
  r.building_style_description = t.building_style_description;
  r.year_built = std::to_string(t.year_built);
  r.size_of_house = std::to_string(t.size_of_house);
  r.street_address_type = std::string(to_string(t.street_address_type));
  r.housing_sales_price = std::to_string(t.housing_sales_price);
  r.dwelling_grade = std::to_string(t.dwelling_grade);
  return r;
}

CoercionOutcome coerce_all(const std::vector<RawPropertyRecord>& raws) {
  CoercionOutcome out;
  out.records.reserve(raws.size());
  for (std::size_t i = 0; i < raws.size(); ++i) {
    try {
      out.records.push_back(coerce_record(raws[i]));
    } catch (const CoercionError& e) {
      out.rejected.push_back({i, e.field_errors()});
    }
  }
  return out;
}

std::string write_records(const std::vector<RawPropertyRecord>& records,
                          DocumentFormat format, const FieldMapping& mapping) {
  // First source column per field, in field order.
  std::vector<std::pair<std::string, RawField>> columns;
  for (RawField f : all_raw_fields()) {
    for (const auto& [column, target] : mapping) {
      if (target == f) {
        columns.emplace_back(column, f);
        break;
      }
    }
  }

  if (format == DocumentFormat::kJson) {
    json arr = json::array();
    for (const auto& r : records) {
      json obj = json::object();
      for (const auto& [column, f] : columns) obj[column] = r.at(f);
      arr.push_back(std::move(obj));
    }
    return arr.dump(1) + "\n";
  }

  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(columns[i].first);
  }
  out += "\r\n";
  for (const auto& r : records) {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) out.push_back(',');
      out += csv_escape(r.at(columns[i].second));
    }
    out += "\r\n";
  }
  return out;
}

}  // namespace housereg
