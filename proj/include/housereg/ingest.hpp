#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "housereg/categories.hpp"
#include "housereg/error.hpp"

namespace housereg {

/// The ten source fields the pipeline consumes, after renaming.
enum class RawField {
  kDwellingType,
  kPriorYearSalesPrice,
  kCurrentAssessmentYear,
  kBuildingStyleCode,
  kBuildingStyleDescription,
  kYearBuilt,
  kSizeOfHouse,
  kStreetAddressType,
  kHousingSalesPrice,
  kDwellingGrade,
};

inline constexpr std::size_t kRawFieldCount = 10;

std::string_view field_name(RawField f);
std::optional<RawField> raw_field_from_name(std::string_view name);
const std::vector<RawField>& all_raw_fields();

/// One property exactly as the source delivered it. No numeric
/// interpretation happens here; absent values are empty strings.
struct RawPropertyRecord {
  std::string dwelling_type;
  std::string prior_year_sales_price;
  std::string current_assessment_year;
  std::string building_style_code;
  std::string building_style_description;
  std::string year_built;
  std::string size_of_house;
  std::string street_address_type;
  std::string housing_sales_price;
  std::string dwelling_grade;

  std::string& at(RawField f);
  const std::string& at(RawField f) const;

  bool operator==(const RawPropertyRecord&) const = default;
};

struct TypedPropertyRecord {
  DwellingCategory dwelling_type;
  std::int64_t prior_year_sales_price;  // whole dollars
  int current_assessment_year;
  std::string building_style_code;
  std::string building_style_description;
  int year_built;
  std::int64_t size_of_house;  // square feet
  AddressType street_address_type;
  std::int64_t housing_sales_price;  // whole dollars
  int dwelling_grade;                // 1..6

  bool operator==(const TypedPropertyRecord&) const = default;
};

/// Source column name -> record field.
using FieldMapping = std::map<std::string, RawField, std::less<>>;

/// Maps every field name onto itself.
FieldMapping identity_mapping();

/// Throws ConfigError unless every RawField is the target of some column.
void validate_mapping(const FieldMapping& mapping);

struct SourceConfig {
  std::string endpoint;  // e.g. "https://opendata.maryland.gov"
  std::string dataset_id;
  std::size_t page_size = 1000;
  std::size_t max_records = 50000;
  FieldMapping field_mapping = identity_mapping();
  int retry_limit = 2;
  std::chrono::milliseconds retry_delay{500};
  std::string order_by = ":id";
  std::chrono::seconds timeout{30};
};

enum class DocumentFormat { kCsv, kJson };

std::optional<DocumentFormat> parse_format(std::string_view text);

/// Parses a CSV document (RFC 4180, header row required) or a JSON array of
/// flat objects into raw records. Columns not in `mapping` are ignored.
/// CSV headers lacking a mapped column raise SchemaError; JSON objects
/// lacking a key yield an empty field.
std::vector<RawPropertyRecord> parse_records(std::string_view text,
                                             DocumentFormat format,
                                             const FieldMapping& mapping);

/// Pages through a Socrata-style resource with $limit/$offset until a short
/// page or max_records. Requests are sequential; records keep fetch order.
std::vector<RawPropertyRecord> fetch_records(const SourceConfig& config);

/// Validates and converts every field. Throws CoercionError listing each
/// failing field; never substitutes defaults.
TypedPropertyRecord coerce_record(const RawPropertyRecord& raw);

/// Canonical text form. coerce_record(render_record(r)) == r.
RawPropertyRecord render_record(const TypedPropertyRecord& typed);

struct RejectedRecord {
  std::size_t index;
  std::vector<FieldError> errors;
};

struct CoercionOutcome {
  std::vector<TypedPropertyRecord> records;
  std::vector<RejectedRecord> rejected;
};

/// Coerces a batch, dropping (and reporting) records that fail.
CoercionOutcome coerce_all(const std::vector<RawPropertyRecord>& raws);

struct CsvDocument {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 reader. Every row must have as many fields as the header; blank
/// lines are skipped. Throws ParseError with line and byte offset.
CsvDocument parse_csv(std::string_view text);

/// Quotes a field when it holds a comma, quote or line break.
std::string csv_escape(std::string_view field);

/// Serializes records with the given column names (inverse of the mapping).
std::string write_records(const std::vector<RawPropertyRecord>& records,
                          DocumentFormat format, const FieldMapping& mapping);

}  // namespace housereg
