#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "housereg/error.hpp"
#include "housereg/fixture.hpp"
#include "housereg/ingest.hpp"
#include "housereg/random.hpp"

using namespace housereg;

namespace {

const char* kHeader =
    "dwelling_type,prior_year_sales_price,current_assessment_year,building_style_code,"
    "building_style_description,year_built,size_of_house,street_address_type,"
    "housing_sales_price,dwelling_grade\r\n";

std::string two_row_csv() {
  return std::string(kHeader) +
         "STANDARD UNIT,\"$250,000\",2020,S2B,STRY 2 WITH BASEMENT,1950,1800,SF,\"$259,367\",4\r\n"
         "END UNIT,199000,2020,S1N,STRY 1 NO BASEMENT,1990,1200,TH,210500,3\r\n";
}

RawPropertyRecord valid_raw() {
  RawPropertyRecord r;
  r.dwelling_type = "STANDARD UNIT";
  r.prior_year_sales_price = "250000";
  r.current_assessment_year = "2020";
  r.building_style_code = "S2B";
  r.building_style_description = "STRY 2 WITH BASEMENT";
  r.year_built = "1950";
  r.size_of_house = "1800";
  r.street_address_type = "SF";
  r.housing_sales_price = "$259,367";
  r.dwelling_grade = "4";
  return r;
}

nlohmann::json server_rows(int count) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < count; ++i) {
    nlohmann::json row;
    for (RawField f : all_raw_fields()) row[std::string(field_name(f))] = "v" + std::to_string(i);
    row["extra_column"] = i;
    rows.push_back(row);
  }
  return rows;
}

struct PagedServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::vector<std::pair<std::size_t, std::size_t>> requests;  // (limit, offset)
  std::mutex mu;

  explicit PagedServer(int total) {
    const nlohmann::json rows = server_rows(total);
    server.Get("/resource/test-set.json", [this, rows](const httplib::Request& req,
                                                       httplib::Response& res) {
      const auto limit = std::stoul(req.get_param_value("$limit"));
      const auto offset = std::stoul(req.get_param_value("$offset"));
      {
        std::lock_guard<std::mutex> lock(mu);
        requests.emplace_back(limit, offset);
      }
      nlohmann::json page = nlohmann::json::array();
      for (std::size_t i = offset; i < rows.size() && i < offset + limit; ++i) page.push_back(rows[i]);
      res.set_content(page.dump(), "application/json");
    });
    server.Get("/resource/broken.json", [](const httplib::Request&, httplib::Response& res) {
      res.status = 503;
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~PagedServer() {
    server.stop();
    thread.join();
  }

  SourceConfig config(std::string dataset = "test-set") const {
    SourceConfig c;
    c.endpoint = "http://127.0.0.1:" + std::to_string(port);
    c.dataset_id = std::move(dataset);
    c.retry_delay = std::chrono::milliseconds(1);
    c.timeout = std::chrono::seconds(5);
    return c;
  }
};

}  // namespace

TEST_CASE("csv with header and two rows yields two records") {
  const auto recs = parse_records(two_row_csv(), DocumentFormat::kCsv, identity_mapping());
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].housing_sales_price == "$259,367");
  CHECK(recs[1].dwelling_type == "END UNIT");
  CHECK(recs[1].street_address_type == "TH");
}

TEST_CASE("empty json array yields no records") {
  CHECK(parse_records("[]", DocumentFormat::kJson, identity_mapping()).empty());
}

TEST_CASE("csv missing the target column is a schema error naming it") {
  std::string text = two_row_csv();
  text.replace(text.find("housing_sales_price"), 19, "price");
  try {
    parse_records(text, DocumentFormat::kCsv, identity_mapping());
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.column() == "housing_sales_price");
  }
}

TEST_CASE("json objects map renamed columns and tolerate missing keys") {
  FieldMapping mapping = identity_mapping();
  mapping.erase("housing_sales_price");
  mapping["sale_price"] = RawField::kHousingSalesPrice;
  const auto recs = parse_records(
      R"([{"sale_price": 300000, "dwelling_type": "SPLIT LEVEL", "ignored": true}, {}])",
      DocumentFormat::kJson, mapping);
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].housing_sales_price == "300000");
  CHECK(recs[0].dwelling_type == "SPLIT LEVEL");
  CHECK(recs[0].year_built.empty());
  CHECK(recs[1] == RawPropertyRecord{});
}

TEST_CASE("malformed documents raise parse errors with a position") {
  CHECK_THROWS_AS(parse_records("[{\"a\": 1", DocumentFormat::kJson, identity_mapping()), ParseError);
  CHECK_THROWS_AS(parse_records("{}", DocumentFormat::kJson, identity_mapping()), ParseError);
  std::string text = std::string(kHeader) + "a,b,c\r\n";
  try {
    parse_records(text, DocumentFormat::kCsv, identity_mapping());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_records(std::string(kHeader) + "\"open,1,2,3,4,5,6,7,8,9\r\n",
                                DocumentFormat::kCsv, identity_mapping()),
                  ParseError);
}

TEST_CASE("record count equals data-row count on well-formed csv") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto rows = static_cast<int>(rng.index(40));
    std::string text = kHeader;
    for (int i = 0; i < rows; ++i) {
      text += "\"A, \"\"quoted\"\" value\",1,2,3,4,5,6,7,8,9\r\n";
      if (rng.uniform() < 0.2) text += "\r\n";
    }
    const auto recs = parse_records(text, DocumentFormat::kCsv, identity_mapping());
    CHECK(recs.size() == static_cast<std::size_t>(rows));
    if (rows) CHECK(recs[0].dwelling_type == "A, \"quoted\" value");
  }
}

TEST_CASE("write_records round-trips through parse_records") {
  std::vector<RawPropertyRecord> raws;
  for (const auto& t : generate_fixture(100, 3, default_coefficient_profile())) raws.push_back(render_record(t));
  raws[0].building_style_description = "HAS, COMMA AND \"QUOTE\"";
  for (DocumentFormat f : {DocumentFormat::kCsv, DocumentFormat::kJson})
    CHECK(parse_records(write_records(raws, f, identity_mapping()), f, identity_mapping()) == raws);
}

TEST_CASE("coercion examples") {
  const TypedPropertyRecord t = coerce_record(valid_raw());
  CHECK(t.housing_sales_price == 259367);
  CHECK(t.year_built == 1950);
  CHECK(t.current_assessment_year == 2020);
  CHECK(t.street_address_type == AddressType::kSingleFamily);
  CHECK(t.dwelling_type == DwellingCategory::kStandardUnit);
  CHECK(t.dwelling_grade == 4);

  RawPropertyRecord bad = valid_raw();
  bad.street_address_type = "XX";
  try {
    coerce_record(bad);
    FAIL("expected CoercionError");
  } catch (const CoercionError& e) {
    REQUIRE(e.field_errors().size() == 1);
    CHECK(e.field_errors()[0].kind == FieldError::Kind::kCategory);
    CHECK(e.field_errors()[0].field == "street_address_type");
  }
}

TEST_CASE("coercion reports every failing field") {
  RawPropertyRecord bad = valid_raw();
  bad.prior_year_sales_price = "";
  bad.year_built = "19x0";
  bad.dwelling_grade = "7";
  bad.size_of_house = "0";
  try {
    coerce_record(bad);
    FAIL("expected CoercionError");
  } catch (const CoercionError& e) {
    std::set<std::string> fields;
    for (const auto& fe : e.field_errors()) fields.insert(fe.field);
    CHECK(fields == std::set<std::string>{"prior_year_sales_price", "year_built", "dwelling_grade",
                                          "size_of_house"});
  }

  RawPropertyRecord future = valid_raw();
  future.year_built = "2021";
  CHECK_THROWS_AS(coerce_record(future), CoercionError);
}

TEST_CASE("every rejected record names at least one field") {
  std::vector<RawPropertyRecord> raws(5, valid_raw());
  raws[1].housing_sales_price = "n/a";
  raws[3].dwelling_type = "CASTLE";
  const CoercionOutcome out = coerce_all(raws);
  CHECK(out.records.size() == 3);
  REQUIRE(out.rejected.size() == 2);
  CHECK(out.rejected[0].index == 1);
  CHECK(out.rejected[1].index == 3);
  for (const auto& r : out.rejected) {
    REQUIRE_FALSE(r.errors.empty());
    for (const auto& e : r.errors) CHECK_FALSE(e.field.empty());
  }
}

TEST_CASE("coerce after render is the identity on typed records") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    TypedPropertyRecord t{};
    t.dwelling_type = kAllDwellings[rng.index(4)];
    t.prior_year_sales_price = static_cast<std::int64_t>(rng.index(5'000'000));
    t.current_assessment_year = 1900 + static_cast<int>(rng.index(200));
    t.year_built = 1700 + static_cast<int>(rng.index(static_cast<std::uint64_t>(t.current_assessment_year - 1700 + 1)));
    t.building_style_code = "S" + std::to_string(rng.index(100));
    t.building_style_description = "STYLE " + std::to_string(rng.index(100));
    t.size_of_house = 1 + static_cast<std::int64_t>(rng.index(10000));
    t.street_address_type = rng.uniform() < 0.5 ? AddressType::kSingleFamily : AddressType::kTownhouse;
    t.housing_sales_price = static_cast<std::int64_t>(rng.index(5'000'000));
    t.dwelling_grade = 1 + static_cast<int>(rng.index(6));
    CHECK(coerce_record(render_record(t)) == t);
  }
}

TEST_CASE("mapping validation") {
  FieldMapping m = identity_mapping();
  CHECK_NOTHROW(validate_mapping(m));
  m.erase("year_built");
  CHECK_THROWS_AS(validate_mapping(m), ConfigError);
}

TEST_CASE("fetch pages through 25 records in three requests") {
  PagedServer srv(25);
  SourceConfig c = srv.config();
  c.page_size = 10;
  const auto recs = fetch_records(c);
  REQUIRE(recs.size() == 25);
  CHECK(recs[0].dwelling_type == "v0");
  CHECK(recs[24].housing_sales_price == "v24");
  REQUIRE(srv.requests.size() == 3);
  CHECK(srv.requests[0].second == 0);
  CHECK(srv.requests[1].second == 10);
  CHECK(srv.requests[2].second == 20);
}

TEST_CASE("fetch stops at max_records") {
  PagedServer srv(25);
  for (std::size_t cap : {5u, 10u, 25u, 40u}) {
    SourceConfig c = srv.config();
    c.page_size = 10;
    c.max_records = cap;
    CHECK(fetch_records(c).size() == std::min<std::size_t>(cap, 25));
  }
}

TEST_CASE("fetch of an unreachable endpoint fails after retry_limit + 1 attempts") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  SourceConfig c;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port);
  c.dataset_id = "x";
  c.retry_limit = 2;
  c.retry_delay = std::chrono::milliseconds(1);
  c.timeout = std::chrono::seconds(2);
  try {
    fetch_records(c);
    FAIL("expected TransportError");
  } catch (const TransportError& e) {
    CHECK(e.attempts() == 3);
    CHECK(e.category() == Error::Category::kIo);
  }
}

TEST_CASE("fetch surfaces non-success status as a source error") {
  PagedServer srv(0);
  try {
    fetch_records(srv.config("broken"));
    FAIL("expected SourceError");
  } catch (const SourceError& e) {
    CHECK(e.status() == 503);
  }
}
