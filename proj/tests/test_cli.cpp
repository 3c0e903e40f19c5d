#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "housereg/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "housereg_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(HOUSEREG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string path(const std::string& name) { return (kWork / name).string(); }

struct Workspace {
  Workspace() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE("fixture, report and fit succeed") {
  Workspace ws;
  REQUIRE(run("fixture --n 400 --seed 3 --out " + path("fx.csv")) == 0);
  REQUIRE(run("fixture --n 400 --seed 3 --out " + path("fx.json")) == 0);
  CHECK(run("report -q --input " + path("fx.csv") + " --out " + path("out") + " --emit csv") == 0);
  CHECK(fs::exists(kWork / "out" / "table5_fit.csv"));
  CHECK_FALSE(fs::exists(kWork / "out" / "table5_fit.md"));
  CHECK(run("report -q --input " + path("fx.json") + " --out " + path("out_json") +
            " --drop-reference --alpha-ridge 0.5 --alpha-lasso 0.002 --folds 5 --test-frac 0.25") == 0);
  CHECK(fs::exists(kWork / "out_json" / "manifest.json"));

  housereg::write_file(kWork / "m.csv",
                       "a,b,housing_sales_price\n"
                       "0.1,1.2,0.5\n-1.0,0.3,-0.9\n0.4,-0.7,0.2\n1.3,0.8,1.4\n-0.2,-1.1,-0.6\n"
                       "0.9,0.1,0.8\n-1.4,0.6,-1.2\n0.6,-0.4,0.3\n-0.5,1.5,-0.1\n1.1,-1.3,0.7\n"
                       "0.2,0.9,0.6\n-0.8,-0.2,-0.8\n0.7,0.4,0.9\n-1.1,-0.6,-1.3\n0.0,0.0,0.1\n");
  CHECK(run("fit -q --input " + path("m.csv") + " --folds 3 --out " + path("fit")) == 0);
  CHECK(fs::exists(kWork / "fit" / "table4_coefficients.csv"));
}

TEST_CASE("input and config problems exit with 1") {
  Workspace ws;
  CHECK(run("report --out " + path("o")) == 1);
  CHECK(run("report --input " + path("absent.csv")) == 1);
  REQUIRE(run("fixture --n 200 --out " + path("fx.csv")) == 0);
  CHECK(run("report -q --input " + path("fx.csv") + " --emit pdf --out " + path("o")) == 1);
  CHECK(run("report -q --input " + path("fx.csv") + " --format xml --out " + path("o")) == 1);
  housereg::write_file(kWork / "bad.json", "{\"source\": 3");
  CHECK(run("report -q --input " + path("fx.csv") + " --config " + path("bad.json") + " --out " +
            path("o")) == 1);
  housereg::write_file(kWork / "noheader.csv", "x,y\n1,2\n");
  CHECK(run("report -q --input " + path("noheader.csv") + " --out " + path("o")) == 1);
  CHECK(run("fixture --n 10 --out " + path("small.csv")) == 2);
  CHECK(run("nonsense") == 1);
}

TEST_CASE("pipeline failures exit with 2") {
  Workspace ws;
  housereg::write_file(kWork / "empty.csv",
                       "dwelling_type,prior_year_sales_price,current_assessment_year,"
                       "building_style_code,building_style_description,year_built,size_of_house,"
                       "street_address_type,housing_sales_price,dwelling_grade\n");
  CHECK(run("report -q --input " + path("empty.csv") + " --out " + path("o")) == 2);
}

TEST_CASE("io failures exit with 3") {
  Workspace ws;
  REQUIRE(run("fixture --n 200 --out " + path("fx.csv")) == 0);
  housereg::write_file(kWork / "blocker", "x");
  CHECK(run("report -q --input " + path("fx.csv") + " --out " + path("blocker/sub")) == 3);
  CHECK(run("fixture --n 200 --out " + path("blocker/fx.csv")) == 3);
}
