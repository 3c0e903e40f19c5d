#include "housereg/fixture.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "housereg/error.hpp"
#include "housereg/features.hpp"
#include "housereg/random.hpp"
#include "housereg/stats.hpp"

namespace housereg {

namespace {

constexpr int kAssessmentYear = 2020;

// Per stories level: draw weight, prior-year price mean and std (dollars).
struct StoriesLevel {
  StoriesCategory stories;
  const char* code_prefix;
  double weight;
  double price_mean;
  double price_std;
};

constexpr std::array<StoriesLevel, 5> kLevels = {{
    {StoriesCategory::kOne, "S1", 0.12, 259367.0, 74066.0},
    {StoriesCategory::kOneHalf, "S15", 0.07, 290913.0, 84632.0},
    {StoriesCategory::kTwo, "S2", 0.74, 292155.0, 113387.0},
    {StoriesCategory::kTwoHalf, "S25", 0.05, 418183.0, 138682.0},
    {StoriesCategory::kThree, "S3", 0.02, 450586.0, 152499.0},
}};

const std::vector<double> kDwellingWeights = {0.15, 0.12, 0.08, 0.65};
const std::vector<double> kGradeWeights = {0.06, 0.08, 0.30, 0.36, 0.15, 0.05};

constexpr double kBasementRate = 0.7;
constexpr double kSizeCorrelation = 0.8;
constexpr double kAgeCorrelation = -0.5;
constexpr double kMinimumNoiseShare = 0.02 / 0.98;

struct Draw {
  std::size_t level;
  bool basement;
  DwellingCategory dwelling;
  AddressType address;
  int grade;
  double prior_price;
  double size_noise;
  double age_noise;
};

std::vector<double> standardized(const std::vector<double>& v) {
  const double mu = mean(v);
  const double sd = sample_std(v);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = sd > 0 ? (v[i] - mu) / sd : 0.0;
  return out;
}

}  // namespace

CoefficientProfile default_coefficient_profile() {
  CoefficientProfile p;
  p.intercept = 0.015;
  p.coefficients = {
      {"prior_year_sales_price", 1.027}, {"size_of_house", -0.021}, {"has_basement", -0.028},
      {"house_age", 0.036},              {"center_unit", 0.005},    {"end_unit", -0.004},
      {"split_level", -0.018},           {"standard_unit", 0.025},  {"floors_1", -0.001},
      {"floors_1_5", -0.005},            {"floors_2", 0.003},       {"floors_2_5", 0.012},
      {"floors_3", 0.000},               {"single_family", 0.009},  {"grade_2", -0.010},
      {"grade_3", 0.025},                {"grade_4", -0.007},       {"grade_5", 0.001},
      {"grade_6", 0.000},
  };
  return p;
}

CoefficientProfile zero_coefficient_profile() {
  CoefficientProfile p;
  for (const auto& name : feature_column_names()) p.coefficients[name] = 0.0;
  return p;
}

CoefficientProfile parse_coefficient_profile(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficient profile: ") + e.what());
  }
  CoefficientProfile p = zero_coefficient_profile();
  try {
    p.intercept = doc.value("intercept", 0.0);
    if (doc.contains("coefficients")) {
      for (const auto& [name, value] : doc.at("coefficients").items()) {
        if (!p.coefficients.contains(name))
          throw ConfigError("coefficient profile names unknown column '" + name + "'");
        p.coefficients[name] = value.get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("coefficient profile: ") + e.what());
  }
  return p;
}

std::vector<TypedPropertyRecord> generate_fixture(std::size_t n, std::uint64_t seed,
                                                  const CoefficientProfile& profile) {
  if (n < 100) throw DomainError("fixture needs at least 100 records");
  for (const auto& [name, value] : profile.coefficients) {
    (void)value;
    if (std::find(feature_column_names().begin(), feature_column_names().end(), name) ==
        feature_column_names().end())
      throw DomainError("profile names unknown column '" + name + "'");
  }

  Rng rng(seed);
  std::vector<double> level_weights;
  for (const auto& l : kLevels) level_weights.push_back(l.weight);

  std::vector<Draw> draws(n);
  for (auto& d : draws) {
    d.level = rng.categorical(level_weights);
    d.basement = rng.uniform() < kBasementRate;
    d.dwelling = kAllDwellings[rng.categorical(kDwellingWeights)];
    const bool attached =
        d.dwelling == DwellingCategory::kCenterUnit || d.dwelling == DwellingCategory::kEndUnit;
    d.address = rng.uniform() < (attached ? 0.85 : 0.05) ? AddressType::kTownhouse
                                                         : AddressType::kSingleFamily;
    d.grade = static_cast<int>(rng.categorical(kGradeWeights)) + 1;

    const auto& level = kLevels[d.level];
    const double cv2 = (level.price_std / level.price_mean) * (level.price_std / level.price_mean);
    const double sigma = std::sqrt(std::log1p(cv2));
    const double mu = std::log(level.price_mean) - 0.5 * sigma * sigma;
    d.prior_price = std::max(1000.0, std::round(std::exp(mu + sigma * rng.normal())));
    d.size_noise = rng.normal();
    d.age_noise = rng.normal();
  }

  std::vector<double> prior(n);
  for (std::size_t i = 0; i < n; ++i) prior[i] = draws[i].prior_price;
  const std::vector<double> z_prior = standardized(prior);

  std::vector<TypedPropertyRecord> records(n);
  std::vector<double> size(n), age(n);
  const double size_resid = std::sqrt(1.0 - kSizeCorrelation * kSizeCorrelation);
  const double age_resid = std::sqrt(1.0 - kAgeCorrelation * kAgeCorrelation);
  for (std::size_t i = 0; i < n; ++i) {
    const Draw& d = draws[i];
    size[i] = std::max(400.0, std::round(1650.0 + 500.0 * (kSizeCorrelation * z_prior[i] +
                                                             size_resid * d.size_noise)));
    age[i] = std::clamp(std::round(55.0 + 22.0 * (kAgeCorrelation * z_prior[i] +
                                                   age_resid * d.age_noise)),
                        0.0, 200.0);

    const StyleInfo style{d.basement, kLevels[d.level].stories};
    TypedPropertyRecord& r = records[i];
    r.dwelling_type = d.dwelling;
    r.prior_year_sales_price = static_cast<std::int64_t>(d.prior_price);
    r.current_assessment_year = kAssessmentYear;
    r.building_style_code = std::string(kLevels[d.level].code_prefix) + (d.basement ? "B" : "N");
    r.building_style_description = style_description(style);
    r.year_built = kAssessmentYear - static_cast<int>(age[i]);
    r.size_of_house = static_cast<std::int64_t>(size[i]);
    r.street_address_type = d.address;
    r.housing_sales_price = 0;
    r.dwelling_grade = d.grade;
  }

  // Signal in standardized units, computed on the encoded values so the
  // profile holds exactly for the columns the pipeline builds.
  const FeatureMatrix m = encode_features(records, default_style_vocabulary());
  std::map<std::string, std::vector<double>> numeric;
  numeric["prior_year_sales_price"] = z_prior;
  numeric["size_of_house"] = standardized(size);
  numeric["house_age"] = standardized(age);

  std::vector<double> signal(n, profile.intercept);
  for (Eigen::Index j = 0; j < m.p(); ++j) {
    const auto& name = m.column_names[static_cast<std::size_t>(j)];
    auto coef = profile.coefficients.find(name);
    if (coef == profile.coefficients.end() || coef->second == 0.0) continue;
    auto num = numeric.find(name);
    for (std::size_t i = 0; i < n; ++i) {
      const double value = num != numeric.end() ? num->second[i] : m.x(static_cast<Eigen::Index>(i), j);
      signal[i] += coef->second * value;
    }
  }

  const double signal_sd = sample_std(signal);
  const double signal_var = signal_sd * signal_sd;
  const double noise_var = std::max(1.0 - signal_var, kMinimumNoiseShare * signal_var);
  const double noise_sd = std::sqrt(noise_var);

  const double price_mean = mean(prior);
  const double price_sd = sample_std(prior);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = signal[i] + noise_sd * rng.normal();
    records[i].housing_sales_price =
        static_cast<std::int64_t>(std::max(1000.0, std::round(price_mean + price_sd * z)));
  }
  return records;
}

}  // namespace housereg
