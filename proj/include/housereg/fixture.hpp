#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "housereg/ingest.hpp"

namespace housereg {

/// Target model in standardized units: numeric features enter standardized,
/// indicator columns enter as 0/1. Keys are feature_column_names().
struct CoefficientProfile {
  double intercept = 0.0;
  std::map<std::string, double> coefficients;
};

/// Reference linear-model coefficients for suburban assessment data.
CoefficientProfile default_coefficient_profile();

/// Every coefficient and the intercept zero (pure-noise target).
CoefficientProfile zero_coefficient_profile();

/// Parses {"intercept": x, "coefficients": {"name": x, ...}}. Unknown names
/// raise ConfigError; missing names default to 0.
CoefficientProfile parse_coefficient_profile(const std::string& json_text);

/// Synthesizes n >= 100 assessment records.
///
/// Stories levels are drawn with weights 0.12/0.07/0.74/0.05/0.02 (two-story
/// dominant). Prior-year prices are lognormal per stories level with the
/// level's reference mean and standard deviation. Size of house correlates
/// +0.8 and house age -0.5 with the standardized prior price. The
/// standardized target is the profile's linear combination plus Gaussian
/// noise whose variance brings the target variance to 1, then mapped to
/// dollars on the prior-price scale.
std::vector<TypedPropertyRecord> generate_fixture(std::size_t n, std::uint64_t seed,
                                                  const CoefficientProfile& profile);

}  // namespace housereg
