#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace housereg {

enum class AddressType { kSingleFamily, kTownhouse };

enum class StoriesCategory { kOne, kOneHalf, kTwo, kTwoHalf, kThree };

enum class DwellingCategory { kCenterUnit, kEndUnit, kSplitLevel, kStandardUnit };

inline constexpr std::array<StoriesCategory, 5> kAllStories = {
    StoriesCategory::kOne, StoriesCategory::kOneHalf, StoriesCategory::kTwo,
    StoriesCategory::kTwoHalf, StoriesCategory::kThree};

inline constexpr std::array<DwellingCategory, 4> kAllDwellings = {
    DwellingCategory::kCenterUnit, DwellingCategory::kEndUnit,
    DwellingCategory::kSplitLevel, DwellingCategory::kStandardUnit};

// Canonical text: "SF"/"TH", "1", "1 1/2", ..., "CENTER UNIT", ...
std::string_view to_string(AddressType t);
std::string_view to_string(StoriesCategory s);
std::string_view to_string(DwellingCategory d);

// Case-insensitive, whitespace tolerant.
std::optional<AddressType> parse_address_type(std::string_view text);
std::optional<StoriesCategory> parse_stories(std::string_view text);
std::optional<DwellingCategory> parse_dwelling(std::string_view text);

inline int index_of(StoriesCategory s) { return static_cast<int>(s); }
inline int index_of(DwellingCategory d) { return static_cast<int>(d); }

}  // namespace housereg
