#include "housereg/categories.hpp"

#include <cctype>

namespace housereg {

namespace {

// Uppercase, collapse runs of whitespace/underscores/hyphens to one space.
std::string normalize(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || c == '_' || c == '-') {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::toupper(uc)));
  }
  return out;
}

}  // namespace

std::string_view to_string(AddressType t) {
  return t == AddressType::kSingleFamily ? "SF" : "TH";
}

std::string_view to_string(StoriesCategory s) {
  switch (s) {
    case StoriesCategory::kOne: return "1";
    case StoriesCategory::kOneHalf: return "1 1/2";
    case StoriesCategory::kTwo: return "2";
    case StoriesCategory::kTwoHalf: return "2 1/2";
    case StoriesCategory::kThree: return "3";
  }
  return "?";
}

std::string_view to_string(DwellingCategory d) {
  switch (d) {
    case DwellingCategory::kCenterUnit: return "CENTER UNIT";
    case DwellingCategory::kEndUnit: return "END UNIT";
    case DwellingCategory::kSplitLevel: return "SPLIT LEVEL";
    case DwellingCategory::kStandardUnit: return "STANDARD UNIT";
  }
  return "?";
}

std::optional<AddressType> parse_address_type(std::string_view text) {
  const std::string n = normalize(text);
  if (n == "SF") return AddressType::kSingleFamily;
  if (n == "TH") return AddressType::kTownhouse;
  return std::nullopt;
}

std::optional<StoriesCategory> parse_stories(std::string_view text) {
  const std::string n = normalize(text);
  for (StoriesCategory s : kAllStories)
    if (n == to_string(s)) return s;
  if (n == "1.5") return StoriesCategory::kOneHalf;
  if (n == "2.5") return StoriesCategory::kTwoHalf;
  return std::nullopt;
}

std::optional<DwellingCategory> parse_dwelling(std::string_view text) {
  std::string n = normalize(text);
  for (DwellingCategory d : kAllDwellings) {
    const std::string_view canonical = to_string(d);
    if (n == canonical) return d;
    // Accept the compact form ("CENTERUNIT") too.
    std::string compact;
    for (char c : canonical)
      if (c != ' ') compact.push_back(c);
    if (n == compact) return d;
  }
  return std::nullopt;
}

}  // namespace housereg
