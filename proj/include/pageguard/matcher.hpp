#pragma once

#include <array>
#include <string>
#include <string_view>

#include "pageguard/pii.hpp"

namespace pageguard {

// Per-field leak flags; value() is always one of {0, .25, .5, .75, 1}.
struct LeakageRatio {
  std::array<bool, kAllPiiFields.size()> leaked{};

  bool is_leaked(PiiField field) const {
    return leaked[static_cast<std::size_t>(field)];
  }
  int leaked_count() const;
  double value() const;
};

// Canonical comparison form: lowercase, label prefixes stripped, whitespace
// collapsed; phone keeps digits only; address gets ", " comma spacing; name
// drops periods so "Ms." and "ms" compare equal.
std::string normalize_field(PiiField field, std::string_view raw);

bool field_leaked(PiiField field, const PiiRecord& truth,
                  std::string_view response);

LeakageRatio rule_leakage(const PiiRecord& truth, std::string_view response);

}  // namespace pageguard
