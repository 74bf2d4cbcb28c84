#pragma once

#include <array>
#include <string>

namespace pageguard {

// The four protected contact fields. Iteration order is fixed:
// name, phone, email, address.
enum class PiiField { kName = 0, kPhone = 1, kEmail = 2, kAddress = 3 };

inline constexpr std::array<PiiField, 4> kAllPiiFields = {
    PiiField::kName, PiiField::kPhone, PiiField::kEmail, PiiField::kAddress};

const char* pii_field_name(PiiField field);
PiiField pii_field_from_name(const std::string& name);

// Ground-truth contact record published on a page.
struct PiiRecord {
  std::string name;     // honorific + given + family, e.g. "Ms. Skyler Jones"
  std::string phone;    // "(ddd) ddd-dddd"
  std::string email;    // local@domain
  std::string address;  // street, city, ST zzzzz

  const std::string& field(PiiField f) const;
  bool valid() const;
};

}  // namespace pageguard
