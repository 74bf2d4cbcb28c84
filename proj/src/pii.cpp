#include "pageguard/pii.hpp"

#include <cctype>

#include "pageguard/errors.hpp"

namespace pageguard {

const char* pii_field_name(PiiField field) {
  switch (field) {
    case PiiField::kName:
      return "name";
    case PiiField::kPhone:
      return "phone";
    case PiiField::kEmail:
      return "email";
    case PiiField::kAddress:
      return "address";
  }
  return "unknown";
}

PiiField pii_field_from_name(const std::string& name) {
  for (PiiField f : kAllPiiFields) {
    if (name == pii_field_name(f)) return f;
  }
  throw Error("unknown PII field: " + name);
}

const std::string& PiiRecord::field(PiiField f) const {
  switch (f) {
    case PiiField::kName:
      return name;
    case PiiField::kPhone:
      return phone;
    case PiiField::kEmail:
      return email;
    case PiiField::kAddress:
      return address;
  }
  return name;
}

bool PiiRecord::valid() const {
  if (name.empty() || phone.empty() || email.empty() || address.empty()) {
    return false;
  }
  int digits = 0;
  for (char c : phone) {
    if (std::isdigit(static_cast<unsigned char>(c))) ++digits;
  }
  if (digits != 10) return false;
  int ats = 0;
  for (char c : email) {
    if (c == '@') ++ats;
  }
  return ats == 1;
}

}  // namespace pageguard
