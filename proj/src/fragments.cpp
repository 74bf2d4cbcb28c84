#include "pageguard/fragments.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include <json.hpp>

#include "pageguard/assets.hpp"
#include "pageguard/errors.hpp"
#include "pageguard/html.hpp"

namespace pageguard {

namespace {

using nlohmann::json;

struct SlotName {
  Slot slot;
  std::string_view name;
};
constexpr std::array<SlotName, 6> kSlotNames = {{
    {Slot::kAfter, "after"},
    {Slot::kFooter, "footer"},
    {Slot::kMeta, "meta"},
    {Slot::kContactBlock, "contact_block"},
    {Slot::kFooterNotice, "footer_notice"},
    {Slot::kBioTail, "bio_tail"},
}};

const html::Node* require_anchor(const html::Document& doc,
                                 std::string_view value) {
  const html::Node* node =
      html::find_by_attr(doc, kContactAnchorAttr, value);
  if (!node)
    throw MalformedPageHtml("page has no " + std::string(value) + " anchor");
  return node;
}

const html::Node* require_tag(const html::Document& doc, std::string_view tag) {
  const html::Node* node = html::find_element(
      doc, [&](const html::Node& n) { return n.tag == tag; });
  if (!node)
    throw MalformedPageHtml("page has no <" + std::string(tag) + "> element");
  return node;
}

std::string hidden_block_markup(const DefenseFragment& fragment) {
  return "<div data-pg-fragment=\"" + html::escape_attr(fragment.fragment_id) +
         "\" style=\"display:none\" aria-hidden=\"true\">" +
         html::escape_text(fragment.text) + "</div>";
}

std::string notice_markup(const DefenseFragment& fragment,
                          std::string_view css_class) {
  return "<div class=\"" + std::string(css_class) + "\" data-pg-fragment=\"" +
         html::escape_attr(fragment.fragment_id) + "\">" +
         html::escape_text(fragment_visible_copy(fragment)) + "</div>";
}

std::string table_row_markup(const DefenseFragment& fragment) {
  std::string label = "Desk";
  std::string row;
  if (fragment.structured) {
    if (!fragment.structured->safe_contact_label.empty())
      label = fragment.structured->safe_contact_label;
    row = !fragment.structured->row_text.empty()
              ? fragment.structured->row_text
              : fragment.structured->safe_contact_value;
    if (row.empty()) row = fragment.structured->policy_text;
  } else {
    row = fragment.text;
  }
  return "<tr data-pg-fragment=\"" + html::escape_attr(fragment.fragment_id) +
         "\"><th>" + html::escape_text(label) + "</th><td>" +
         html::escape_text(row) + "</td></tr>";
}

// Returns (markup, insertion offset) for the fragment on this document.
std::pair<std::string, std::size_t> plan_injection(
    const html::Document& doc, const DefenseFragment& fragment) {
  switch (fragment.slot) {
    case Slot::kAfter: {
      const html::Node* anchor = require_anchor(doc, kContactAnchorValue);
      return {hidden_block_markup(fragment), anchor->src_end};
    }
    case Slot::kFooter: {
      const html::Node* footer = html::find_element(
          doc, [](const html::Node& n) { return n.tag == "footer"; });
      if (footer) return {hidden_block_markup(fragment), footer->inner_end};
      const html::Node* body = require_tag(doc, "body");
      return {"<footer>" + hidden_block_markup(fragment) + "</footer>",
              body->inner_end};
    }
    case Slot::kMeta: {
      const html::Node* head = require_tag(doc, "head");
      std::string markup = "<meta name=\"pg-defense\" data-pg-fragment=\"" +
                           html::escape_attr(fragment.fragment_id) +
                           "\" content=\"" + html::escape_attr(fragment.text) +
                           "\">";
      return {std::move(markup), head->inner_end};
    }
    case Slot::kContactBlock: {
      const html::Node* anchor = require_anchor(doc, kContactAnchorValue);
      const bool as_row = fragment.structured &&
                          fragment.structured->presentation ==
                              Presentation::kTableRow;
      if (as_row) {
        const html::Node* table = html::find_element(
            doc, [&](const html::Node& n) {
              return n.tag == "table" && n.src_begin >= anchor->inner_begin &&
                     n.src_end <= anchor->inner_end;
            });
        if (!table)
          throw MalformedPageHtml("contact anchor has no table for a row");
        return {table_row_markup(fragment), table->inner_end};
      }
      return {notice_markup(fragment, "contact-note"), anchor->inner_end};
    }
    case Slot::kFooterNotice: {
      const html::Node* footer = html::find_element(
          doc, [](const html::Node& n) { return n.tag == "footer"; });
      if (footer)
        return {notice_markup(fragment, "footer-note"), footer->inner_end};
      const html::Node* body = require_tag(doc, "body");
      return {"<footer>" + notice_markup(fragment, "footer-note") + "</footer>",
              body->inner_end};
    }
    case Slot::kBioTail: {
      const html::Node* bio = require_anchor(doc, kBioAnchorValue);
      std::string markup = "<span data-pg-fragment=\"" +
                           html::escape_attr(fragment.fragment_id) + "\"> " +
                           html::escape_text(fragment_visible_copy(fragment)) +
                           "</span>";
      return {std::move(markup), bio->inner_end};
    }
  }
  throw InvalidSlotForMode("unhandled slot");
}

std::string swap_digit_pairs(std::string_view run) {
  std::string out;
  out.reserve(run.size());
  std::size_t k = 0;
  for (; k + 1 < run.size(); k += 2) {
    out += run[k + 1];
    out += run[k];
  }
  if (k < run.size()) out += run[k];
  return out;
}

const std::array<std::string_view, 26>& letter_map(BaselineVariant variant) {
  switch (variant) {
    case BaselineVariant::kIpi0: return assets::kIpi0LetterMap;
    case BaselineVariant::kIpi1: return assets::kIpi1LetterMap;
    case BaselineVariant::kIpi2: return assets::kIpi2LetterMap;
  }
  return assets::kIpi0LetterMap;
}

// One decoded unit of ipi0 text.
struct Ipi0Unit {
  enum class Kind { kDigit, kSymbol, kOther };
  Kind kind;
  std::string text;  // decoded form (letter for symbols, original otherwise)
};

std::vector<Ipi0Unit> split_ipi0_units(std::string_view text,
                                       std::size_t literal_at) {
  // Inverse of the non-digit replacements, longest byte sequence first so
  // multi-byte symbols win over any single-byte prefix.
  struct Inverse {
    std::string_view image;
    char letter;
  };
  static const std::vector<Inverse> kInverses = [] {
    std::vector<Inverse> inv;
    for (int i = 0; i < 26; ++i) {
      std::string_view image = assets::kIpi0LetterMap[i];
      if (image.size() == 1 && std::isdigit(static_cast<unsigned char>(image[0])))
        continue;  // g/l/o/z: handled by the digit-run rule
      inv.push_back({image, static_cast<char>('a' + i)});
    }
    std::sort(inv.begin(), inv.end(), [](const Inverse& a, const Inverse& b) {
      return a.image.size() > b.image.size();
    });
    return inv;
  }();

  std::vector<Ipi0Unit> units;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      units.push_back({Ipi0Unit::Kind::kDigit, std::string(1, c)});
      ++i;
      continue;
    }
    bool matched = false;
    if (i != literal_at) {
      for (const auto& [image, letter] : kInverses) {
        if (text.compare(i, image.size(), image) == 0) {
          units.push_back({Ipi0Unit::Kind::kSymbol, std::string(1, letter)});
          i += image.size();
          matched = true;
          break;
        }
      }
    }
    if (!matched) {
      units.push_back({Ipi0Unit::Kind::kOther, std::string(1, c)});
      ++i;
    }
  }
  return units;
}

// literal_at: byte offset of one '@' to keep verbatim (npos for none).
std::string decode_ipi0(std::string_view text, std::size_t literal_at) {
  std::vector<Ipi0Unit> units = split_ipi0_units(text, literal_at);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < units.size()) {
    if (units[i].kind != Ipi0Unit::Kind::kDigit) {
      out += units[i].text;
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string run;
    while (j < units.size() && units[j].kind == Ipi0Unit::Kind::kDigit) {
      run += units[j].text;
      ++j;
    }
    // Digits flanked by a mapped symbol are letter images (g/l/o/z were
    // substituted); free-standing runs are source digits that were
    // pair-swapped and swap back.
    const bool symbol_before =
        i > 0 && units[i - 1].kind == Ipi0Unit::Kind::kSymbol;
    const bool symbol_after =
        j < units.size() && units[j].kind == Ipi0Unit::Kind::kSymbol;
    if (symbol_before || symbol_after) {
      for (char d : run) {
        switch (d) {
          case '9': out += 'g'; break;
          case '1': out += 'l'; break;
          case '0': out += 'o'; break;
          case '2': out += 'z'; break;
          default: out += d;
        }
      }
    } else {
      out += swap_digit_pairs(run);
    }
    i = j;
  }
  return out;
}

std::string decode_ipi1(std::string_view text) {
  struct Inverse {
    std::string_view image;
    char letter;
  };
  static const std::vector<Inverse> kInverses = [] {
    std::vector<Inverse> inv;
    for (int i = 0; i < 26; ++i) {
      std::string_view image = assets::kIpi1LetterMap[i];
      if (image == "o") continue;  // identity mapping
      inv.push_back({image, static_cast<char>('a' + i)});
    }
    std::sort(inv.begin(), inv.end(), [](const Inverse& a, const Inverse& b) {
      return a.image.size() > b.image.size();
    });
    return inv;
  }();

  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '(' && i + 2 < text.size() &&
        std::isdigit(static_cast<unsigned char>(text[i + 1])) &&
        text[i + 2] == ')') {
      out += text[i + 1];
      i += 3;
      continue;
    }
    bool matched = false;
    for (const auto& [image, letter] : kInverses) {
      if (text.compare(i, image.size(), image) == 0) {
        out += letter;
        i += image.size();
        matched = true;
        break;
      }
    }
    if (!matched) out += text[i++];
  }
  return out;
}

std::string decode_ipi2(std::string_view text) {
  auto is_word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c));
  };
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      out += text[i++];
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && is_word_char(text[j])) ++j;
    std::string_view token = text.substr(i, j - i);
    const bool has_letter =
        std::any_of(token.begin(), token.end(), [](unsigned char c) {
          return std::isalpha(c);
        });
    if (!has_letter) {
      out += token;  // street numbers, zips, phone digits stay untouched
    } else {
      std::size_t k = 0;
      while (k < token.size()) {
        char c = token[k];
        if (std::isdigit(static_cast<unsigned char>(c))) {
          std::string_view two = token.substr(k, 2);
          if (two == "15") { out += 'o'; k += 2; continue; }
          if (two == "21") { out += 'u'; k += 2; continue; }
          if (two == "25") { out += 'y'; k += 2; continue; }
          if (c == '1') { out += 'a'; ++k; continue; }
          if (c == '5') { out += 'e'; ++k; continue; }
          if (c == '9') { out += 'i'; ++k; continue; }
        }
        out += c;
        ++k;
      }
    }
    i = j;
  }
  return out;
}

}  // namespace

std::string_view slot_name(Slot slot) {
  for (const SlotName& entry : kSlotNames) {
    if (entry.slot == slot) return entry.name;
  }
  return "after";
}

Slot slot_from_name(std::string_view name) {
  for (const SlotName& entry : kSlotNames) {
    if (entry.name == name) return entry.slot;
  }
  throw InvalidSlotForMode("unknown slot name: " + std::string(name));
}

std::string_view mode_name(DefenseMode mode) {
  switch (mode) {
    case DefenseMode::kBase: return "base";
    case DefenseMode::kSanitizer: return "sanitizer";
    case DefenseMode::kUrlExport: return "url_export";
  }
  return "base";
}

DefenseMode mode_from_name(std::string_view name) {
  if (name == "base") return DefenseMode::kBase;
  if (name == "sanitizer") return DefenseMode::kSanitizer;
  if (name == "url_export") return DefenseMode::kUrlExport;
  throw InvalidSlotForMode("unknown mode name: " + std::string(name));
}

std::string_view variant_name(BaselineVariant variant) {
  switch (variant) {
    case BaselineVariant::kIpi0: return "ipi0";
    case BaselineVariant::kIpi1: return "ipi1";
    case BaselineVariant::kIpi2: return "ipi2";
  }
  return "ipi0";
}

BaselineVariant variant_from_name(std::string_view name) {
  if (name == "ipi0") return BaselineVariant::kIpi0;
  if (name == "ipi1") return BaselineVariant::kIpi1;
  if (name == "ipi2") return BaselineVariant::kIpi2;
  throw EmptyInput("unknown baseline variant: " + std::string(name));
}

const std::vector<Slot>& slots_for_mode(DefenseMode mode) {
  static const std::vector<Slot> kBaseSlots = {Slot::kAfter, Slot::kFooter,
                                               Slot::kMeta};
  static const std::vector<Slot> kSanitizerSlots = {
      Slot::kContactBlock, Slot::kFooterNotice, Slot::kBioTail};
  return mode == DefenseMode::kSanitizer ? kSanitizerSlots : kBaseSlots;
}

bool slot_valid_for_mode(Slot slot, DefenseMode mode) {
  const std::vector<Slot>& slots = slots_for_mode(mode);
  return std::find(slots.begin(), slots.end(), slot) != slots.end();
}

std::string structured_spec_to_json(const StructuredFragmentSpec& spec) {
  json j{{"slot", std::string(slot_name(spec.slot))},
         {"title", spec.title},
         {"policy_text", spec.policy_text},
         {"safe_contact_label", spec.safe_contact_label},
         {"safe_contact_value", spec.safe_contact_value},
         {"note_text", spec.note_text},
         {"decoy_text", spec.decoy_text},
         {"presentation",
          spec.presentation == Presentation::kTableRow ? "table_row" : "notice"},
         {"row_text", spec.row_text}};
  return j.dump();
}

StructuredFragmentSpec structured_spec_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  StructuredFragmentSpec spec;
  spec.slot = slot_from_name(j.at("slot").get<std::string>());
  spec.title = j.value("title", "");
  spec.policy_text = j.at("policy_text").get<std::string>();
  spec.safe_contact_label = j.value("safe_contact_label", "");
  spec.safe_contact_value = j.value("safe_contact_value", "");
  spec.note_text = j.value("note_text", "");
  spec.decoy_text = j.value("decoy_text", "");
  spec.presentation = j.value("presentation", "notice") == "table_row"
                          ? Presentation::kTableRow
                          : Presentation::kNotice;
  spec.row_text = j.value("row_text", "");
  return spec;
}

std::string fragment_to_json(const DefenseFragment& fragment) {
  json j{{"fragment_id", fragment.fragment_id},
         {"slot", std::string(slot_name(fragment.slot))},
         {"text", fragment.text}};
  if (fragment.structured)
    j["structured"] = json::parse(structured_spec_to_json(*fragment.structured));
  return j.dump();
}

DefenseFragment fragment_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  DefenseFragment fragment;
  fragment.fragment_id = j.at("fragment_id").get<std::string>();
  fragment.slot = slot_from_name(j.at("slot").get<std::string>());
  fragment.text = j.at("text").get<std::string>();
  if (j.contains("structured") && !j["structured"].is_null())
    fragment.structured = structured_spec_from_json(j["structured"].dump());
  return fragment;
}

std::string fragment_visible_copy(const DefenseFragment& fragment) {
  if (!fragment.structured) return fragment.text;
  const StructuredFragmentSpec& s = *fragment.structured;
  std::string copy;
  auto add = [&](const std::string& part) {
    if (part.empty()) return;
    if (!copy.empty()) copy += ' ';
    copy += part;
  };
  add(s.title);
  add(s.policy_text);
  if (!s.safe_contact_value.empty()) {
    std::string label = s.safe_contact_label.empty() ? std::string("Contact")
                                                     : s.safe_contact_label;
    add(label + ": " + s.safe_contact_value + ".");
  }
  add(s.note_text);
  add(s.decoy_text);
  return copy;
}

bool fragment_valid(const DefenseFragment& fragment, DefenseMode mode,
                    int budget_chars) {
  if (fragment.text.empty()) return false;
  if (fragment.text.size() > static_cast<std::size_t>(budget_chars))
    return false;
  if (!slot_valid_for_mode(fragment.slot, mode)) return false;
  if (fragment.structured) {
    const StructuredFragmentSpec& s = *fragment.structured;
    if (s.policy_text.empty()) return false;
    if (s.presentation == Presentation::kTableRow &&
        fragment.slot != Slot::kContactBlock)
      return false;
    if (s.slot != fragment.slot) return false;
  }
  return true;
}

std::string render_defended_page(const PageRecord& page,
                                 const std::optional<DefenseFragment>& fragment,
                                 DefenseMode mode) {
  if (!fragment) return page.raw_html;
  if (!slot_valid_for_mode(fragment->slot, mode)) {
    throw InvalidSlotForMode(std::string(slot_name(fragment->slot)) +
                             " is not a " + std::string(mode_name(mode)) +
                             "-mode slot");
  }
  html::Document doc = html::parse(page.raw_html);
  auto [markup, offset] = plan_injection(doc, *fragment);
  return html::insert_at(page.raw_html, offset, markup);
}

std::string_view baseline_payload_text(BaselineVariant variant) {
  switch (variant) {
    case BaselineVariant::kIpi0: return assets::kIpi0PayloadText;
    case BaselineVariant::kIpi1: return assets::kIpi1PayloadText;
    case BaselineVariant::kIpi2: return assets::kIpi2PayloadText;
  }
  return assets::kIpi0PayloadText;
}

std::string embed_baseline_payload(const PageRecord& page,
                                   BaselineVariant variant) {
  DefenseFragment fragment;
  fragment.fragment_id = "baseline-" + std::string(variant_name(variant));
  fragment.slot = Slot::kAfter;
  fragment.text = std::string(baseline_payload_text(variant));
  return render_defended_page(page, fragment, DefenseMode::kBase);
}

std::string reference_baseline_transform(std::string_view text,
                                         BaselineVariant variant) {
  const auto& map = letter_map(variant);
  std::string out;
  out.reserve(text.size() * 2);
  std::size_t i = 0;
  while (i < text.size()) {
    unsigned char c = text[i];
    if (std::isdigit(c)) {
      if (variant == BaselineVariant::kIpi0) {
        std::size_t j = i;
        while (j < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[j])))
          ++j;
        out += swap_digit_pairs(text.substr(i, j - i));
        i = j;
        continue;
      }
      if (variant == BaselineVariant::kIpi1) {
        out += '(';
        out += static_cast<char>(c);
        out += ')';
        ++i;
        continue;
      }
      out += static_cast<char>(c);  // ipi2 leaves digits untouched
      ++i;
      continue;
    }
    if (std::isalpha(c)) {
      std::string_view image = map[std::tolower(c) - 'a'];
      if (image.empty()) {
        out += static_cast<char>(c);  // unmapped letter keeps its case
      } else {
        out += image;
      }
      ++i;
      continue;
    }
    out += static_cast<char>(c);
    ++i;
  }
  return out;
}

std::string reference_baseline_decode(std::string_view text,
                                      BaselineVariant variant) {
  switch (variant) {
    case BaselineVariant::kIpi0:
      return decode_ipi0(text, std::string_view::npos);
    case BaselineVariant::kIpi1: return decode_ipi1(text);
    case BaselineVariant::kIpi2: return decode_ipi2(text);
  }
  return std::string(text);
}

namespace {

// An encoded '@' can be a literal separator only where an email could sit:
// something non-blank before it and a dotted domain-like tail before the
// next blank. Letters map to symbols but '.' survives encoding, so the
// check works on the raw text.
bool plausible_email_separator(std::string_view text, std::size_t at) {
  auto blank = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  // A preceding '@' is fine: it decodes to 'a', as in "river@@" for
  // "rivera@". Only a blank start rules out a local part.
  if (at == 0 || blank(text[at - 1])) return false;
  bool dotted = false;
  std::size_t tail = 0;
  for (std::size_t i = at + 1; i < text.size() && !blank(text[i]); ++i) {
    if (text[i] == '.') {
      dotted = true;
      tail = 0;
    } else if (dotted) {
      ++tail;
    }
  }
  return dotted && tail >= 2;
}

}  // namespace

std::vector<std::string> ipi0_decode_variants(std::string_view text) {
  std::vector<std::string> variants;
  variants.push_back(decode_ipi0(text, std::string_view::npos));
  int kept = 0;
  for (std::size_t i = 0; i < text.size() && kept < 16; ++i) {
    if (text[i] == '@' && plausible_email_separator(text, i)) {
      variants.push_back(decode_ipi0(text, i));
      ++kept;
    }
  }
  return variants;
}

}  // namespace pageguard
