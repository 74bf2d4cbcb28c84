#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pageguard/corpus.hpp"

namespace pageguard {

enum class Slot {
  // Base / url_export slot set.
  kAfter,
  kFooter,
  kMeta,
  // Sanitizer slot set.
  kContactBlock,
  kFooterNotice,
  kBioTail,
};

enum class DefenseMode { kBase, kSanitizer, kUrlExport };

enum class BaselineVariant { kIpi0, kIpi1, kIpi2 };

enum class Presentation { kNotice, kTableRow };

std::string_view slot_name(Slot slot);
Slot slot_from_name(std::string_view name);
std::string_view mode_name(DefenseMode mode);
DefenseMode mode_from_name(std::string_view name);
std::string_view variant_name(BaselineVariant variant);
BaselineVariant variant_from_name(std::string_view name);

const std::vector<Slot>& slots_for_mode(DefenseMode mode);
bool slot_valid_for_mode(Slot slot, DefenseMode mode);

// Visible publisher copy emitted when a sanitizer-mode fragment renders.
struct StructuredFragmentSpec {
  Slot slot = Slot::kContactBlock;
  std::string title;
  std::string policy_text;  // required
  std::string safe_contact_label;
  std::string safe_contact_value;
  std::string note_text;
  std::string decoy_text;
  Presentation presentation = Presentation::kNotice;
  std::string row_text;
};

struct DefenseFragment {
  std::string fragment_id;
  Slot slot = Slot::kAfter;
  std::string text;  // instruction z; serialized spec when structured is set
  std::optional<StructuredFragmentSpec> structured;
};

// JSON pool-entry form: {fragment_id, slot, text, structured?}.
std::string fragment_to_json(const DefenseFragment& fragment);
DefenseFragment fragment_from_json(const std::string& json_text);
std::string structured_spec_to_json(const StructuredFragmentSpec& spec);
StructuredFragmentSpec structured_spec_from_json(const std::string& json_text);

// The copy a reader would see (plain text for base fragments; assembled
// notice/row text for structured ones).
std::string fragment_visible_copy(const DefenseFragment& fragment);

bool fragment_valid(const DefenseFragment& fragment, DefenseMode mode,
                    int budget_chars);

// G(x, θ): splice the fragment's markup into the page at its slot. Absent
// fragment returns raw_html unchanged, byte for byte.
std::string render_defended_page(const PageRecord& page,
                                 const std::optional<DefenseFragment>& fragment,
                                 DefenseMode mode);

// Substitution baselines: the published payload hidden at the "after" slot.
std::string embed_baseline_payload(const PageRecord& page,
                                   BaselineVariant variant);
std::string_view baseline_payload_text(BaselineVariant variant);

// Oracle for a perfectly compliant model following the payload, plus its
// inverse; both used only by tests and the mock judge.
std::string reference_baseline_transform(std::string_view text,
                                         BaselineVariant variant);
std::string reference_baseline_decode(std::string_view text,
                                      BaselineVariant variant);

// ipi0 maps 'a' to '@', so a decoded email loses its separator. These
// variants keep one original '@' literal at a time — only where a dotted
// domain-like tail follows, so 'a's outside email tokens cost nothing —
// and index 0 is always the plain full decode.
std::vector<std::string> ipi0_decode_variants(std::string_view text);

}  // namespace pageguard
