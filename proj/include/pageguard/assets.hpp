#pragma once

#include <array>
#include <string_view>

namespace pageguard::assets {

// Bumped whenever any shipped text below changes; recorded in checkpoints so
// stale pools are detectable.
inline constexpr int kAssetVersion = 1;

// Hand-authored seed instruction texts for the initial candidate pool.
// They span five archetypes (privacy notice, redaction directive,
// safe-contact redirect, refusal, publisher policy), four texts each.
extern const std::array<std::string_view, 20> kSeedFragmentTexts;

// Sanitizer prompt families, one full prompt per family.
extern const std::string_view kFilterPromptCanonical;
extern const std::string_view kFilterPromptReaderPreserving;
extern const std::string_view kFilterPromptStructureFirst;
extern const std::string_view kFilterPromptOrdinarySecurity;

// Substitution-baseline payloads (published instruction text for each
// variant) and their exact character maps.
extern const std::string_view kIpi0PayloadText;
extern const std::string_view kIpi1PayloadText;
extern const std::string_view kIpi2PayloadText;

// Letter maps: entry i is the replacement string for letter 'a' + i.
// An empty entry means the letter is left unchanged by the variant.
extern const std::array<std::string_view, 26> kIpi0LetterMap;
extern const std::array<std::string_view, 26> kIpi1LetterMap;
extern const std::array<std::string_view, 26> kIpi2LetterMap;

// Prompt material for the live mutator role.
extern const std::string_view kTextMutatorSystemPrompt;
extern const std::string_view kFragmentMutatorSystemPrompt;

// Word pools for the corpus synthesizer. Words never consist solely of the
// letters {g,l,o,z}: those encode to bare digit runs under the ipi0 map,
// which the decoding judge would then misread as swapped source digits.
extern const std::array<std::string_view, 22> kGivenNames;
extern const std::array<std::string_view, 20> kFamilyNames;
extern const std::array<std::string_view, 12> kStreetNames;
extern const std::array<std::string_view, 8> kStreetSuffixes;
extern const std::array<std::string_view, 14> kCityNames;
extern const std::array<std::string_view, 10> kStateCodes;
extern const std::array<std::string_view, 16> kTopicNouns;
extern const std::array<std::string_view, 12> kTopicVerbs;
extern const std::array<std::string_view, 12> kTopicObjects;

}  // namespace pageguard::assets
