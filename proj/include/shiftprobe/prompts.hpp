#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "shiftprobe/cipher.hpp"

namespace shiftprobe {

enum class PromptVariant {
    Standard,
    TextCoT,
    MathCoT,
    NumberCoT,
    HiddenCoT,
    PartiallyHiddenCoT,
    RandomCorrupted,
    MismatchedDemo,
};

// Template family of MismatchedDemo: the rot-k description stays, the
// demonstration is rendered under demo_shift in either the text or the
// arithmetic layout.
enum class DemoDomain { Text, Math };

struct PromptStyle {
    PromptVariant variant = PromptVariant::TextCoT;
    int demo_shift = -1;                     // MismatchedDemo only
    DemoDomain demo_domain = DemoDomain::Text;  // MismatchedDemo only
    std::uint64_t corruption_seed = 0;       // RandomCorrupted only
};

struct PromptInstance {
    PromptStyle style;
    int described_shift = 0;
    std::string encoded_input;   // word, or comma-separated 0-25 sequence
    std::string text;            // full prompt, substitution already applied
    std::string demo_plaintext;  // always "stay" for letter-domain styles
};

// One demonstration step. For MathCoT the full arithmetic line is kept.
struct DemoStep {
    char input;
    char output;
    std::string line;
};

// Render a complete prompt. test_input must already be encoded with shift k
// (letters for letter-domain styles, a comma-separated 0-25 sequence for
// NumberCoT). At k = 13 the output matches the checked-in golden templates
// with the test input substituted in.
PromptInstance render(const PromptStyle& style, ShiftLevel k, std::string_view test_input);

// Demonstration step lines for "stay" under shift k.
// TextCoT: "1. f -> s". MathCoT: "1. f -> (5 - 13) mod 26 = 18 -> s".
std::vector<DemoStep> demo_steps(ShiftLevel k, PromptVariant style);

const char* variant_name(PromptVariant v);
PromptVariant variant_from_name(std::string_view name);

// The response marker the style's prompt asks for ("Original text:" or
// "Original sequence:").
std::string_view final_marker(PromptVariant v);

}  // namespace shiftprobe
