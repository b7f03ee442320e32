#include "shiftprobe/prompts.hpp"

#include <algorithm>

#include "shiftprobe/errors.hpp"
#include "shiftprobe/rng.hpp"

namespace shiftprobe {

namespace {

const std::string kDemoWord = "stay";

std::string num(int v) { return std::to_string(v); }

// "Rot-13 is a cipher in which each letter is shifted 13 positions forward
// in the alphabet."
std::string description(int k) {
    return "Rot-" + num(k) + " is a cipher in which each letter is shifted " + num(k) +
           " positions forward in the alphabet.";
}

// Demonstration header used by every CoT style: announces the encoded demo.
std::string demo_intro(int k, const std::string& enc) {
    return " For example, here is a message written in rot-" + num(k) + ":\nRot-" + num(k) +
           " text: \"" + enc + "\"\n\n";
}

std::string quoted(std::string_view s) {
    return "\"" + std::string(s) + "\"";
}

// Shared instruction tail for letter-domain CoT styles.
std::string letter_tail(int k, std::string_view test_input) {
    return "\n\nHere is another message in rot-" + num(k) +
           ". Decode this message one letter at a time. On the last line, write the words "
           "\"Original text:\" followed by the decoded message:\nRot-" +
           num(k) + " text: " + quoted(test_input);
}

void check_letter_input(std::string_view input) {
    if (input.empty()) throw InputDomainMismatch("test input is empty");
    for (char c : input) {
        if (c < 'a' || c > 'z') {
            throw InputDomainMismatch("letter-domain style given non-letter test input: " +
                                      std::string(input));
        }
    }
}

void check_number_input(std::string_view input) {
    if (input.empty()) throw InputDomainMismatch("test input is empty");
    bool has_digit = false;
    for (char c : input) {
        if (c >= '0' && c <= '9') {
            has_digit = true;
        } else if (c != ',') {
            throw InputDomainMismatch("NumberCoT requires a comma-separated number sequence, got: " +
                                      std::string(input));
        }
    }
    if (!has_digit) throw InputDomainMismatch("NumberCoT input has no numbers");
}

std::string text_steps(const std::string& enc, const std::string& out) {
    std::string s;
    for (std::size_t i = 0; i < enc.size(); ++i) {
        s += num(static_cast<int>(i) + 1) + ". " + enc[i] + " -> " + out[i] + "\n";
    }
    return s;
}

// "1. f -> (5 - 13) mod 26 = 18 -> s" with arithmetic_shift in the formula.
std::string math_steps(const std::string& enc, const std::string& out, int arithmetic_shift) {
    std::string s;
    for (std::size_t i = 0; i < enc.size(); ++i) {
        s += num(static_cast<int>(i) + 1) + ". " + enc[i] + " -> (" + num(letter_pos(enc[i])) +
             " - " + num(arithmetic_shift) + ") mod 26 = " + num(letter_pos(out[i])) + " -> " +
             out[i] + "\n";
    }
    return s;
}

std::string position_letter_mapping() {
    std::string s;
    for (int p = 0; p < 26; ++p) {
        s += pos_letter(p);
        s += " -> " + num(p) + "\n";
    }
    return s;
}

std::string render_standard(int k, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string t = description(k);
    t += " For example, here is a message written in rot-" + num(k) +
         " along with the original text that it was created from:\n";
    t += "Rot-" + num(k) + " text: " + quoted(enc) + "\n";
    t += "Original text: " + quoted(kDemoWord) + "\n\n";
    t += "Decode this message to produce the original text:\n\n";
    t += "Rot-" + num(k) + " text: " + quoted(input);
    return t;
}

std::string render_text_cot(int k, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string t = description(k) + demo_intro(k, enc);
    t += "To decode this message, we shift each letter " + num(k) + " positions backward:\n";
    t += text_steps(enc, kDemoWord);
    t += "Therefore, the original text is: " + quoted(kDemoWord);
    t += letter_tail(k, input);
    return t;
}

std::string render_math_cot(int k, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string t = description(k) + demo_intro(k, enc);
    t += "To decode this message, we need to shift each letter " + num(k) +
         " positions backward. Let's start by writing the position-letter mapping for the "
         "alphabet:\n\n";
    t += position_letter_mapping();
    t += "\nNext, we find the encoded letter as follows:\n";
    t += "Position of original letter = (Position of given letter - " + num(k) + ") mod 26\n\n";
    t += "Then map the found position to the corresponding letter using the letter-position "
         "mapping.\n\n";
    t += "Using this,\n";
    t += math_steps(enc, kDemoWord, k);
    t += "Therefore, the original text is: " + quoted(kDemoWord);
    t += letter_tail(k, input);
    return t;
}

std::string render_number_cot(int k, std::string_view input) {
    // The demonstration mirrors the letter styles: the decoded sequence is
    // "stay" as positions (18,19,0,24), the encoded one is its shift by k.
    int plain[4];
    int enc[4];
    for (int i = 0; i < 4; ++i) {
        plain[i] = letter_pos(kDemoWord[static_cast<std::size_t>(i)]);
        enc[i] = (plain[i] + k) % 26;
    }
    auto join = [](const int* v) {
        return num(v[0]) + "," + num(v[1]) + "," + num(v[2]) + "," + num(v[3]);
    };

    std::string t = "Shift-" + num(k) + " is a process in which each number is shifted " + num(k) +
                    " positions forward until it reaches 26 and subsequently circles back to 1."
                    " For example, here is a sequence of numbers written in shift-" +
                    num(k) + ":\n";
    t += "shift-" + num(k) + " sequence: " + quoted(join(enc)) + "\n\n";
    t += "To decode this sequence, we need to shift each number " + num(k) +
         " positions backward.\n";
    t += "New position = (Given position - " + num(k) + ") mod 26\n\n";
    t += "Using this,\n";
    for (int i = 0; i < 4; ++i) {
        t += num(i + 1) + ". " + num(enc[i]) + " -> (" + num(enc[i]) + " - " + num(k) +
             ") mod 26 -> " + num(plain[i]) + "\n";
    }
    t += "\nTherefore, the original sequence of numbers is: " + quoted(join(plain));
    t += "\n\nHere is another sequence of numbers in shift-" + num(k) +
         ". Decode this sequence one number at a time. On the last line, write the words "
         "\"Original sequence:\" followed by the decoded sequence:\nshift-" +
         num(k) + " sequence: " + quoted(input);
    return t;
}

std::string starred_steps(const std::string& enc) {
    std::string s;
    for (std::size_t i = 0; i < enc.size(); ++i) {
        s += num(static_cast<int>(i) + 1) + ". " + enc[i] + " -> *\n";
    }
    return s;
}

std::string render_hidden(int k, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string t = description(k) + demo_intro(k, enc);
    t += "To decode this message, we shift each letter " + num(k) +
         " positions backward; but instead of revealing what each letter becomes, we will "
         "replace it with a '*' until we write the final answer:\n";
    t += starred_steps(enc);
    t += "If we put together the letters that were hidden behind each '*', we get that the "
         "original text is: " +
         quoted(kDemoWord) + ".";
    t += letter_tail(k, input);
    return t;
}

std::string render_partially_hidden(int k, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string t = description(k) + demo_intro(k, enc);
    t += "To decode this message, we shift each letter " + num(k) + " positions backward:\n";
    t += text_steps(enc, kDemoWord);
    t += "\nBut, in order to preserve secrecy, we will ask you to write your answer in a "
         "slightly different way: Instead of revealing what each letter becomes, we will "
         "replace it with a '*' until we write the final answer. Using this format, the "
         "reasoning shown above becomes:\n";
    t += starred_steps(enc);
    t += "\nTherefore, the original text is: " + quoted(kDemoWord);
    t += "\n\nHere is another message in rot-" + num(k) +
         ". Decode this message one letter at a time. As you produce each '*', we want you to "
         "still think about the correct letter that should go in the place of the star - just "
         "don't write it down. On the last line, write the words \"Original text:\" followed by "
         "the decoded message:\nRot-" +
         num(k) + " text: " + quoted(input);
    return t;
}

std::string render_random_corrupted(int k, std::uint64_t seed, std::string_view input) {
    std::string enc = encode(kDemoWord, ShiftLevel(k));
    std::string corrupted(kDemoWord.size(), '?');
    Rng rng(seed);
    for (char& c : corrupted) c = static_cast<char>('a' + rng.next_below(26));

    std::string t = description(k) + demo_intro(k, enc);
    t += "To decode this message, we shift each letter " + num(k) + " positions backward:\n";
    t += text_steps(enc, corrupted);
    t += "Therefore, the original text is: " + quoted(kDemoWord);
    t += letter_tail(k, input);
    return t;
}

std::string render_mismatched(int k, const PromptStyle& style, std::string_view input) {
    if (style.demo_shift < 0 || style.demo_shift > 25) {
        throw InvalidMismatch("MismatchedDemo requires a demo_shift in [0,25]");
    }
    if (style.demo_shift == k) {
        throw InvalidMismatch("MismatchedDemo demo_shift must differ from the described shift");
    }
    std::string enc = encode(kDemoWord, ShiftLevel(style.demo_shift));
    std::string t = description(k) + demo_intro(k, enc);
    if (style.demo_domain == DemoDomain::Text) {
        t += "To decode this message, we shift each letter " + num(k) + " positions backward:\n";
        t += text_steps(enc, kDemoWord);
        t += "Therefore, the original text is: " + quoted(kDemoWord);
    } else {
        // Math layout: narration and formula keep the described shift, the
        // demonstrated arithmetic uses demo_shift.
        t += "To decode this message, we need to shift each letter " + num(k) +
             " positions backward. Let's start by writing the position-letter mapping for the "
             "alphabet:\n\n";
        t += position_letter_mapping();
        t += "\nNext, we find the encoded letter as follows:\n";
        t += "Position of original letter = (Position of given letter - " + num(k) +
             ") mod 26\n\n";
        t += "Then map the found position to the corresponding letter using the letter-position "
             "mapping.\n\n";
        t += "Using this,\n";
        t += math_steps(enc, kDemoWord, style.demo_shift);
        t += "Therefore, the original text is: " + quoted(kDemoWord);
    }
    t += letter_tail(k, input);
    return t;
}

}  // namespace

PromptInstance render(const PromptStyle& style, ShiftLevel k, std::string_view test_input) {
    if (style.variant == PromptVariant::NumberCoT) {
        check_number_input(test_input);
    } else {
        check_letter_input(test_input);
    }

    PromptInstance inst;
    inst.style = style;
    inst.described_shift = k.value();
    inst.encoded_input.assign(test_input);
    inst.demo_plaintext = style.variant == PromptVariant::NumberCoT ? "" : kDemoWord;

    switch (style.variant) {
        case PromptVariant::Standard:
            inst.text = render_standard(k.value(), test_input);
            break;
        case PromptVariant::TextCoT:
            inst.text = render_text_cot(k.value(), test_input);
            break;
        case PromptVariant::MathCoT:
            inst.text = render_math_cot(k.value(), test_input);
            break;
        case PromptVariant::NumberCoT:
            inst.text = render_number_cot(k.value(), test_input);
            break;
        case PromptVariant::HiddenCoT:
            inst.text = render_hidden(k.value(), test_input);
            break;
        case PromptVariant::PartiallyHiddenCoT:
            inst.text = render_partially_hidden(k.value(), test_input);
            break;
        case PromptVariant::RandomCorrupted:
            inst.text = render_random_corrupted(k.value(), style.corruption_seed, test_input);
            break;
        case PromptVariant::MismatchedDemo:
            inst.text = render_mismatched(k.value(), style, test_input);
            break;
    }
    return inst;
}

std::vector<DemoStep> demo_steps(ShiftLevel k, PromptVariant style) {
    std::string enc = encode(kDemoWord, k);
    std::vector<DemoStep> steps;
    steps.reserve(kDemoWord.size());
    for (std::size_t i = 0; i < kDemoWord.size(); ++i) {
        DemoStep s;
        s.input = enc[i];
        s.output = kDemoWord[i];
        if (style == PromptVariant::MathCoT) {
            s.line = std::to_string(i + 1) + ". " + s.input + " -> (" +
                     std::to_string(letter_pos(s.input)) + " - " + std::to_string(k.value()) +
                     ") mod 26 = " + std::to_string(letter_pos(s.output)) + " -> " + s.output;
        } else {
            s.line = std::to_string(i + 1) + ". " + s.input + " -> " + s.output;
        }
        steps.push_back(std::move(s));
    }
    return steps;
}

const char* variant_name(PromptVariant v) {
    switch (v) {
        case PromptVariant::Standard: return "standard";
        case PromptVariant::TextCoT: return "text-cot";
        case PromptVariant::MathCoT: return "math-cot";
        case PromptVariant::NumberCoT: return "number-cot";
        case PromptVariant::HiddenCoT: return "hidden";
        case PromptVariant::PartiallyHiddenCoT: return "partially-hidden";
        case PromptVariant::RandomCorrupted: return "random-corrupted";
        case PromptVariant::MismatchedDemo: return "mismatched";
    }
    return "unknown";
}

PromptVariant variant_from_name(std::string_view name) {
    if (name == "standard") return PromptVariant::Standard;
    if (name == "text-cot") return PromptVariant::TextCoT;
    if (name == "math-cot") return PromptVariant::MathCoT;
    if (name == "number-cot") return PromptVariant::NumberCoT;
    if (name == "hidden") return PromptVariant::HiddenCoT;
    if (name == "partially-hidden") return PromptVariant::PartiallyHiddenCoT;
    if (name == "random-corrupted") return PromptVariant::RandomCorrupted;
    if (name == "mismatched") return PromptVariant::MismatchedDemo;
    throw Error("unknown prompt style: " + std::string(name));
}

std::string_view final_marker(PromptVariant v) {
    return v == PromptVariant::NumberCoT ? "Original sequence:" : "Original text:";
}

}  // namespace shiftprobe
