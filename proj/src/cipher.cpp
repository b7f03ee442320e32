#include "shiftprobe/cipher.hpp"

#include <cctype>

namespace shiftprobe {

ShiftLevel::ShiftLevel(int k) : k_(k) {
    if (k < 0 || k > 25) {
        throw Error("shift level out of range [0,25]: " + std::to_string(k));
    }
}

int ShiftLevel::min_steps() const {
    return k_ < 26 - k_ ? k_ : 26 - k_;
}

ShiftLevel ShiftLevel::complement() const {
    return ShiftLevel((26 - k_) % 26);
}

int letter_pos(char c) {
    unsigned char u = static_cast<unsigned char>(c);
    if (u >= 'a' && u <= 'z') return u - 'a';
    if (u >= 'A' && u <= 'Z') return u - 'A';
    throw InvalidLetter(std::string("not a letter: '") + c + "'");
}

char pos_letter(int p) {
    if (p < 0 || p > 25) {
        throw InvalidLetter("letter position out of range [0,25]: " + std::to_string(p));
    }
    return static_cast<char>('a' + p);
}

std::string encode(std::string_view text, ShiftLevel k) {
    if (text.empty()) throw InvalidLetter("cannot encode empty text");
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        out.push_back(pos_letter((letter_pos(c) + k.value()) % 26));
    }
    return out;
}

std::string decode(std::string_view text, ShiftLevel k) {
    return encode(text, k.complement());
}

ShiftLevel infer_step_shift(char input_letter, char output_letter) {
    int diff = letter_pos(input_letter) - letter_pos(output_letter);
    return ShiftLevel(((diff % 26) + 26) % 26);
}

CipherExample CipherExample::make(std::string_view word, ShiftLevel k, int bin, std::string_view split) {
    CipherExample ex;
    ex.plaintext.assign(word);
    for (char& c : ex.plaintext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    ex.shift = k.value();
    ex.encoded = encode(ex.plaintext, k);
    ex.bin = bin;
    ex.split.assign(split);
    char buf[8];
    std::snprintf(buf, sizeof(buf), ".k%02d", k.value());
    ex.id = ex.plaintext + buf;
    return ex;
}

}  // namespace shiftprobe
