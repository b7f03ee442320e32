#pragma once

#include <string>
#include <string_view>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

// Rotation amount of a shift cipher. 0 is representable for identity tests;
// probe runs use 1..25.
class ShiftLevel {
  public:
    explicit ShiftLevel(int k);

    int value() const { return k_; }

    // min(k, 26 - k): implicit per-letter operations when decoding may go
    // either direction around the alphabet.
    int min_steps() const;

    // 26 - k (mod 26): the forward shift equivalent to decoding k backward.
    ShiftLevel complement() const;

    friend bool operator==(ShiftLevel a, ShiftLevel b) { return a.k_ == b.k_; }

  private:
    int k_;
};

// 'a' -> 0 ... 'z' -> 25. Case-insensitive; non-letters throw InvalidLetter.
int letter_pos(char c);

// Inverse of letter_pos; p must be in [0, 25].
char pos_letter(int p);

// Shift every letter k positions forward. Output is lowercase. Input must be
// nonempty letters-only text.
std::string encode(std::string_view text, ShiftLevel k);

// Shift every letter k positions backward; inverse of encode.
std::string decode(std::string_view text, ShiftLevel k);

// The unique backward shift b with decode(input, b) == output,
// i.e. (pos(input) - pos(output)) mod 26.
ShiftLevel infer_step_shift(char input_letter, char output_letter);

inline int min_steps(ShiftLevel k) { return k.min_steps(); }

// One probe unit: a plaintext word and its encoding under a fixed shift.
struct CipherExample {
    std::string id;
    std::string plaintext;
    int shift = 0;
    std::string encoded;
    int bin = 0;
    std::string split;

    static CipherExample make(std::string_view word, ShiftLevel k, int bin, std::string_view split);
};

}  // namespace shiftprobe
