#include "shiftprobe/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include "shiftprobe/errors.hpp"

namespace shiftprobe {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits a line on "->", trimming each part.
std::vector<std::string_view> split_arrows(std::string_view s) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = s.find("->", start);
        if (pos == std::string_view::npos) {
            parts.push_back(trim(s.substr(start)));
            return parts;
        }
        parts.push_back(trim(s.substr(start, pos - start)));
        start = pos + 2;
    }
}

bool is_integer(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return true;
}

bool is_letter(std::string_view s) {
    return s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]));
}

// "N." prefix; returns the step index and the rest of the line.
std::optional<std::pair<int, std::string_view>> split_index(std::string_view line) {
    line = trim(line);
    std::size_t i = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9') ++i;
    if (i == 0 || i >= line.size() || line[i] != '.') return std::nullopt;
    int idx = 0;
    for (std::size_t j = 0; j < i; ++j) idx = idx * 10 + (line[j] - '0');
    return std::make_pair(idx, trim(line.substr(i + 1)));
}

std::optional<StepRecord> parse_step(std::string_view rest, PromptVariant style) {
    auto parts = split_arrows(rest);
    if (parts.size() < 2) return std::nullopt;
    StepRecord step;
    if (style == PromptVariant::NumberCoT) {
        if (!is_integer(parts.front()) || !is_integer(parts.back())) return std::nullopt;
        step.input = std::string(parts.front());
        step.output = std::string(parts.back());
        return step;
    }
    // Letter domain. MathCoT carries the arithmetic between the arrows; the
    // first and last parts are the letters either way.
    if (style == PromptVariant::MathCoT && parts.size() >= 3 &&
        parts[1].find("mod") == std::string_view::npos) {
        return std::nullopt;
    }
    if (!is_letter(parts.front())) return std::nullopt;
    std::string_view out = parts.back();
    if (out == "*") {
        step.input = lower(std::string(parts.front()));
        step.output = std::nullopt;
        return step;
    }
    if (!is_letter(out)) return std::nullopt;
    step.input = lower(std::string(parts.front()));
    step.output = lower(std::string(out));
    return step;
}

// Answer text after the marker: trimmed, one trailing period dropped, one
// pair of surrounding quotes stripped, lowercased.
std::string normalize_answer(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.back() == '.') s.remove_suffix(1);
    s = trim(s);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s.remove_prefix(1);
        s.remove_suffix(1);
    }
    s = trim(s);
    return lower(std::string(s));
}

// Case-insensitive substring search.
std::size_t find_last_ci(const std::string& haystack, std::string_view needle) {
    std::string h = lower(haystack);
    std::string n = lower(std::string(needle));
    std::size_t pos = h.rfind(n);
    return pos;
}

std::vector<int> parse_number_sequence(std::string_view s) {
    std::vector<int> out;
    std::string cur;
    for (char c : s) {
        if (c >= '0' && c <= '9') {
            cur.push_back(c);
        } else if (c == ',' || c == ' ') {
            if (!cur.empty()) {
                out.push_back(std::stoi(cur));
                cur.clear();
            }
            if (c == ' ') continue;
        } else {
            return {};  // non-numeric content: no valid sequence
        }
    }
    if (!cur.empty()) out.push_back(std::stoi(cur));
    return out;
}

bool answers_equal(PromptVariant style, const std::string& a, const std::string& b) {
    if (style == PromptVariant::NumberCoT) {
        auto xa = parse_number_sequence(a);
        auto xb = parse_number_sequence(b);
        return !xa.empty() && xa == xb;
    }
    return a == b;
}

}  // namespace

ParsedTranscript parse_transcript(const std::string& raw, PromptVariant style) {
    ParsedTranscript p;
    p.style = style;

    std::size_t start = 0;
    int expected_idx = 1;
    while (start <= raw.size()) {
        std::size_t nl = raw.find('\n', start);
        std::string_view line(raw.data() + start,
                              (nl == std::string::npos ? raw.size() : nl) - start);
        if (auto indexed = split_index(line)) {
            auto [idx, rest] = *indexed;
            if (auto step = parse_step(rest, style)) {
                if (idx == 1 && !p.steps.empty()) {
                    p.warnings.push_back("step numbering restarted; keeping the last chain");
                    p.steps.clear();
                    expected_idx = 1;
                }
                if (idx == expected_idx) {
                    p.steps.push_back(std::move(*step));
                    ++expected_idx;
                } else {
                    p.warnings.push_back("non-consecutive step index " + std::to_string(idx) +
                                         " skipped");
                }
            } else if (!trim(line).empty()) {
                p.warnings.push_back("malformed step line skipped: " + std::string(trim(line)));
            }
        }
        if (nl == std::string::npos) break;
        start = nl + 1;
    }

    std::string_view marker = final_marker(style);
    std::size_t pos = find_last_ci(raw, marker);
    if (pos == std::string::npos) {
        p.warnings.push_back("final-answer marker not found");
    } else {
        std::size_t begin = pos + marker.size();
        std::size_t end = raw.find('\n', begin);
        std::string answer = normalize_answer(
            std::string_view(raw).substr(begin, (end == std::string::npos ? raw.size() : end) -
                                                    begin));
        if (answer.empty()) {
            p.warnings.push_back("empty final answer");
        } else {
            p.final_answer = std::move(answer);
        }
    }
    return p;
}

std::optional<std::string> faithful_answer(const ParsedTranscript& p) {
    if (p.steps.empty()) return std::nullopt;
    std::string out;
    for (std::size_t i = 0; i < p.steps.size(); ++i) {
        if (!p.steps[i].output) return std::nullopt;  // masked step
        if (p.style == PromptVariant::NumberCoT && i > 0) out += ',';
        out += *p.steps[i].output;
    }
    return out;
}

Quadrant classify(const ParsedTranscript& p, const std::string& truth) {
    Quadrant q;
    std::string t = lower(truth);
    if (auto chain = faithful_answer(p)) q.chain_correct = answers_equal(p.style, *chain, t);
    if (p.final_answer) q.final_correct = answers_equal(p.style, *p.final_answer, t);
    return q;
}

std::string truth_for(const CipherExample& example, PromptVariant style) {
    if (style != PromptVariant::NumberCoT) return example.plaintext;
    std::string out;
    for (std::size_t i = 0; i < example.plaintext.size(); ++i) {
        if (i > 0) out += ',';
        out += std::to_string(letter_pos(example.plaintext[i]));
    }
    return out;
}

AnalyzedRecord analyze_one(const std::string& raw, PromptVariant style,
                           const CipherExample& example) {
    AnalyzedRecord r;
    r.example_id = example.id;
    r.shift = example.shift;
    r.bin = example.bin;
    r.split = example.split;
    r.parsed = parse_transcript(raw, style);
    r.quad = classify(r.parsed, truth_for(example, style));
    return r;
}

std::vector<AccuracyCell> accuracy_table(const std::vector<AnalyzedRecord>& records) {
    std::map<std::pair<int, int>, AccuracyCell> cells;
    for (const auto& r : records) {
        auto& c = cells[{r.shift, r.bin}];
        c.shift = r.shift;
        c.bin = r.bin;
        c.n++;
        if (r.quad.final_correct) c.overall_acc += 1.0;
        if (r.quad.chain_correct) c.faithful_acc += 1.0;
    }
    std::vector<AccuracyCell> out;
    out.reserve(cells.size());
    for (auto& [key, c] : cells) {
        c.overall_acc /= c.n;
        c.faithful_acc /= c.n;
        out.push_back(c);
    }
    return out;
}

ConfusionCounts confusion_matrix(const std::vector<AnalyzedRecord>& records) {
    ConfusionCounts c;
    for (const auto& r : records) {
        if (r.quad.chain_correct) {
            (r.quad.final_correct ? c.cc : c.ci)++;
        } else {
            (r.quad.final_correct ? c.ic : c.ii)++;
        }
    }
    return c;
}

std::vector<ConfusionCell> confusion_by_group(const std::vector<AnalyzedRecord>& records) {
    std::map<std::pair<int, int>, ConfusionCounts> cells;
    for (const auto& r : records) {
        auto& c = cells[{r.shift, r.bin}];
        if (r.quad.chain_correct) {
            (r.quad.final_correct ? c.cc : c.ci)++;
        } else {
            (r.quad.final_correct ? c.ic : c.ii)++;
        }
    }
    std::vector<ConfusionCell> out;
    out.reserve(cells.size());
    for (const auto& [key, counts] : cells) {
        out.push_back(ConfusionCell{key.first, key.second, counts});
    }
    return out;
}

std::pair<int, int> ShiftHistogram::top_two() const {
    int first = 0, second = -1;
    for (int s = 1; s < 26; ++s) {
        if (counts[static_cast<std::size_t>(s)] > counts[static_cast<std::size_t>(first)]) {
            second = first;
            first = s;
        } else if (second < 0 || counts[static_cast<std::size_t>(s)] >
                                     counts[static_cast<std::size_t>(second)]) {
            second = s;
        }
    }
    return {first, second};
}

ShiftHistogram shift_histogram(const std::vector<ParsedTranscript>& transcripts) {
    ShiftHistogram h;
    for (const auto& p : transcripts) {
        for (const auto& s : p.steps) {
            if (!s.output || s.input.size() != 1 || s.output->size() != 1) continue;
            char in = s.input[0], out = (*s.output)[0];
            if (in < 'a' || in > 'z' || out < 'a' || out > 'z') continue;
            h.add(infer_step_shift(in, out).value());
        }
    }
    return h;
}

std::vector<HistogramCell> histogram_by_shift(const std::vector<AnalyzedRecord>& records) {
    std::map<int, ShiftHistogram> cells;
    for (const auto& r : records) {
        auto& h = cells[r.shift];
        for (const auto& s : r.parsed.steps) {
            if (!s.output || s.input.size() != 1 || s.output->size() != 1) continue;
            char in = s.input[0], out = (*s.output)[0];
            if (in < 'a' || in > 'z' || out < 'a' || out > 'z') continue;
            h.add(infer_step_shift(in, out).value());
        }
    }
    std::vector<HistogramCell> out;
    out.reserve(cells.size());
    for (const auto& [shift, hist] : cells) out.push_back(HistogramCell{shift, hist});
    return out;
}

void write_metrics_csv(const std::string& path, const std::vector<AccuracyCell>& cells) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << "shift,bin,n,overall_acc,faithful_acc\n";
    for (const auto& c : cells) {
        f << c.shift << ',' << c.bin << ',' << c.n << ',' << c.overall_acc << ','
          << c.faithful_acc << '\n';
    }
}

void write_confusion_csv(const std::string& path, const std::vector<ConfusionCell>& cells) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << "shift,bin_group,cc,ci,ic,ii\n";
    for (const auto& c : cells) {
        f << c.shift << ",bin" << c.bin << ',' << c.counts.cc << ',' << c.counts.ci << ','
          << c.counts.ic << ',' << c.counts.ii << '\n';
    }
}

void write_histogram_csv(const std::string& path, const std::vector<HistogramCell>& cells) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw Error("cannot write " + path);
    f << "intended_shift,inferred_shift,count,freq\n";
    for (const auto& c : cells) {
        for (int s = 0; s < 26; ++s) {
            f << c.intended_shift << ',' << s << ',' << c.hist.counts[static_cast<std::size_t>(s)]
              << ',' << c.hist.freq(s) << '\n';
        }
    }
}

}  // namespace shiftprobe
