#pragma once

#include "meanlab/errors.hpp"

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meanlab {

// A finite block over a small alphabet {0, .., alphabet_size-1}, stored one
// byte per symbol. Values are immutable after construction and safe to
// share across threads. Indexing is 0-based everywhere in the library;
// 1-based positions appear only in rendered reports.
class FiniteWord {
public:
    FiniteWord() = default;

    // "0110" -> symbols 0,1,1,0. Characters must be '0'..'0'+size-1.
    explicit FiniteWord(std::string_view ascii, std::uint8_t alphabet_size = 2);

    static FiniteWord from_symbols(std::vector<std::uint8_t> symbols,
                                   std::uint8_t alphabet_size = 2);

    // The power word s^count.
    static FiniteWord run(std::uint8_t symbol, std::size_t count,
                          std::uint8_t alphabet_size = 2);

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    std::uint8_t alphabet_size() const noexcept { return alphabet_size_; }
    std::uint8_t operator[](std::size_t i) const { return symbols_[i]; }
    std::span<const std::uint8_t> symbols() const noexcept { return symbols_; }
    const std::uint8_t* data() const noexcept { return symbols_.data(); }

    FiniteWord subword(std::size_t pos, std::size_t len) const;

    std::string to_ascii() const;

    friend bool operator==(const FiniteWord&, const FiniteWord&) = default;
    // lexicographic by symbols, then alphabet size; enables std::set
    friend bool operator<(const FiniteWord& a, const FiniteWord& b) {
        if (a.symbols_ != b.symbols_) return a.symbols_ < b.symbols_;
        return a.alphabet_size_ < b.alphabet_size_;
    }

private:
    std::vector<std::uint8_t> symbols_;
    std::uint8_t alphabet_size_ = 2;
};

// Run-length piece used to assemble long blocks without materializing the
// power words up front; outputs are always flat.
struct Segment {
    enum class Kind { word, run } kind = Kind::run;
    const FiniteWord* word = nullptr; // kind == word (non-owning)
    std::uint8_t symbol = 0;          // kind == run
    std::size_t count = 0;            // kind == run

    static Segment of(const FiniteWord& w) { return {Kind::word, &w, 0, 0}; }
    static Segment zeros(std::size_t count) { return {Kind::run, nullptr, 0, count}; }
    static Segment run(std::uint8_t symbol, std::size_t count) {
        return {Kind::run, nullptr, symbol, count};
    }
};

// #{i : w_i = 1}. Requires symbol 1 in the alphabet.
std::size_t ones_count(const FiniteWord& w);

std::size_t symbol_count(const FiniteWord& w, std::uint8_t symbol);

// All words must share one alphabet.
FiniteWord concat(std::span<const FiniteWord> words);
FiniteWord concat(std::initializer_list<FiniteWord> words);
FiniteWord concat_segments(std::span<const Segment> segments,
                           std::uint8_t alphabet_size = 2);

// Exhaustive, sorted, duplicate-free start positions of pattern in text
// (0-based). Empty when |pattern| > |text|. Requires |pattern| >= 1.
std::vector<std::size_t> occurrences(const FiniteWord& pattern, const FiniteWord& text);

// Occurrence scan over raw symbol spans (shared by generators and claims).
std::vector<std::size_t> occurrences(std::span<const std::uint8_t> pattern,
                                     std::span<const std::uint8_t> text);

// The set of distinct length-n factors of text; n must satisfy n <= |text|.
std::set<FiniteWord> factors(const FiniteWord& text, std::size_t n);

// Exact distinct-factor count of the first `length` symbols of a raw
// buffer, for alphabets of size <= 4 and n <= 32 (factors pack losslessly
// into 64-bit codes). The entropy module runs on this.
std::size_t distinct_factor_count(std::span<const std::uint8_t> text, std::size_t n,
                                  std::uint8_t alphabet_size, unsigned threads = 1);

} // namespace meanlab
