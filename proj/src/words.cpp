#include "meanlab/words.hpp"

#include "meanlab/parallel.hpp"

#include <algorithm>
#include <unordered_set>

namespace meanlab {

FiniteWord::FiniteWord(std::string_view ascii, std::uint8_t alphabet_size)
    : alphabet_size_(alphabet_size) {
    require(alphabet_size >= 1, Errc::alphabet_mismatch, "alphabet must be non-empty");
    symbols_.reserve(ascii.size());
    for (char c : ascii) {
        int v = c - '0';
        require(v >= 0 && v < alphabet_size, Errc::alphabet_mismatch,
                std::string("symbol '") + c + "' outside alphabet of size " +
                    std::to_string(alphabet_size));
        symbols_.push_back(static_cast<std::uint8_t>(v));
    }
}

FiniteWord FiniteWord::from_symbols(std::vector<std::uint8_t> symbols,
                                    std::uint8_t alphabet_size) {
    require(alphabet_size >= 1, Errc::alphabet_mismatch, "alphabet must be non-empty");
    for (std::uint8_t s : symbols)
        require(s < alphabet_size, Errc::alphabet_mismatch,
                "symbol value " + std::to_string(int(s)) + " outside alphabet of size " +
                    std::to_string(alphabet_size));
    FiniteWord w;
    w.symbols_ = std::move(symbols);
    w.alphabet_size_ = alphabet_size;
    return w;
}

FiniteWord FiniteWord::run(std::uint8_t symbol, std::size_t count, std::uint8_t alphabet_size) {
    require(symbol < alphabet_size, Errc::alphabet_mismatch,
            "run symbol outside alphabet");
    FiniteWord w;
    w.alphabet_size_ = alphabet_size;
    w.symbols_.assign(count, symbol);
    return w;
}

FiniteWord FiniteWord::subword(std::size_t pos, std::size_t len) const {
    require(pos + len <= size(), Errc::length_error, "subword range out of bounds");
    FiniteWord w;
    w.alphabet_size_ = alphabet_size_;
    w.symbols_.assign(symbols_.begin() + pos, symbols_.begin() + pos + len);
    return w;
}

std::string FiniteWord::to_ascii() const {
    std::string s;
    s.reserve(size());
    for (std::uint8_t v : symbols_) s.push_back(static_cast<char>('0' + v));
    return s;
}

std::size_t ones_count(const FiniteWord& w) {
    require(w.alphabet_size() >= 2, Errc::alphabet_mismatch,
            "ones_count requires symbol 1 in the alphabet");
    return symbol_count(w, 1);
}

std::size_t symbol_count(const FiniteWord& w, std::uint8_t symbol) {
    return static_cast<std::size_t>(
        std::count(w.symbols().begin(), w.symbols().end(), symbol));
}

FiniteWord concat(std::span<const FiniteWord> words) {
    std::uint8_t alphabet = words.empty() ? 2 : words.front().alphabet_size();
    std::size_t total = 0;
    for (const FiniteWord& w : words) {
        require(w.alphabet_size() == alphabet, Errc::alphabet_mismatch,
                "concat inputs must share one alphabet");
        total += w.size();
    }
    std::vector<std::uint8_t> out;
    out.reserve(total);
    for (const FiniteWord& w : words)
        out.insert(out.end(), w.symbols().begin(), w.symbols().end());
    return FiniteWord::from_symbols(std::move(out), alphabet);
}

FiniteWord concat(std::initializer_list<FiniteWord> words) {
    return concat(std::span<const FiniteWord>(words.begin(), words.size()));
}

FiniteWord concat_segments(std::span<const Segment> segments, std::uint8_t alphabet_size) {
    std::size_t total = 0;
    for (const Segment& s : segments) {
        if (s.kind == Segment::Kind::word) {
            require(s.word != nullptr, Errc::internal, "null segment word");
            require(s.word->alphabet_size() == alphabet_size, Errc::alphabet_mismatch,
                    "concat inputs must share one alphabet");
            total += s.word->size();
        } else {
            require(s.symbol < alphabet_size, Errc::alphabet_mismatch,
                    "run symbol outside alphabet");
            total += s.count;
        }
    }
    std::vector<std::uint8_t> out;
    out.reserve(total);
    for (const Segment& s : segments) {
        if (s.kind == Segment::Kind::word)
            out.insert(out.end(), s.word->symbols().begin(), s.word->symbols().end());
        else
            out.insert(out.end(), s.count, s.symbol);
    }
    return FiniteWord::from_symbols(std::move(out), alphabet_size);
}

std::vector<std::size_t> occurrences(std::span<const std::uint8_t> pattern,
                                     std::span<const std::uint8_t> text) {
    require(!pattern.empty(), Errc::precondition, "occurrences requires |pattern| >= 1");
    std::vector<std::size_t> hits;
    if (pattern.size() > text.size()) return hits;

    // KMP; binary alphabets defeat the skip heuristics of the std searchers
    std::vector<std::size_t> border(pattern.size(), 0);
    for (std::size_t i = 1, k = 0; i < pattern.size(); ++i) {
        while (k > 0 && pattern[i] != pattern[k]) k = border[k - 1];
        if (pattern[i] == pattern[k]) ++k;
        border[i] = k;
    }
    for (std::size_t i = 0, k = 0; i < text.size(); ++i) {
        while (k > 0 && text[i] != pattern[k]) k = border[k - 1];
        if (text[i] == pattern[k]) ++k;
        if (k == pattern.size()) {
            hits.push_back(i + 1 - pattern.size());
            k = border[k - 1];
        }
    }
    return hits;
}

std::vector<std::size_t> occurrences(const FiniteWord& pattern, const FiniteWord& text) {
    return occurrences(pattern.symbols(), text.symbols());
}

std::set<FiniteWord> factors(const FiniteWord& text, std::size_t n) {
    require(n >= 1 && n <= text.size(), Errc::length_error,
            "factor length must satisfy 1 <= n <= |text|");
    std::set<FiniteWord> out;
    for (std::size_t i = 0; i + n <= text.size(); ++i)
        out.insert(text.subword(i, n));
    return out;
}

std::size_t distinct_factor_count(std::span<const std::uint8_t> text, std::size_t n,
                                  std::uint8_t alphabet_size, unsigned threads) {
    require(n >= 1 && n <= text.size(), Errc::length_error,
            "factor length must satisfy 1 <= n <= |text|");
    require(alphabet_size >= 1 && alphabet_size <= 4, Errc::alphabet_mismatch,
            "packed factor counting supports alphabets of size <= 4");
    require(n <= 32, Errc::length_error, "packed factor counting supports n <= 32");

    const std::size_t windows = text.size() - n + 1;
    const std::uint64_t mask = (n == 32) ? ~0ULL : ((1ULL << (2 * n)) - 1);

    auto scan_chunk = [&](std::size_t begin, std::size_t end) {
        // chunks overlap by n-1 so every window is coded by exactly one pass
        std::unordered_set<std::uint64_t> codes;
        codes.reserve((end - begin) / 2 + 16);
        std::uint64_t code = 0;
        for (std::size_t i = begin; i < begin + n - 1; ++i)
            code = ((code << 2) | text[i]) & mask;
        for (std::size_t i = begin + n - 1; i < end + n - 1; ++i) {
            code = ((code << 2) | text[i]) & mask;
            codes.insert(code);
        }
        return codes;
    };

    if (threads <= 1 || windows < 1 << 16) {
        return scan_chunk(0, windows).size();
    }
    auto chunk_sets = parallel_map_chunks<std::unordered_set<std::uint64_t>>(
        windows, threads, scan_chunk);
    std::unordered_set<std::uint64_t> all;
    for (auto& s : chunk_sets) all.merge(s);
    return all.size();
}

} // namespace meanlab
