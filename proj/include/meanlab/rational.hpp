#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace meanlab {

// Exact arithmetic backbone. Window statistics, schedule constraints and
// symbolic Birkhoff sums are all stated over the rationals; nothing in
// those paths is allowed to round.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

// Parses "3", "-3/7", "0.25", ".5", "1e-3" into an exact rational.
// Decimal forms are exact (base-ten), never a binary approximation.
Rat rat_from_string(std::string_view text);

// Canonical "p/q" rendering ("p" when q == 1).
std::string rat_to_string(const Rat& r);

// lcm(1..n); the common denominator of symbolic step distances at
// resolution n.
Int lcm_upto(unsigned n);

// Deterministic splitmix64; used by every seeded sampler so reports are
// byte-reproducible across platforms and standard libraries.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        // rejection sampling keeps the distribution exact
        std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

private:
    std::uint64_t state_;
};

} // namespace meanlab
