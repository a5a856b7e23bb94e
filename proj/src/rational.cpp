#include "meanlab/rational.hpp"

#include "meanlab/errors.hpp"

#include <boost/multiprecision/integer.hpp>

#include <cctype>
#include <cstdlib>

namespace meanlab {

namespace {

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Int pow10(std::size_t k) {
    Int r = 1;
    for (std::size_t i = 0; i < k; ++i) r *= 10;
    return r;
}

} // namespace

Rat rat_from_string(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    require(!s.empty(), Errc::schema, "empty rational literal");

    bool negative = false;
    if (s.front() == '+' || s.front() == '-') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    require(!s.empty(), Errc::schema, "malformed rational literal: '" + std::string(text) + "'");

    auto finish = [&](Rat value) { return negative ? Rat(-value) : value; };

    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        std::string_view num = s.substr(0, slash), den = s.substr(slash + 1);
        require(all_digits(num) && all_digits(den), Errc::schema,
                "malformed fraction: '" + std::string(text) + "'");
        Int n{std::string(num)};
        Int d{std::string(den)};
        require(d != 0, Errc::schema, "zero denominator: '" + std::string(text) + "'");
        return finish(Rat(n, d));
    }

    // decimal with optional exponent: [digits][.digits][e[+-]digits]
    std::string_view mantissa = s;
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        mantissa = s.substr(0, e);
        std::string exp_part(s.substr(e + 1));
        require(!exp_part.empty(), Errc::schema, "malformed exponent: '" + std::string(text) + "'");
        char* end = nullptr;
        exponent = std::strtol(exp_part.c_str(), &end, 10);
        require(end && *end == '\0', Errc::schema, "malformed exponent: '" + std::string(text) + "'");
    }

    std::string_view int_part = mantissa, frac_part;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        int_part = mantissa.substr(0, dot);
        frac_part = mantissa.substr(dot + 1);
    }
    require(!int_part.empty() || !frac_part.empty(), Errc::schema,
            "malformed rational literal: '" + std::string(text) + "'");
    require(int_part.empty() || all_digits(int_part), Errc::schema,
            "malformed rational literal: '" + std::string(text) + "'");
    require(frac_part.empty() || all_digits(frac_part), Errc::schema,
            "malformed rational literal: '" + std::string(text) + "'");

    Int digits(std::string(int_part) + std::string(frac_part));
    long scale = static_cast<long>(frac_part.size()) - exponent;
    Rat value;
    if (scale >= 0)
        value = Rat(digits, pow10(static_cast<std::size_t>(scale)));
    else
        value = Rat(digits * pow10(static_cast<std::size_t>(-scale)), 1);
    return finish(value);
}

std::string rat_to_string(const Rat& r) {
    Int n = rat_num(r), d = rat_den(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

Int lcm_upto(unsigned n) {
    Int acc = 1;
    for (unsigned i = 2; i <= n; ++i) acc = boost::multiprecision::lcm(acc, Int(i));
    return acc;
}

} // namespace meanlab
