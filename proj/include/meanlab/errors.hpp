#pragma once

#include <stdexcept>
#include <string>

namespace meanlab {

// Error categories used across the library. CLI maps precondition-type
// failures to exit code 1 and everything unexpected to exit code 2.
enum class Errc {
    alphabet_mismatch,
    horizon_exceeded,
    resolution_exceeded,
    length_error,
    window_error,
    budget_exceeded,
    base_word,
    precondition,
    sampler_exhausted,
    malformed_cover,
    schema,
    io,
    internal,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
    throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
    if (!condition) fail(code, message);
}

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::alphabet_mismatch:   return "alphabet-mismatch";
        case Errc::horizon_exceeded:    return "horizon-exceeded";
        case Errc::resolution_exceeded: return "resolution-exceeded";
        case Errc::length_error:        return "length-error";
        case Errc::window_error:        return "window-error";
        case Errc::budget_exceeded:     return "budget-exceeded";
        case Errc::base_word:           return "base-word";
        case Errc::precondition:        return "precondition";
        case Errc::sampler_exhausted:   return "sampler-exhausted";
        case Errc::malformed_cover:     return "malformed-cover";
        case Errc::schema:              return "schema";
        case Errc::io:                  return "io";
        case Errc::internal:            return "internal";
    }
    return "unknown";
}

} // namespace meanlab
