#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include "sdooop/errors.hpp"

namespace sdooop {

// Portable uniform source. std::mt19937_64 output is fixed by the standard;
// the double conversion below is done by hand because the standard
// distributions are implementation-defined.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed = 0) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next_u64() { return engine_(); }

    // Opaque hex encoding of the engine's textual state.
    std::string state_hex() const
    {
        std::ostringstream os;
        os << engine_;
        static constexpr char digits[] = "0123456789abcdef";
        std::string text = os.str();
        std::string hex;
        hex.reserve(text.size() * 2);
        for (unsigned char c : text) {
            hex.push_back(digits[c >> 4]);
            hex.push_back(digits[c & 0xf]);
        }
        return hex;
    }

    static UniformSource from_state_hex(std::string_view hex)
    {
        if (hex.size() % 2 != 0)
            throw SnapshotError("rng state: odd hex length");
        auto nibble = [](char c) -> int {
            if (c >= '0' && c <= '9') return c - '0';
            if (c >= 'a' && c <= 'f') return c - 'a' + 10;
            if (c >= 'A' && c <= 'F') return c - 'A' + 10;
            throw SnapshotError("rng state: invalid hex digit");
        };
        std::string text;
        text.reserve(hex.size() / 2);
        for (std::size_t i = 0; i < hex.size(); i += 2)
            text.push_back(static_cast<char>(nibble(hex[i]) * 16 + nibble(hex[i + 1])));
        UniformSource src;
        std::istringstream is(text);
        is >> src.engine_;
        if (is.fail())
            throw SnapshotError("rng state: malformed engine state");
        return src;
    }

    bool operator==(const UniformSource&) const = default;

private:
    std::mt19937_64 engine_;
};

} // namespace sdooop
