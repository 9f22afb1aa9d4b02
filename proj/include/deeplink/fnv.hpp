#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace deeplink {

inline constexpr std::uint64_t fnv1a64_offset = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t fnv1a64_prime = 0x100000001b3ULL;

/// FNV-1a, 64-bit, over the raw bytes of `bytes`.
constexpr std::uint64_t fnv1a64(std::string_view bytes) noexcept
{
    std::uint64_t h = fnv1a64_offset;
    for (char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= fnv1a64_prime;
    }
    return h;
}

/// 16 lowercase hex digits, zero padded.
inline std::string to_hex16(std::uint64_t v)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline bool parse_hex16(std::string_view s, std::uint64_t& out) noexcept
{
    if (s.size() != 16) return false;
    std::uint64_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint64_t>(c - 'a' + 10);
        else return false;
    }
    out = v;
    return true;
}

} // namespace deeplink
