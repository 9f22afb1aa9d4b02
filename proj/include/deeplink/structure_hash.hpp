#pragma once

#include "deeplink/fnv.hpp"
#include "deeplink/view_tree.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace deeplink {

/// Order-invariant fingerprint of a view tree's tags and shape.
struct StructureHash {
    std::uint64_t value = 0;

    auto operator<=>(const StructureHash&) const = default;
    bool operator==(const StructureHash&) const = default;

    std::string hex() const { return to_hex16(value); }
};

inline StructureHash structure_hash_from_hex(std::string_view hex)
{
    StructureHash h;
    if (!parse_hex16(hex, h.value))
        throw Error(ErrorCode::ParseError, "'" + std::string(hex) + "' is not a 16-digit hex hash", std::string(hex));
    return h;
}

/// Leaf: FNV-1a of the tag. Inner node: FNV-1a of the tag followed by the
/// children's 16-hex-digit hashes sorted ascending. Resource ids are ignored.
inline StructureHash tree_hash(const ViewNode& root)
{
    std::string str = root.tag;
    if (!root.children.empty()) {
        std::vector<std::string> hashes;
        hashes.reserve(root.children.size());
        for (const auto& c : root.children) hashes.push_back(tree_hash(c).hex());
        std::sort(hashes.begin(), hashes.end());
        for (const auto& h : hashes) str += h;
    }
    return {fnv1a64(str)};
}

} // namespace deeplink
