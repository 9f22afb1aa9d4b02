#pragma once

#include "deeplink/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace deeplink {

struct ViewNode {
    std::string tag;
    std::optional<std::string> resourceId;
    std::vector<ViewNode> children;

    bool operator==(const ViewNode&) const = default;
};

/// Child-index path from the root. Rendered as "@" for the root and
/// "@0/2" for the third child of the first child.
using ViewPosition = std::vector<std::size_t>;

inline std::string render_position(const ViewPosition& pos)
{
    std::string out = "@";
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) out += '/';
        out += std::to_string(pos[i]);
    }
    return out;
}

inline bool is_position_ref(std::string_view ref) noexcept
{
    return !ref.empty() && ref.front() == '@';
}

inline std::optional<ViewPosition> parse_position(std::string_view ref)
{
    if (!is_position_ref(ref)) return std::nullopt;
    ref.remove_prefix(1);
    ViewPosition pos;
    while (!ref.empty()) {
        auto slash = ref.find('/');
        auto part = ref.substr(0, slash);
        std::size_t idx{};
        auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
        if (ec != std::errc{} || p != part.data() + part.size() || part.empty())
            return std::nullopt;
        pos.push_back(idx);
        if (slash == std::string_view::npos) break;
        ref.remove_prefix(slash + 1);
        if (ref.empty()) return std::nullopt;
    }
    return pos;
}

/// A view together with its position, as produced by a pre-order walk.
struct ViewRef {
    const ViewNode* node;
    ViewPosition position;

    /// Resource id when present, position reference otherwise.
    std::string click_ref() const
    {
        return node->resourceId ? *node->resourceId : render_position(position);
    }
};

namespace detail {
inline void collect_views(const ViewNode& n, ViewPosition& pos, std::vector<ViewRef>& out)
{
    out.push_back({&n, pos});
    for (std::size_t i = 0; i < n.children.size(); ++i) {
        pos.push_back(i);
        collect_views(n.children[i], pos, out);
        pos.pop_back();
    }
}
} // namespace detail

/// All views in depth-first document order, root first.
inline std::vector<ViewRef> views_in_order(const ViewNode& root)
{
    std::vector<ViewRef> out;
    ViewPosition pos;
    detail::collect_views(root, pos, out);
    return out;
}

inline const ViewNode* find_by_position(const ViewNode& root, const ViewPosition& pos)
{
    const ViewNode* cur = &root;
    for (auto idx : pos) {
        if (idx >= cur->children.size()) return nullptr;
        cur = &cur->children[idx];
    }
    return cur;
}

inline const ViewNode* find_by_id(const ViewNode& root, std::string_view id)
{
    if (root.resourceId && *root.resourceId == id) return &root;
    for (const auto& c : root.children)
        if (auto* hit = find_by_id(c, id)) return hit;
    return nullptr;
}

/// Resolves a click reference: a resource id or an "@i/j" position.
inline const ViewNode* resolve_view(const ViewNode& root, std::string_view ref)
{
    if (auto pos = parse_position(ref)) return find_by_position(root, *pos);
    return find_by_id(root, ref);
}

/// Screen tree with a pop-up overlay attached as the root's last child.
inline ViewNode compose_overlay(const ViewNode& screen, const std::optional<ViewNode>& overlay)
{
    if (!overlay) return screen;
    ViewNode out = screen;
    out.children.push_back(*overlay);
    return out;
}

inline std::size_t count_views(const ViewNode& root)
{
    std::size_t n = 1;
    for (const auto& c : root.children) n += count_views(c);
    return n;
}

inline nlohmann::json to_json(const ViewNode& n)
{
    nlohmann::json j;
    j["tag"] = n.tag;
    if (n.resourceId) j["id"] = *n.resourceId;
    if (!n.children.empty()) {
        j["children"] = nlohmann::json::array();
        for (const auto& c : n.children) j["children"].push_back(to_json(c));
    }
    return j;
}

inline ViewNode view_from_json(const nlohmann::json& j)
{
    if (!j.is_object() || !j.contains("tag") || !j["tag"].is_string())
        throw Error(ErrorCode::ParseError, "view node needs a string 'tag'");
    ViewNode n;
    n.tag = j["tag"].get<std::string>();
    if (j.contains("id")) {
        if (!j["id"].is_string()) throw Error(ErrorCode::ParseError, "view 'id' must be a string");
        n.resourceId = j["id"].get<std::string>();
    }
    if (j.contains("children")) {
        if (!j["children"].is_array())
            throw Error(ErrorCode::ParseError, "view 'children' must be an array");
        for (const auto& c : j["children"]) n.children.push_back(view_from_json(c));
    }
    return n;
}

} // namespace deeplink
