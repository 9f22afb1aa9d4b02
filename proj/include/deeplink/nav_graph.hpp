#pragma once

// Navigation graph over activities and shortcut computation: for every
// path from the main activity, the shortest earlier path whose label set
// is contained in it.

#include "deeplink/app_model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace deeplink {

enum class EdgeOrigin {
    Declared, // startActivity handler in the model
    External, // synthetic edge from start to an externally launchable activity
    Launch,   // the app-launching transition that opens the start vertex
};

constexpr std::string_view to_string(EdgeOrigin o) noexcept
{
    switch (o) {
    case EdgeOrigin::Declared: return "declared";
    case EdgeOrigin::External: return "external";
    case EdgeOrigin::Launch: return "launch";
    }
    return "declared";
}

struct NavEdge {
    std::string from; // empty for the launch transition
    std::string to;
    IntentDecl intent;
    EdgeOrigin origin = EdgeOrigin::Declared;

    bool operator==(const NavEdge&) const = default;

    const LabelSet& labels() const noexcept { return intent.labels; }
    bool opaque() const { return intent.has_opaque(); }
};

inline std::string render(const NavEdge& e)
{
    return (e.origin == EdgeOrigin::Launch ? std::string("<launch>") : e.from) + "->" + e.to + render(e.labels());
}

inline LabelSet launch_labels()
{
    return {{LabelKind::Action, std::string(action_main), std::nullopt},
            {LabelKind::Category, std::string(category_launcher), std::nullopt}};
}

inline NavEdge launch_edge(const std::string& start)
{
    return {"", start, IntentDecl{start, launch_labels(), {}}, EdgeOrigin::Launch};
}

struct NavGraph {
    std::vector<std::string> vertices; // sorted
    std::vector<NavEdge> edges;        // sorted by (from, to, labels)
    std::string start;

    bool operator==(const NavGraph&) const = default;

    bool has_vertex(std::string_view v) const { return std::binary_search(vertices.begin(), vertices.end(), v); }

    std::vector<const NavEdge*> out_edges(std::string_view v) const
    {
        std::vector<const NavEdge*> out;
        for (const auto& e : edges)
            if (e.from == v) out.push_back(&e);
        return out;
    }

    std::vector<const NavEdge*> in_edges(std::string_view v) const
    {
        std::vector<const NavEdge*> out;
        for (const auto& e : edges)
            if (e.to == v) out.push_back(&e);
        return out;
    }
};

/// Sorts edges canonically and drops parallel edges with equal label sets.
inline void normalize_edges(std::vector<NavEdge>& edges)
{
    auto key = [](const NavEdge& e) { return std::tie(e.from, e.to, e.intent.labels); };
    std::stable_sort(edges.begin(), edges.end(), [&](const NavEdge& a, const NavEdge& b) { return key(a) < key(b); });
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [&](const NavEdge& a, const NavEdge& b) { return key(a) == key(b); }),
                edges.end());
}

/// Vertices reachable from start over all edges (opaque ones included).
inline std::set<std::string> reachable_from_start(const NavGraph& g)
{
    std::set<std::string> seen{g.start};
    std::deque<std::string> queue{g.start};
    while (!queue.empty()) {
        auto v = queue.front();
        queue.pop_front();
        for (const auto* e : g.out_edges(v))
            if (seen.insert(e->to).second) queue.push_back(e->to);
    }
    return seen;
}

/// Synthetic intent used for an activity that can be opened from outside.
inline IntentDecl external_intent(const ActivityDecl& a)
{
    IntentDecl intent;
    intent.target = a.name;
    const IntentFilterDecl* filter = nullptr;
    for (const auto& f : a.manifestFilters)
        if (!filter || (f.is_deep_link() && !filter->is_deep_link())) filter = &f;
    if (filter) {
        intent.labels.insert({LabelKind::Action, filter->action, std::nullopt});
        for (const auto& c : filter->categories) intent.labels.insert({LabelKind::Category, c, std::nullopt});
    } else {
        intent.labels.insert({LabelKind::Action, std::string(action_view), std::nullopt});
        intent.labels.insert({LabelKind::Category, std::string(category_browsable), std::nullopt});
    }
    for (const auto& p : a.requiredParams) intent.labels.insert(extra_label(p.name, p.type));
    return intent;
}

inline NavGraph build_nav_graph(const AppModel& model)
{
    NavGraph g;
    g.start = model.mainActivity;
    for (const auto& a : model.activities) g.vertices.push_back(a.name);
    std::sort(g.vertices.begin(), g.vertices.end());

    for (const auto& d : declared_intents(model))
        g.edges.push_back({d.source, d.intent->target, *d.intent, EdgeOrigin::Declared});
    normalize_edges(g.edges);

    std::set<std::string> hasInbound;
    for (const auto& e : g.edges) hasInbound.insert(e.to);
    std::vector<NavEdge> external;
    for (const auto& a : model.activities)
        if (a.externallyLaunchable && a.name != g.start && !hasInbound.contains(a.name))
            external.push_back({g.start, a.name, external_intent(a), EdgeOrigin::External});
    g.edges.insert(g.edges.end(), external.begin(), external.end());
    normalize_edges(g.edges);

    const auto seen = reachable_from_start(g);
    for (const auto& v : g.vertices)
        if (!seen.contains(v))
            throw Error(ErrorCode::UnreachableActivity, "activity '" + v + "' is not reachable from " + g.start, v);
    return g;
}

// ---------------------------------------------------------------------------
// Paths

/// Ordered transitions from the launch intent to a target activity.
struct Path {
    std::vector<NavEdge> transitions;

    bool operator==(const Path&) const = default;

    std::size_t length() const noexcept { return transitions.size(); }
    const std::string& target() const { return transitions.back().to; }
};

inline std::vector<std::string> render_edges(const Path& p)
{
    std::vector<std::string> out;
    out.reserve(p.transitions.size());
    for (const auto& t : p.transitions) out.push_back(render(t));
    return out;
}

inline std::string render(const Path& p)
{
    std::string out;
    for (const auto& s : render_edges(p)) {
        if (!out.empty()) out += " ; ";
        out += s;
    }
    return out;
}

/// Length first, then edge renderings compared element by element.
inline bool path_order(const Path& a, const Path& b)
{
    if (a.length() != b.length()) return a.length() < b.length();
    return render_edges(a) < render_edges(b);
}

inline LabelSet path_labels(const Path& p)
{
    LabelSet out;
    for (const auto& t : p.transitions) out.insert(t.labels().begin(), t.labels().end());
    return out;
}

/// True when `replacement` can stand in for `original`: same target and a
/// label set contained in the original's (subset-or-equal).
inline bool can_replace(const Path& replacement, const Path& original)
{
    if (replacement.target() != original.target())
        throw Error(ErrorCode::DifferentTargets,
                    "paths end at " + replacement.target() + " and " + original.target());
    return is_subset(path_labels(replacement), path_labels(original));
}

struct PathOptions {
    std::size_t maxLen = 0;     // 0 means |V|
    bool includeOpaque = false; // opaque edges cannot be replayed
};

/// Every vertex-simple path from start, grouped by target and sorted with
/// `path_order`. The launch-only path is the single path to start.
inline std::map<std::string, std::vector<Path>> enumerate_all_paths(const NavGraph& g, PathOptions opts = {})
{
    const std::size_t maxLen = opts.maxLen ? opts.maxLen : g.vertices.size();
    std::map<std::string, std::vector<Path>> out;
    for (const auto& v : g.vertices) out[v];
    if (maxLen == 0) return out;

    std::map<std::string, std::vector<const NavEdge*>> adjacency;
    for (const auto& e : g.edges)
        if (opts.includeOpaque || !e.opaque()) adjacency[e.from].push_back(&e);

    Path current{{launch_edge(g.start)}};
    std::set<std::string> onPath{g.start};
    std::function<void(const std::string&)> dfs = [&](const std::string& v) {
        out[v].push_back(current);
        if (current.length() >= maxLen) return;
        for (const auto* e : adjacency[v]) {
            if (onPath.contains(e->to)) continue;
            onPath.insert(e->to);
            current.transitions.push_back(*e);
            dfs(e->to);
            current.transitions.pop_back();
            onPath.erase(e->to);
        }
    };
    dfs(g.start);
    for (auto& [v, paths] : out) std::sort(paths.begin(), paths.end(), path_order);
    return out;
}

inline std::vector<Path> enumerate_paths(const NavGraph& g, const std::string& v, PathOptions opts = {})
{
    if (!g.has_vertex(v)) throw Error(ErrorCode::NoSuchTarget, "no activity '" + v + "' in graph", v);
    return enumerate_all_paths(g, opts).at(v);
}

struct Shortcut {
    std::string target;
    Path original;
    Path chosen;

    bool operator==(const Shortcut&) const = default;
};

/// Shortcuts per activity, one per enumerated path, in path order.
struct ShortcutTable {
    std::map<std::string, std::vector<Shortcut>> byActivity;

    bool operator==(const ShortcutTable&) const = default;

    const Shortcut* find(const std::string& activity, const Path& original) const
    {
        auto it = byActivity.find(activity);
        if (it == byActivity.end()) return nullptr;
        for (const auto& s : it->second)
            if (s.original == original) return &s;
        return nullptr;
    }
};

inline ShortcutTable compute_shortcuts(const NavGraph& g, PathOptions opts = {})
{
    ShortcutTable table;
    for (auto& [v, paths] : enumerate_all_paths(g, opts)) {
        std::vector<LabelSet> labels;
        labels.reserve(paths.size());
        for (const auto& p : paths) labels.push_back(path_labels(p));
        auto& row = table.byActivity[v];
        for (std::size_t i = 0; i < paths.size(); ++i) {
            std::size_t chosen = i;
            for (std::size_t j = 0; j < i; ++j) {
                if (is_subset(labels[j], labels[i])) {
                    chosen = j;
                    break;
                }
            }
            row.push_back({v, paths[i], paths[chosen]});
        }
    }
    return table;
}

/// Distinct chosen shortcuts targeting `v`, in path order.
inline std::vector<Path> unique_shortcuts(const ShortcutTable& table, const std::string& v)
{
    std::vector<Path> out;
    auto it = table.byActivity.find(v);
    if (it == table.byActivity.end()) return out;
    for (const auto& s : it->second)
        if (std::find(out.begin(), out.end(), s.chosen) == out.end()) out.push_back(s.chosen);
    std::sort(out.begin(), out.end(), path_order);
    return out;
}

// ---------------------------------------------------------------------------
// Export

inline nlohmann::json to_json(const NavEdge& e)
{
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : e.labels()) labels.push_back(render(l));
    nlohmann::json j{{"to", e.to}, {"labels", labels}, {"origin", std::string(to_string(e.origin))}};
    if (e.origin != EdgeOrigin::Launch) j["from"] = e.from;
    if (e.opaque()) j["opaque"] = true;
    return j;
}

inline nlohmann::json to_json(const Path& p)
{
    nlohmann::json t = nlohmann::json::array();
    for (const auto& e : p.transitions) t.push_back(to_json(e));
    nlohmann::json labels = nlohmann::json::array();
    for (const auto& l : path_labels(p)) labels.push_back(render(l));
    return {{"target", p.target()}, {"length", p.length()}, {"labels", labels}, {"transitions", t}};
}

inline nlohmann::json to_json(const NavGraph& g)
{
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : g.edges) edges.push_back(to_json(e));
    return {{"start", g.start}, {"vertices", g.vertices}, {"edges", edges}};
}

namespace detail {
inline std::string dot_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}
} // namespace detail

/// Graphviz description: one node per activity, one labeled edge per intent.
inline std::string to_dot(const NavGraph& g)
{
    std::string out = "digraph navigation {\n";
    for (const auto& v : g.vertices) {
        out += "  \"" + detail::dot_escape(v) + "\"";
        if (v == g.start) out += " [shape=doublecircle]";
        out += ";\n";
    }
    for (const auto& e : g.edges) {
        std::string label;
        for (const auto& l : e.labels()) {
            if (!label.empty()) label += "\\n";
            label += detail::dot_escape(render(l));
        }
        out += "  \"" + detail::dot_escape(e.from) + "\" -> \"" + detail::dot_escape(e.to) + "\" [label=\"" + label +
               "\"";
        if (e.origin == EdgeOrigin::External) out += ", style=dashed";
        if (e.opaque()) out += ", color=red";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

} // namespace deeplink
