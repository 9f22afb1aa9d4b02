#pragma once

// Fragment discovery: depth-first clicking of every view of an activity
// instance, identifying fragments by structure hash and backtracking by
// restarting the app and replaying the way back.

#include "deeplink/nav_graph.hpp"
#include "deeplink/simulator.hpp"
#include "deeplink/structure_hash.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace deeplink {

/// Steers a fresh session to an instance of the activity to crawl.
struct EntryScript {
    std::vector<std::pair<IntentDecl, ValueMap>> intents;
    std::vector<std::string> actions;

    bool operator==(const EntryScript&) const = default;
};

inline nlohmann::json to_json(const EntryScript& s)
{
    nlohmann::json intents = nlohmann::json::array();
    for (const auto& [intent, values] : s.intents)
        intents.push_back({{"intent", to_json(intent)}, {"values", values_to_json(values)}});
    return {{"intents", intents}, {"actions", s.actions}};
}

inline EntryScript entry_script_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "entry script must be an object");
    EntryScript s;
    if (j.contains("intents")) {
        if (!j["intents"].is_array()) throw Error(ErrorCode::ParseError, "entry script 'intents' must be an array");
        for (const auto& ji : j["intents"]) {
            auto intent = intent_from_json(detail::require(ji, "intent", "entry script"), "entry script");
            ValueMap values = ji.contains("values") ? values_from_json(ji["values"]) : ValueMap{};
            s.intents.emplace_back(std::move(intent), std::move(values));
        }
    }
    for (auto& a : detail::string_list(j, "actions", "entry script")) s.actions.push_back(std::move(a));
    return s;
}

/// Entry script following `path` with type-default values for every extra.
inline EntryScript entry_script_for(const Path& path)
{
    EntryScript s;
    for (std::size_t i = 1; i < path.transitions.size(); ++i) {
        const auto& intent = path.transitions[i].intent;
        ValueMap values;
        for (const auto& l : intent.extras())
            if (!l.is_opaque()) values.emplace(l.name, default_value(*l.valueType));
        s.intents.emplace_back(intent, std::move(values));
    }
    return s;
}

/// Runs the script on `session` (expected freshly launched) and checks it
/// lands on `activity`. Throws EntryScriptFailed.
inline void run_entry_script(SimSession& session, const EntryScript& script, const std::string& activity)
{
    try {
        for (const auto& [intent, values] : script.intents) session.send_intent(intent, values);
        for (const auto& a : script.actions) session.click(a);
    } catch (const Error& e) {
        throw Error(ErrorCode::EntryScriptFailed, "entry script failed: " + std::string(e.what()), activity);
    }
    if (session.terminated() || session.current_activity() != activity)
        throw Error(ErrorCode::EntryScriptFailed,
                    "entry script ends on " + (session.terminated() ? std::string("<terminated>")
                                                                     : session.current_activity()) +
                        ", expected " + activity,
                    activity);
}

struct FragmentNode {
    StructureHash hash;
    ViewNode exampleTree;
    std::size_t discoveredAt = 0;

    bool operator==(const FragmentNode&) const = default;
};

struct FtgEdge {
    StructureHash source;
    StructureHash target;
    std::string trigger;
    bool cross = false; // edge into an already known fragment (--cross-edges)

    bool operator==(const FtgEdge&) const = default;
};

/// A fragment change caused by a view that has no resource id. Not part of
/// the graph and never linked.
struct UnidentifiedTransition {
    StructureHash source;
    StructureHash target;
    std::string view;

    bool operator==(const UnidentifiedTransition&) const = default;
};

struct FragmentTransitionGraph {
    std::string activity;
    StructureHash start;
    std::vector<FragmentNode> vertices;
    std::vector<FtgEdge> edges;
    std::vector<UnidentifiedTransition> unidentified;
    std::size_t steps = 0;

    bool operator==(const FragmentTransitionGraph&) const = default;

    const FragmentNode* find(StructureHash h) const
    {
        for (const auto& v : vertices)
            if (v.hash == h) return &v;
        return nullptr;
    }
};

struct CrawlOptions {
    std::size_t stepBudget = 10000;
    bool crossEdges = false;       // record edges into known fragments, without recursing
    bool positionFallback = false; // identify id-less views by tree position
};

using SessionFactory = std::function<SimSession()>;

namespace detail {

class FtgCrawler {
public:
    FtgCrawler(const SessionFactory& factory, std::string activity, const EntryScript& entry, CrawlOptions opts)
        : factory_(factory), entry_(entry), opts_(opts), session_(factory())
    {
        graph_.activity = std::move(activity);
    }

    FragmentTransitionGraph run()
    {
        run_entry_script(session_, entry_, graph_.activity);
        const auto tree = session_.current_view_tree();
        graph_.start = tree_hash(tree);
        graph_.vertices.push_back({graph_.start, tree, 0});
        build(graph_.start, {});
        graph_.steps = steps_;
        return std::move(graph_);
    }

private:
    void count_step()
    {
        if (++steps_ > opts_.stepBudget)
            throw Error(ErrorCode::CrawlBudgetExceeded,
                        "crawl of " + graph_.activity + " exceeded " + std::to_string(opts_.stepBudget) + " clicks",
                        graph_.activity);
    }

    void build(StructureHash fragment, const std::vector<std::string>& pathToFragment)
    {
        const auto baseDepth = session_.back_stack().size();
        const auto here = session_.current_view_tree();
        std::vector<std::pair<std::string, bool>> views; // click ref, has resource id
        for (const auto& v : views_in_order(here))
            views.emplace_back(v.click_ref(), v.node->resourceId.has_value());

        for (const auto& [ref, hasId] : views) {
            count_step();
            try {
                session_.click(ref);
            } catch (const Error&) {
                continue; // failed clicks leave the session untouched
            }
            if (session_.back_stack().size() != baseDepth || session_.current_activity() != graph_.activity) {
                session_.do_back();
                continue;
            }
            const auto tree = session_.current_view_tree();
            const auto current = tree_hash(tree);
            if (current == fragment) continue;

            if (!hasId && !opts_.positionFallback) {
                UnidentifiedTransition u{fragment, current, ref};
                if (std::find(graph_.unidentified.begin(), graph_.unidentified.end(), u) == graph_.unidentified.end())
                    graph_.unidentified.push_back(u);
            } else if (!graph_.find(current)) {
                graph_.vertices.push_back({current, tree, steps_});
                graph_.edges.push_back({fragment, current, ref, false});
                auto childPath = pathToFragment;
                childPath.push_back(ref);
                build(current, childPath);
            } else if (opts_.crossEdges) {
                FtgEdge e{fragment, current, ref, true};
                if (std::find(graph_.edges.begin(), graph_.edges.end(), e) == graph_.edges.end())
                    graph_.edges.push_back(e);
            }
            recover(fragment, pathToFragment);
        }
    }

    /// Restart, replay the entry script and the triggers back to `fragment`.
    void recover(StructureHash fragment, const std::vector<std::string>& pathToFragment)
    {
        session_ = factory_();
        run_entry_script(session_, entry_, graph_.activity);
        for (const auto& ref : pathToFragment) {
            count_step();
            session_.click(ref);
        }
        if (tree_hash(session_.current_view_tree()) != fragment)
            throw Error(ErrorCode::RecoverFailed, "could not return to fragment " + fragment.hex(), fragment.hex());
    }

    const SessionFactory& factory_;
    const EntryScript& entry_;
    CrawlOptions opts_;
    SimSession session_;
    FragmentTransitionGraph graph_;
    std::size_t steps_ = 0;
};

} // namespace detail

/// Builds the fragment transition graph of `activity`, starting from the
/// instance `entry` lands on. Edges into already known fragments are only
/// recorded with `crossEdges`.
inline FragmentTransitionGraph crawl_ftg(const SessionFactory& factory, const std::string& activity,
                                         const EntryScript& entry, CrawlOptions opts = {})
{
    return detail::FtgCrawler(factory, activity, entry, opts).run();
}

inline SessionFactory session_factory(ModelPtr model)
{
    return [model = std::move(model)] { return SimSession::launch(model); };
}

/// Triggers along the discovery edges from the start fragment to `target`.
inline std::vector<std::string> fragment_path(const FragmentTransitionGraph& ftg, StructureHash target)
{
    if (!ftg.find(target))
        throw Error(ErrorCode::NoSuchFragment, "no fragment " + target.hex() + " in " + ftg.activity, target.hex());
    std::vector<std::string> out;
    auto cur = target;
    while (cur != ftg.start) {
        auto it = std::find_if(ftg.edges.begin(), ftg.edges.end(),
                               [&](const FtgEdge& e) { return !e.cross && e.target == cur; });
        if (it == ftg.edges.end())
            throw Error(ErrorCode::NoSuchFragment, "fragment " + cur.hex() + " has no discovery edge", cur.hex());
        out.push_back(it->trigger);
        cur = it->source;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

using FragmentHints = std::map<StructureHash, std::string>;

/// Names from `hints`, otherwise "frag-" plus the first 8 hex digits.
inline std::map<StructureHash, std::string> name_fragments(const FragmentTransitionGraph& ftg,
                                                           const FragmentHints& hints = {})
{
    std::map<StructureHash, std::string> names;
    std::map<std::string, StructureHash> taken;
    for (const auto& v : ftg.vertices) {
        auto it = hints.find(v.hash);
        auto name = it != hints.end() ? it->second : "frag-" + v.hash.hex().substr(0, 8);
        if (auto [pos, inserted] = taken.emplace(name, v.hash); !inserted)
            throw Error(ErrorCode::DuplicateName, "fragment name '" + name + "' used twice in " + ftg.activity, name);
        names.emplace(v.hash, std::move(name));
    }
    return names;
}

inline FragmentHints hints_from_json(const nlohmann::json& j)
{
    FragmentHints out;
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "fragment hints must be an object");
    for (const auto& [hex, name] : j.items()) {
        if (!name.is_string()) throw Error(ErrorCode::ParseError, "fragment hint names must be strings");
        out.emplace(structure_hash_from_hex(hex), name.get<std::string>());
    }
    return out;
}

inline nlohmann::json to_json(const FragmentTransitionGraph& ftg, const std::map<StructureHash, std::string>& names)
{
    nlohmann::json vertices = nlohmann::json::array();
    for (const auto& v : ftg.vertices)
        vertices.push_back({{"hash", v.hash.hex()},
                            {"name", names.at(v.hash)},
                            {"discoveredAt", v.discoveredAt},
                            {"tree", to_json(v.exampleTree)}});
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : ftg.edges) {
        nlohmann::json je{{"source", e.source.hex()}, {"target", e.target.hex()}, {"trigger", e.trigger}};
        if (e.cross) je["cross"] = true;
        edges.push_back(je);
    }
    nlohmann::json unidentified = nlohmann::json::array();
    for (const auto& u : ftg.unidentified)
        unidentified.push_back({{"source", u.source.hex()}, {"target", u.target.hex()}, {"view", u.view}});
    return {{"activity", ftg.activity}, {"start", ftg.start.hex()}, {"vertices", vertices},
            {"edges", edges},          {"unidentified", unidentified}, {"steps", ftg.steps}};
}

inline nlohmann::json to_json(const FragmentTransitionGraph& ftg) { return to_json(ftg, name_fragments(ftg)); }

inline std::string to_dot(const FragmentTransitionGraph& ftg, const std::map<StructureHash, std::string>& names)
{
    std::string out = "digraph fragments {\n";
    for (const auto& v : ftg.vertices) {
        out += "  \"" + v.hash.hex() + "\" [label=\"" + detail::dot_escape(names.at(v.hash)) + "\"";
        if (v.hash == ftg.start) out += ", shape=doublecircle";
        out += "];\n";
    }
    for (const auto& e : ftg.edges) {
        out += "  \"" + e.source.hex() + "\" -> \"" + e.target.hex() + "\" [label=\"" + detail::dot_escape(e.trigger) +
               "\"";
        if (e.cross) out += ", style=dashed";
        out += "];\n";
    }
    out += "}\n";
    return out;
}

} // namespace deeplink
