#pragma once

// Replay engine: runs a template's intents and then its actions on a fresh
// simulator session and records what happened. Failures end up in the
// trace verdict instead of propagating.

#include "deeplink/linker.hpp"
#include "deeplink/simulator.hpp"
#include "deeplink/structure_hash.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace deeplink {

enum class Verdict { ReachedActivity, ReachedFragment, Failed };

constexpr std::string_view to_string(Verdict v) noexcept
{
    switch (v) {
    case Verdict::ReachedActivity: return "ReachedActivity";
    case Verdict::ReachedFragment: return "ReachedFragment";
    case Verdict::Failed: return "Failed";
    }
    return "Failed";
}

struct ReplayStep {
    std::string kind;   // launch | intent | action
    std::string detail; // target activity or clicked view
    ValueMap values;
    std::string activity;
    std::string screen;
    StructureHash treeHash;

    bool operator==(const ReplayStep&) const = default;
};

struct ReplayTrace {
    std::string templateId;
    std::vector<ReplayStep> steps;
    std::string finalActivity;
    std::string finalScreen;
    StructureHash finalTreeHash;
    Verdict verdict = Verdict::Failed;
    std::string failure; // error code name when verdict is Failed
    std::string failureMessage;

    bool operator==(const ReplayTrace&) const = default;

    std::size_t step_count() const noexcept { return steps.size(); }
    bool reached() const noexcept { return verdict != Verdict::Failed; }
};

namespace detail {

inline void record(ReplayTrace& trace, const SimSession& s, std::string kind, std::string detail, ValueMap values = {})
{
    const auto tree = s.current_view_tree();
    trace.steps.push_back(
        {std::move(kind), std::move(detail), std::move(values), s.current_activity(), s.current_screen(), tree_hash(tree)});
}

} // namespace detail

/// Replays `t` with parameter `values` from a fresh launch.
inline ReplayTrace replay_template(const ModelPtr& model, const DeepLinkTemplate& t, const ValueMap& values)
{
    ReplayTrace trace;
    trace.templateId = t.id();
    auto fail = [&](std::string code, std::string message) {
        trace.verdict = Verdict::Failed;
        trace.failure = std::move(code);
        trace.failureMessage = std::move(message);
    };
    try {
        auto session = SimSession::launch(model);
        detail::record(trace, session, "launch", session.current_activity());
        if (t.intentSequence.empty() || t.intentSequence.front().target != session.current_activity()) {
            fail("Divergence", "template does not start at the main activity");
            return trace;
        }
        for (std::size_t i = 1; i < t.intentSequence.size(); ++i) {
            const auto& intent = t.intentSequence[i];
            ValueMap args;
            for (const auto& l : intent.extras()) {
                if (auto p = t.pinned.find(l.name); p != t.pinned.end()) args.insert(*p);
                else if (auto v = values.find(l.name); v != values.end()) args.insert(*v);
            }
            try {
                session.send_intent(intent, args);
            } catch (const Error& e) {
                fail(std::string(to_string(e.code())), e.message());
                break;
            }
            detail::record(trace, session, "intent", intent.target, args);
            if (session.current_activity() != intent.target) {
                fail("Divergence", "expected " + intent.target + ", got " + session.current_activity());
                break;
            }
        }
        if (trace.failure.empty()) {
            for (const auto& action : t.actionSequence) {
                try {
                    session.click(action);
                } catch (const Error& e) {
                    fail(std::string(to_string(e.code())), e.message());
                    break;
                }
                detail::record(trace, session, "action", action);
            }
        }
        trace.finalActivity = session.current_activity();
        trace.finalScreen = session.current_screen();
        trace.finalTreeHash = tree_hash(session.current_view_tree());
        if (!trace.failure.empty()) return trace;
        if (trace.finalActivity != t.activity) {
            fail("Divergence", "ended on " + trace.finalActivity + " instead of " + t.activity);
            return trace;
        }
        trace.verdict = t.fragment ? Verdict::ReachedFragment : Verdict::ReachedActivity;
    } catch (const Error& e) {
        fail(std::string(to_string(e.code())), e.message());
    }
    return trace;
}

inline ReplayTrace replay_deep_link(const ModelPtr& model, const ReleaseManifest& manifest, const DeepLink& link)
{
    if (const auto* t = manifest.find(link.templateId)) return replay_template(model, *t, link.values);
    ReplayTrace trace;
    trace.templateId = link.templateId;
    trace.failure = std::string(to_string(ErrorCode::NoMatchingTemplate));
    trace.failureMessage = "no template " + link.templateId;
    return trace;
}

/// True when the trace ended on the template's activity and, for fragment
/// targets, on the expected tree hash (the template's recorded one unless
/// `expectedHash` overrides it).
inline bool verify_target(const ReplayTrace& trace, const DeepLinkTemplate& t,
                          std::optional<StructureHash> expectedHash = std::nullopt)
{
    if (!trace.reached() || trace.finalActivity != t.activity) return false;
    if (!t.fragment) return true;
    const auto expected = expectedHash ? expectedHash : t.fragmentHash;
    return expected && trace.finalTreeHash == *expected;
}

inline nlohmann::json to_json(const ReplayStep& s)
{
    nlohmann::json j{{"kind", s.kind},     {"detail", s.detail},         {"activity", s.activity},
                     {"screen", s.screen}, {"treeHash", s.treeHash.hex()}};
    if (!s.values.empty()) j["values"] = values_to_json(s.values);
    return j;
}

inline nlohmann::json summary_json(const ReplayTrace& t)
{
    nlohmann::json j{{"templateId", t.templateId},
                     {"verdict", std::string(to_string(t.verdict))},
                     {"finalActivity", t.finalActivity},
                     {"finalScreen", t.finalScreen},
                     {"finalTreeHash", t.finalTreeHash.hex()},
                     {"stepCount", t.step_count()}};
    if (!t.failure.empty()) j["failure"] = {{"reason", t.failure}, {"message", t.failureMessage}};
    return j;
}

inline nlohmann::json to_json(const ReplayTrace& t)
{
    auto j = summary_json(t);
    j["steps"] = nlohmann::json::array();
    for (const auto& s : t.steps) j["steps"].push_back(to_json(s));
    return j;
}

/// One line per step followed by a summary line.
inline std::string trace_jsonl(const ReplayTrace& t)
{
    std::string out;
    for (const auto& s : t.steps) out += to_json(s).dump() + "\n";
    out += summary_json(t).dump() + "\n";
    return out;
}

} // namespace deeplink
