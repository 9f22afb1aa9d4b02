#pragma once

// One analysis workflow over one model: analyze, crawl, select, release,
// replay. Shared by the CLI and the HTTP service so both produce the same
// artifacts.

#include "deeplink/app_model.hpp"
#include "deeplink/linker.hpp"
#include "deeplink/nav_graph.hpp"
#include "deeplink/replay.hpp"
#include "deeplink/ui_crawl.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace deeplink {

/// The on-disk and over-the-wire form of every JSON artifact.
inline std::string artifact_text(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// Shortcut summary of one activity.
inline nlohmann::json shortcuts_json(const ShortcutTable& table, const std::string& activity)
{
    nlohmann::json unique = nlohmann::json::array();
    for (const auto& p : unique_shortcuts(table, activity)) unique.push_back(to_json(p));
    nlohmann::json replaced = nlohmann::json::array();
    std::size_t paths = 0;
    if (auto it = table.byActivity.find(activity); it != table.byActivity.end()) {
        paths = it->second.size();
        for (const auto& s : it->second)
            if (!(s.chosen == s.original))
                replaced.push_back({{"original", render(s.original)}, {"shortcut", render(s.chosen)}});
    }
    return {{"activity", activity}, {"paths", paths}, {"uniqueShortcuts", unique}, {"replacements", replaced}};
}

class AnalysisSession {
public:
    explicit AnalysisSession(AppModel model) : model_(std::make_shared<const AppModel>(std::move(model))) {}

    const AppModel& model() const noexcept { return *model_; }
    const ModelPtr& model_ptr() const noexcept { return model_; }

    /// Builds the navigation graph and the shortcut table.
    void analyze(PathOptions opts = {})
    {
        graph_ = build_nav_graph(*model_);
        shortcuts_ = compute_shortcuts(*graph_, opts);
        ftgs_.clear();
        selection_.reset();
        manifest_.reset();
    }

    bool analyzed() const noexcept { return graph_.has_value(); }

    const NavGraph& nav_graph() const
    {
        require(analyzed(), "the model has not been analyzed yet");
        return *graph_;
    }

    const ShortcutTable& shortcuts() const
    {
        require(analyzed(), "the model has not been analyzed yet");
        return *shortcuts_;
    }

    /// Accepts a full activity name or a unique simple name.
    std::string resolve_activity(const std::string& name) const
    {
        if (model_->find(name)) return name;
        std::optional<std::string> hit;
        for (const auto& a : model_->activities)
            if (simple_name(a.name) == name) {
                if (hit) throw Error(ErrorCode::AmbiguousTarget, "several activities are named " + name, name);
                hit = a.name;
            }
        if (!hit) throw Error(ErrorCode::NoSuchTarget, "no activity '" + name + "'", name);
        return *hit;
    }

    nlohmann::json report() const
    {
        const auto& g = nav_graph();
        nlohmann::json activities = nlohmann::json::array();
        for (const auto& v : g.vertices) activities.push_back(shortcuts_json(*shortcuts_, v));
        return {{"packageName", model_->packageName},
                {"modelDigest", model_digest(*model_)},
                {"declaredDeepLinks", count_declared_deep_links(*model_)},
                {"notReplayable", validate_replayability(*model_)},
                {"navGraph", to_json(g)},
                {"activities", activities}};
    }

    /// Entry script through the activity's first unique shortcut.
    EntryScript default_entry(const std::string& activity) const
    {
        const auto paths = unique_shortcuts(shortcuts(), activity);
        if (paths.empty())
            throw Error(ErrorCode::NotReplayable, activity + " cannot be reached with basic-typed intents", activity);
        return entry_script_for(paths.front());
    }

    const FragmentTransitionGraph& crawl(const std::string& activity, const EntryScript& entry, CrawlOptions opts = {})
    {
        require(analyzed(), "crawling needs an analyzed model");
        const auto name = resolve_activity(activity);
        auto ftg = crawl_ftg(session_factory(model_), name, entry, opts);
        manifest_.reset();
        return ftgs_.insert_or_assign(name, std::move(ftg)).first->second;
    }

    const FragmentTransitionGraph& ftg(const std::string& activity) const
    {
        const auto name = resolve_activity(activity);
        auto it = ftgs_.find(name);
        if (it == ftgs_.end()) throw Error(ErrorCode::NotCrawled, name + " has not been crawled", name);
        return it->second;
    }

    const std::map<std::string, FragmentTransitionGraph>& ftgs() const noexcept { return ftgs_; }

    /// FTG document with names taken from the current selection's hints.
    nlohmann::json ftg_json(const std::string& activity) const
    {
        const auto& graph = ftg(activity);
        FragmentHints hints;
        if (selection_)
            if (auto it = selection_->fragmentHints.find(graph.activity); it != selection_->fragmentHints.end())
                hints = it->second;
        return to_json(graph, name_fragments(graph, hints));
    }

    void select(Selection selection)
    {
        require(analyzed(), "selecting targets needs an analyzed model");
        for (auto& t : selection.targets) t.activity = resolve_activity(t.activity);
        decltype(selection.entryScripts) entries;
        for (auto& [a, e] : selection.entryScripts) entries.emplace(resolve_activity(a), std::move(e));
        selection.entryScripts = std::move(entries);
        decltype(selection.fragmentHints) hints;
        for (auto& [a, h] : selection.fragmentHints) hints.emplace(resolve_activity(a), std::move(h));
        selection.fragmentHints = std::move(hints);
        selection_ = std::move(selection);
        manifest_.reset();
    }

    const std::optional<Selection>& selection() const noexcept { return selection_; }

    const ReleaseManifest& build_manifest()
    {
        require(selection_.has_value(), "no selection has been made");
        manifest_ = build_templates(*model_, *shortcuts_, ftgs_, *selection_);
        return *manifest_;
    }

    const ReleaseManifest& manifest() const
    {
        require(manifest_.has_value(), "no manifest has been built");
        return *manifest_;
    }

    /// Parses `uri` against the manifest and replays it; the trace is kept.
    const ReplayTrace& replay(const std::string& uri)
    {
        const auto& m = manifest();
        auto link = parse_deep_link(m, uri);
        traces_.push_back(replay_deep_link(model_, m, link));
        return traces_.back();
    }

    const std::vector<ReplayTrace>& traces() const noexcept { return traces_; }

    /// Everything produced so far, for saving to disk.
    nlohmann::json snapshot() const
    {
        nlohmann::json j{{"model", to_json(*model_)}};
        if (analyzed()) j["report"] = report();
        j["ftgs"] = nlohmann::json::object();
        for (const auto& [a, g] : ftgs_) j["ftgs"][a] = ftg_json(a);
        if (selection_) j["selection"] = to_json(*selection_);
        if (manifest_) j["manifest"] = to_json(*manifest_);
        j["traces"] = nlohmann::json::array();
        for (const auto& t : traces_) j["traces"].push_back(to_json(t));
        return j;
    }

private:
    static void require(bool ok, const char* message)
    {
        if (!ok) throw Error(ErrorCode::StepOrder, message);
    }

    ModelPtr model_;
    std::optional<NavGraph> graph_;
    std::optional<ShortcutTable> shortcuts_;
    std::map<std::string, FragmentTransitionGraph> ftgs_;
    std::optional<Selection> selection_;
    std::optional<ReleaseManifest> manifest_;
    std::vector<ReplayTrace> traces_;
};

/// Runs the crawls a selection needs (entry scripts from the selection, or
/// through the first unique shortcut) and builds the manifest.
inline const ReleaseManifest& release(AnalysisSession& session, const Selection& selection, CrawlOptions opts = {})
{
    if (!session.analyzed()) session.analyze();
    session.select(selection);
    const auto& chosen = *session.selection();
    std::set<std::string> crawled;
    for (const auto& t : chosen.targets) {
        if (!t.fragment || !crawled.insert(t.activity).second) continue;
        auto e = chosen.entryScripts.find(t.activity);
        session.crawl(t.activity, e != chosen.entryScripts.end() ? e->second : session.default_entry(t.activity),
                      opts);
    }
    return session.build_manifest();
}

} // namespace deeplink
