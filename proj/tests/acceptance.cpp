// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of failed lines (capped), so ctest goes red on any failure.

#include "oracles.hpp"
#include "random_graphs.hpp"
#include "random_trees.hpp"
#include "random_values.hpp"
#include "support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

using namespace deeplink;
using namespace deeplink::testing;
using nlohmann::json;

namespace {

constexpr double coverageSeconds = 10.0;
constexpr double shortcutSeconds = 60.0;
constexpr int randomGraphs = 200;
constexpr std::size_t graphVertices = 10;
constexpr std::size_t graphParallel = 3;
constexpr int hashTrials = 1000;
constexpr int roundTrips = 1000;
constexpr int minCorpusModels = 6;

const std::string statistics = "com.ichi2.anki.Statistics";
const std::string boostMain = "com.apusapps.booster.BoostMainActivity";

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check)
{
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Selection anki_selection() { return selection_from_json(json::parse(read_file(corpus_path("anki.selection.json")))); }

/// Every activity as a target, plus the corpus's fragment selection for anki.
Selection full_selection(const std::string& name, const ShortcutTable& shortcuts)
{
    auto sel = select_all_activities(shortcuts);
    if (name == "anki") {
        const auto extra = anki_selection();
        sel.targets.insert(sel.targets.end(), extra.targets.begin(), extra.targets.end());
        sel.fragmentHints = extra.fragmentHints;
    }
    return sel;
}

ValueMap random_values(const DeepLinkTemplate& t, std::mt19937_64& rng)
{
    ValueMap values;
    for (const auto& p : t.parameters) values.emplace(p.name, random_value(p.type, rng));
    return values;
}

Outcome coverage()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    std::size_t models = 0, templates = 0, reached = 0, uncovered = 0;
    std::ostringstream problems;
    for (const auto* name : corpus_names) {
        ++models;
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        const auto& m = release(s, full_selection(name, s.shortcuts()));
        const auto paths = oracle::simple_paths(s.nav_graph(), s.nav_graph().vertices.size());
        for (const auto& [activity, list] : paths) {
            if (list.empty()) continue;
            const bool covered = std::any_of(m.templates.begin(), m.templates.end(),
                                             [&](const DeepLinkTemplate& t) { return t.activity == activity; });
            if (!covered) {
                ++uncovered;
                problems << " uncovered " << activity;
            }
        }
        for (const auto& t : m.templates) {
            ++templates;
            const auto trace = replay_template(model, t, random_values(t, rng));
            if (trace.reached() && verify_target(trace, t)) ++reached;
            else problems << " failed " << t.id() << " (" << trace.failure << ")";
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << models << " models, " << templates << " templates, " << reached << " reached, " << uncovered
      << " uncovered activities, " << secs << " s" << problems.str();
    return {models >= minCorpusModels && uncovered == 0 && reached == templates && secs < coverageSeconds, d.str()};
}

Outcome shortcut_optimality()
{
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::size_t pairs = 0, agree = 0;
    for (int i = 0; i < randomGraphs; ++i) {
        const auto g = random_graph(rng, {graphVertices, graphParallel, 0.22, i % 2 == 0});
        const auto table = compute_shortcuts(g);
        const auto ref = oracle::shortcuts(g, g.vertices.size());
        for (const auto& v : g.vertices) {
            const auto& expected = ref.at(v);
            const auto it = table.byActivity.find(v);
            const std::size_t got = it == table.byActivity.end() ? 0 : it->second.size();
            for (std::size_t k = 0; k < expected.size(); ++k) {
                ++pairs;
                if (k < got && render_edges(it->second[k].original) == expected[k].first.edges &&
                    render_edges(it->second[k].chosen) == expected[k].second.edges)
                    ++agree;
            }
            pairs += got > expected.size() ? got - expected.size() : 0;
        }
    }
    const double secs = seconds_since(t0);
    std::ostringstream d;
    d << agree << "/" << pairs << " (vertex, path) pairs agree over " << randomGraphs << " graphs, " << secs << " s";
    return {pairs > 0 && agree == pairs && secs < shortcutSeconds, d.str()};
}

Outcome crawl_accuracy()
{
    std::ostringstream d;
    bool ok = true;
    std::size_t clean = 0;
    for (const auto* name : corpus_names) {
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        for (const auto& a : model->activities) {
            if (a.name == statistics || a.name == boostMain) continue;
            if (unique_shortcuts(s.shortcuts(), a.name).empty()) continue;
            const auto g = crawl_ftg(session_factory(model), a.name, s.default_entry(a.name));
            const auto acc = oracle::crawl_accuracy(g, oracle::reachable_screens(a, a.rootScreen));
            ++clean;
            if (acc.recall != 1.0 || acc.precision != 1.0) {
                ok = false;
                d << a.name << " recall " << acc.recall << " precision " << acc.precision << "; ";
            }
        }
    }
    d << clean << " clean activities at 100%/100%";

    auto measure = [](const std::string& corpus, const std::string& activity) {
        const auto model = corpus_ptr(corpus);
        AnalysisSession s(*model);
        s.analyze();
        const auto g = crawl_ftg(session_factory(model), activity, s.default_entry(activity));
        const auto& a = model->activity(activity);
        return oracle::crawl_accuracy(g, oracle::reachable_screens(a, a.rootScreen));
    };
    const auto missing = measure("anki", statistics);
    const auto popup = measure("booster", boostMain);
    d << "; missing ids recall " << missing.recall << " precision " << missing.precision << "; popups recall "
      << popup.recall << " precision " << popup.precision;
    ok = ok && missing.recall < 1.0 && missing.precision == 1.0 && popup.recall == 1.0 && popup.precision < 1.0;
    return {ok, d.str()};
}

Outcome hash_properties()
{
    std::mt19937_64 rng(99);
    int stable = 0, changed = 0;
    for (int i = 0; i < hashTrials; ++i) {
        const auto tree = random_tree(rng);
        stable += tree_hash(tree) == tree_hash(permuted(tree, rng));
    }
    for (int i = 0; i < hashTrials; ++i) {
        const auto tree = random_tree(rng);
        changed += tree_hash(tree) != tree_hash(mutated(tree, rng));
    }
    std::ostringstream d;
    d << stable << "/" << hashTrials << " permutations stable, " << changed << "/" << hashTrials << " mutations detected";
    return {stable == hashTrials && changed == hashTrials, d.str()};
}

Outcome dependency_soundness()
{
    const auto model = corpus_ptr("motivating");
    const auto direct = direct_to_b_manifest(*model);
    const auto& dt = direct.templates.front();
    const auto bad = replay_template(model, dt, {{"foo", std::int64_t{1}}});

    AnalysisSession s(*model);
    s.analyze();
    const auto& m = release(s, select_all_activities(s.shortcuts()));
    const DeepLinkTemplate* generated = nullptr;
    for (const auto& t : m.templates)
        if (t.activity == "B") generated = &t;
    if (!generated) return {false, "no generated template for B"};
    std::mt19937_64 rng(3);
    const auto good = replay_template(model, *generated, random_values(*generated, rng));

    std::ostringstream d;
    d << "direct link " << to_string(bad.verdict) << "(" << bad.failure << "), generated " << generated->id() << " "
      << to_string(good.verdict) << " in " << good.step_count() << " steps";
    return {bad.verdict == Verdict::Failed && bad.failure == "UnsetDependency" && good.reached() &&
                verify_target(good, *generated),
            d.str()};
}

Outcome link_round_trip()
{
    std::vector<ReleaseManifest> manifests;
    for (const auto* name : corpus_names) {
        AnalysisSession s(corpus_model(name));
        s.analyze();
        manifests.push_back(release(s, full_selection(name, s.shortcuts())));
    }
    std::vector<std::pair<const ReleaseManifest*, const DeepLinkTemplate*>> pool;
    for (const auto& m : manifests)
        for (const auto& t : m.templates) pool.emplace_back(&m, &t);

    std::mt19937_64 rng(1000);
    int ok = 0;
    for (int i = 0; i < roundTrips; ++i) {
        const auto& [m, t] = pool[rng() % pool.size()];
        const auto values = random_values(*t, rng);
        try {
            const auto link = parse_deep_link(*m, render_link(*t, values));
            ok += link.templateId == t->id() && link.values == values && link.fragment == t->fragment;
        } catch (const Error&) {
        }
    }
    std::ostringstream d;
    d << ok << "/" << roundTrips << " links round-trip over " << pool.size() << " templates";
    return {ok == roundTrips, d.str()};
}

Outcome overhead()
{
    std::mt19937_64 rng(13);
    std::size_t replaced = 0, within = 0;
    std::ostringstream problems;
    for (const auto* name : corpus_names) {
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        for (const auto& [activity, row] : s.shortcuts().byActivity)
            for (const auto& sc : row) {
                if (sc.chosen == sc.original) continue;
                ++replaced;
                const auto shortcut = make_template(*model, sc.chosen);
                const auto original = make_template(*model, sc.original);
                const auto values = random_values(original, rng);
                const auto a = replay_template(model, shortcut, values);
                const auto b = replay_template(model, original, values);
                const auto originalSteps = b.reached() ? b.step_count() : original.intentSequence.size();
                if (a.reached() && a.step_count() <= originalSteps) ++within;
                else problems << " " << render(sc.original);
            }
    }
    std::ostringstream d;
    d << within << "/" << replaced << " replaced paths replay in no more steps" << problems.str();
    return {replaced > 0 && within == replaced, d.str()};
}

Outcome manifest_detection()
{
    const auto model = corpus_model("petstore");
    const int with = count_declared_deep_links(model);
    auto stripped = model;
    for (auto& a : stripped.activities)
        for (auto& f : a.manifestFilters) f.categories.erase("android.intent.category.BROWSABLE");
    const int without = count_declared_deep_links(stripped);
    std::ostringstream d;
    d << "petstore declares " << with << ", " << without << " without BROWSABLE";
    return {with == 1 && without == 0, d.str()};
}

} // namespace

int main()
{
    report("coverage", coverage);
    report("shortcut-optimality", shortcut_optimality);
    report("crawl-accuracy", crawl_accuracy);
    report("hash-properties", hash_properties);
    report("dependency-soundness", dependency_soundness);
    report("link-round-trip", link_round_trip);
    report("shortcut-overhead", overhead);
    report("manifest-detection", manifest_detection);
    return std::min(failures, 125);
}
