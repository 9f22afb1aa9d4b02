#include "random_values.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace deeplink;
using namespace deeplink::testing;
using nlohmann::json;

namespace {

Selection anki_selection() { return selection_from_json(json::parse(read_file(corpus_path("anki.selection.json")))); }

ValueMap random_values(const DeepLinkTemplate& t, std::mt19937_64& rng)
{
    ValueMap values;
    for (const auto& p : t.parameters) values.emplace(p.name, random_value(p.type, rng));
    return values;
}

} // namespace

TEST(Replay, AnkiTagsFragment)
{
    AnalysisSession s(corpus_model("anki"));
    release(s, anki_selection());
    const auto& trace = s.replay("http://anki.ichi2.com/NoteEditor?CALLER=3#tags");
    EXPECT_EQ(trace.verdict, Verdict::ReachedFragment);
    ASSERT_EQ(trace.steps.size(), 3u);
    EXPECT_EQ(trace.steps[0].kind, "launch");
    EXPECT_EQ(trace.steps[1].kind, "intent");
    EXPECT_EQ(trace.steps[1].detail, "com.ichi2.anki.NoteEditor");
    EXPECT_EQ(std::get<std::int64_t>(trace.steps[1].values.at("CALLER")), 3);
    EXPECT_EQ(trace.steps[2].kind, "action");
    EXPECT_EQ(trace.steps[2].detail, "CardEditorTagButton");
    EXPECT_EQ(trace.finalScreen, "tags");
    EXPECT_TRUE(verify_target(trace, *s.manifest().find(trace.templateId)));
}

TEST(Replay, MainActivityIsLaunchOnly)
{
    AnalysisSession s(corpus_model("anki"));
    release(s, anki_selection());
    const auto& trace = s.replay("http://anki.ichi2.com/DeckPicker");
    EXPECT_EQ(trace.verdict, Verdict::ReachedActivity);
    ASSERT_EQ(trace.steps.size(), 1u);
    EXPECT_EQ(trace.steps[0].kind, "launch");
}

TEST(Replay, DirectLinkToBMissesItsDependency)
{
    const auto model = corpus_ptr("motivating");
    const auto direct = direct_to_b_manifest(*model);
    const auto uri = render_link(direct.templates[0], {{"foo", std::int64_t{1}}});
    const auto bad = replay_deep_link(model, direct, parse_deep_link(direct, uri));
    EXPECT_EQ(bad.verdict, Verdict::Failed);
    EXPECT_EQ(bad.failure, "UnsetDependency");
    EXPECT_FALSE(verify_target(bad, direct.templates[0]));

    AnalysisSession s(*model);
    s.analyze();
    const auto& m = release(s, select_all_activities(s.shortcuts()));
    const auto* generated = m.find("http://motivating.example.com/B?foo={foo}&p1={p1}");
    ASSERT_NE(generated, nullptr);
    EXPECT_EQ(generated->intentSequence.size(), 3u);
    const auto goodUri = render_link(*generated, {{"foo", std::int64_t{1}}, {"p1", std::string("s1")}});
    const auto good = replay_deep_link(model, m, parse_deep_link(m, goodUri));
    EXPECT_EQ(good.verdict, Verdict::ReachedActivity);
    EXPECT_TRUE(verify_target(good, *generated));
}

TEST(Replay, FailuresStayInTheTrace)
{
    const auto model = corpus_ptr("anki");
    AnalysisSession s(*model);
    const auto m = release(s, anki_selection());
    auto broken = *m.find("http://anki.ichi2.com/NoteEditor?CALLER={CALLER}#tags");
    broken.actionSequence = {"no_such_view"};
    const auto trace = replay_template(model, broken, {{"CALLER", std::int64_t{1}}});
    EXPECT_EQ(trace.verdict, Verdict::Failed);
    EXPECT_EQ(trace.failure, "NoSuchView");

    const auto mistyped = replay_template(model, broken, {{"CALLER", std::string("x")}});
    EXPECT_EQ(mistyped.failure, "TypeMismatch");

    const auto unknown = replay_deep_link(model, m, DeepLink{"http://nowhere/X", "http://nowhere/X", {}, std::nullopt});
    EXPECT_EQ(unknown.failure, "NoMatchingTemplate");
}

TEST(Replay, DivergenceTruncatesTheTrace)
{
    const auto model = corpus_ptr("motivating");
    AnalysisSession s(*model);
    s.analyze();
    const auto m = release(s, select_all_activities(s.shortcuts()));
    auto t = *m.find("http://motivating.example.com/B?foo={foo}&p1={p1}");
    t.intentSequence[1].target = "B";
    t.intentSequence[1].labels = {extra_label("foo", ValueType::Int)};
    const auto trace = replay_template(model, t, {{"foo", std::int64_t{1}}});
    EXPECT_EQ(trace.verdict, Verdict::Failed);
    EXPECT_LE(trace.steps.size(), 2u);
}

TEST(VerifyTarget, ActivityAndFragmentHash)
{
    AnalysisSession s(corpus_model("anki"));
    release(s, anki_selection());
    const auto& trace = s.replay("http://anki.ichi2.com/NoteEditor?CALLER=3#tags");
    const auto& t = *s.manifest().find(trace.templateId);
    EXPECT_TRUE(verify_target(trace, t));
    EXPECT_TRUE(verify_target(trace, t, trace.finalTreeHash));
    EXPECT_FALSE(verify_target(trace, t, s.ftg("NoteEditor").start));

    auto elsewhere = t;
    elsewhere.activity = "com.ichi2.anki.DeckPicker";
    EXPECT_FALSE(verify_target(trace, elsewhere));
}

TEST(VerifyTarget, PopupOverTheTargetScreenFailsTheHashCheck)
{
    const auto model = corpus_ptr("booster");
    const std::string boost = "com.apusapps.booster.BoostMainActivity";
    AnalysisSession s(*model);
    s.analyze();
    const auto& ftg = s.crawl(boost, s.default_entry(boost));
    const auto paths = unique_shortcuts(s.shortcuts(), boost);
    ASSERT_FALSE(paths.empty());

    // Target the plain screen, but reach it through a click that leaves a popup open.
    const auto t = make_template(*model, paths.front(), {}, FragmentTarget{"main", ftg.start, {"boost_now"}});
    const auto trace = replay_template(model, t, {});
    ASSERT_TRUE(trace.reached());

    const auto& decl = model->activity(boost);
    const auto& declared = decl.screens.at(trace.finalScreen).viewTree;
    const bool sameTree = trace.finalTreeHash == tree_hash(declared);
    EXPECT_FALSE(sameTree);
    EXPECT_EQ(verify_target(trace, t), sameTree);
}

TEST(Replay, IsDeterministic)
{
    std::mt19937_64 rng(11);
    for (const auto* name : corpus_names) {
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        const auto m = release(s, select_all_activities(s.shortcuts()));
        for (const auto& t : m.templates) {
            const auto values = random_values(t, rng);
            EXPECT_EQ(replay_template(model, t, values), replay_template(model, t, values)) << t.id();
        }
    }
}

TEST(Replay, StepCountMatchesTheTemplate)
{
    std::mt19937_64 rng(12);
    for (const auto* name : corpus_names) {
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        const auto m = std::string(name) == "anki" ? release(s, anki_selection())
                                                   : release(s, select_all_activities(s.shortcuts()));
        for (const auto& t : m.templates) {
            const auto trace = replay_template(model, t, random_values(t, rng));
            ASSERT_TRUE(trace.reached()) << t.id() << " " << trace.failure << " " << trace.failureMessage;
            EXPECT_TRUE(verify_target(trace, t)) << t.id();
            EXPECT_EQ(trace.step_count(), t.intentSequence.size() + t.actionSequence.size());
        }
    }
}

TEST(Replay, ShortcutsNeverTakeMoreSteps)
{
    std::mt19937_64 rng(13);
    for (const auto* name : corpus_names) {
        const auto model = corpus_ptr(name);
        AnalysisSession s(*model);
        s.analyze();
        for (const auto& [activity, row] : s.shortcuts().byActivity)
            for (const auto& sc : row) {
                if (sc.chosen == sc.original) continue;
                const auto shortcut = make_template(*model, sc.chosen);
                const auto original = make_template(*model, sc.original);
                ValueMap values = random_values(original, rng);
                const auto a = replay_template(model, shortcut, values);
                const auto b = replay_template(model, original, values);
                ASSERT_TRUE(a.reached()) << render(sc.chosen);
                EXPECT_LE(a.step_count(), b.reached() ? b.step_count() : original.intentSequence.size());
            }
    }
}

TEST(ReplayExport, JsonLinesEndWithSummary)
{
    AnalysisSession s(corpus_model("anki"));
    release(s, anki_selection());
    const auto& trace = s.replay("http://anki.ichi2.com/NoteEditor?CALLER=3#tags");
    const auto text = trace_jsonl(trace);
    std::vector<json> lines;
    std::size_t start = 0;
    for (auto nl = text.find('\n'); nl != std::string::npos; start = nl + 1, nl = text.find('\n', start))
        lines.push_back(json::parse(text.substr(start, nl - start)));
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0]["kind"], "launch");
    EXPECT_EQ(lines[1]["values"]["CALLER"], 3);
    EXPECT_EQ(lines[3]["verdict"], "ReachedFragment");
    EXPECT_EQ(lines[3]["stepCount"], 3);
    EXPECT_EQ(to_json(trace)["steps"].size(), 3u);
}
