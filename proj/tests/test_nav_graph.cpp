#include "oracles.hpp"
#include "random_graphs.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace deeplink;
using namespace deeplink::testing;

namespace {

NavEdge edge(const std::string& from, const std::string& to, LabelSet labels)
{
    return {from, to, IntentDecl{to, std::move(labels), {}}, EdgeOrigin::Declared};
}

NavGraph graph(std::vector<std::string> vertices, std::vector<NavEdge> edges, std::string start = "S")
{
    NavGraph g{std::move(vertices), std::move(edges), std::move(start)};
    std::sort(g.vertices.begin(), g.vertices.end());
    normalize_edges(g.edges);
    return g;
}

const std::string wsMain = "com.wallstreetcn.news.MainActivity";
const std::string wsTopic = "com.wallstreetcn.news.NewsTopicActivity";
const std::string wsDetail = "com.wallstreetcn.news.NewsDetailActivity";

std::set<std::string> names_of(const LabelSet& labels)
{
    std::set<std::string> out;
    for (const auto& l : labels)
        if (l.is_extra()) out.insert(l.name);
    return out;
}

} // namespace

TEST(NavGraphBuild, MotivatingExample)
{
    const auto g = build_nav_graph(corpus_model("motivating"));
    EXPECT_EQ(g.vertices, (std::vector<std::string>{"A", "B", "Main"}));
    EXPECT_EQ(g.start, "Main");
    ASSERT_EQ(g.edges.size(), 2u);
    EXPECT_EQ(render(g.edges[0]), "A->B{extra:foo:int}");
    EXPECT_EQ(render(g.edges[1]), "Main->A{extra:p1:text}");
}

TEST(NavGraphBuild, WallstreetHasTwoInboundEdgesToDetail)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const auto in = g.in_edges(wsDetail);
    ASSERT_EQ(in.size(), 2u);
    std::set<std::string> sources{in[0]->from, in[1]->from};
    EXPECT_EQ(sources, (std::set<std::string>{wsMain, wsTopic}));
}

TEST(NavGraphBuild, SingleActivity)
{
    const auto g = build_nav_graph(corpus_model("minimal"));
    EXPECT_EQ(g.vertices, std::vector<std::string>{"Home"});
    EXPECT_TRUE(g.edges.empty());
}

TEST(NavGraphBuild, ExternallyLaunchableActivityGetsStartEdge)
{
    const auto m = corpus_model("npr");
    const auto g = build_nav_graph(m);
    const std::string widget = "org.npr.android.news.WidgetConfigActivity";
    const auto in = g.in_edges(widget);
    ASSERT_EQ(in.size(), 1u);
    EXPECT_EQ(in[0]->from, g.start);
    EXPECT_EQ(in[0]->origin, EdgeOrigin::External);
    // Playlist is external too, but already has an inbound edge.
    for (const auto* e : g.in_edges("org.npr.android.news.PlaylistActivity")) EXPECT_EQ(e->origin, EdgeOrigin::Declared);
}

TEST(NavGraphBuild, UnreachableActivityIsReported)
{
    auto m = corpus_model("motivating");
    ActivityDecl orphan;
    orphan.name = "Orphan";
    orphan.rootScreen = "root";
    orphan.screens.emplace("root", ScreenDecl{"root", ViewNode{"FrameLayout", std::nullopt, {}}, {}});
    m.activities.push_back(orphan);
    try {
        build_nav_graph(m);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnreachableActivity);
        EXPECT_EQ(e.detail(), "Orphan");
    }
    m.activities.back().externallyLaunchable = true;
    EXPECT_NO_THROW(build_nav_graph(m));
}

TEST(NavGraphBuild, DuplicateIntentsCollapse)
{
    auto g = graph({"S", "X"}, {edge("S", "X", {extra_label("a", ValueType::Int)}),
                                edge("S", "X", {extra_label("a", ValueType::Int)}),
                                edge("S", "X", {extra_label("a", ValueType::Text)})});
    EXPECT_EQ(g.edges.size(), 2u);
}

TEST(NavGraphBuild, EveryVertexReachableInCorpus)
{
    for (const auto* name : corpus_names) {
        const auto g = build_nav_graph(corpus_model(name));
        EXPECT_EQ(reachable_from_start(g).size(), g.vertices.size()) << name;
    }
}

TEST(PathEnumeration, MotivatingPathToB)
{
    const auto g = build_nav_graph(corpus_model("motivating"));
    const auto paths = enumerate_paths(g, "B");
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(render(paths[0]), "<launch>->Main{action:android.intent.action.MAIN,category:android.intent.category."
                                "LAUNCHER} ; Main->A{extra:p1:text} ; A->B{extra:foo:int}");
    EXPECT_EQ(paths[0].length(), 3u);
}

TEST(PathEnumeration, StartHasOnlyLaunchPath)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const auto paths = enumerate_paths(g, g.start);
    ASSERT_EQ(paths.size(), 1u);
    EXPECT_EQ(paths[0].length(), 1u);
    EXPECT_EQ(paths[0].transitions[0].origin, EdgeOrigin::Launch);
    EXPECT_EQ(path_labels(paths[0]), launch_labels());
}

TEST(PathEnumeration, DiamondHasTwoOrderedPaths)
{
    const auto g = graph({"S", "X", "Y", "Z"}, {edge("S", "Y", {}), edge("S", "X", {}), edge("Y", "Z", {}),
                                                edge("X", "Z", {})});
    const auto paths = enumerate_paths(g, "Z");
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(paths[0].length(), 3u);
    EXPECT_EQ(paths[1].length(), 3u);
    EXPECT_EQ(paths[0].transitions[1].to, "X");
    EXPECT_EQ(paths[1].transitions[1].to, "Y");
    const auto ref = oracle::simple_paths(g, g.vertices.size()).at("Z");
    ASSERT_EQ(ref.size(), 2u);
    EXPECT_EQ(render_edges(paths[0]), ref[0].edges);
    EXPECT_EQ(render_edges(paths[1]), ref[1].edges);
}

TEST(PathEnumeration, UnknownVertexIsNoSuchTarget)
{
    const auto g = build_nav_graph(corpus_model("motivating"));
    EXPECT_THROW(enumerate_paths(g, "Z"), Error);
}

TEST(PathEnumeration, MaxLenBoundsPaths)
{
    const auto g = build_nav_graph(corpus_model("motivating"));
    EXPECT_TRUE(enumerate_paths(g, "B", {2, false}).empty());
    EXPECT_EQ(enumerate_paths(g, "A", {2, false}).size(), 1u);
}

TEST(PathEnumeration, OpaqueEdgesExcludedByDefault)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const std::string share = "com.wallstreetcn.news.ShareActivity";
    EXPECT_TRUE(enumerate_paths(g, share).empty());
    EXPECT_FALSE(enumerate_paths(g, share, {0, true}).empty());
}

TEST(PathEnumeration, ParallelEdgesAreExpanded)
{
    const auto g = graph({"S", "X"}, {edge("S", "X", {extra_label("a", ValueType::Int)}),
                                      edge("S", "X", {extra_label("b", ValueType::Int)})});
    EXPECT_EQ(enumerate_paths(g, "X").size(), 2u);
}

TEST(PathLabels, WallstreetDirectPath)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const auto paths = enumerate_paths(g, wsDetail);
    ASSERT_EQ(paths.size(), 2u);
    EXPECT_EQ(names_of(path_labels(paths[0])), (std::set<std::string>{"nid", "image_url", "news_type"}));
}

TEST(PathLabels, UnionEqualsFoldOverEdges)
{
    std::mt19937_64 rng(3);
    for (int i = 0; i < 30; ++i) {
        const auto g = random_graph(rng, {8, 3, 0.3, false});
        for (const auto& [v, paths] : enumerate_all_paths(g))
            for (const auto& p : paths) {
                LabelSet fold;
                for (const auto& t : p.transitions)
                    for (const auto& l : t.labels()) fold.insert(l);
                EXPECT_EQ(path_labels(p), fold);
            }
    }
}

TEST(CanReplace, WallstreetDirectReplacesTopicRoute)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const auto paths = enumerate_paths(g, wsDetail);
    EXPECT_TRUE(can_replace(paths[0], paths[1]));
    EXPECT_FALSE(can_replace(paths[1], paths[0]));
    EXPECT_TRUE(can_replace(paths[1], paths[1]));
}

TEST(CanReplace, DisjointLabelsAndDifferentTargets)
{
    const auto g = graph({"S", "X", "Y"}, {edge("S", "X", {extra_label("a", ValueType::Int)}),
                                           edge("S", "X", {extra_label("b", ValueType::Int)}), edge("S", "Y", {})});
    const auto px = enumerate_paths(g, "X");
    EXPECT_FALSE(can_replace(px[0], px[1]));
    EXPECT_FALSE(can_replace(px[1], px[0]));
    try {
        can_replace(px[0], enumerate_paths(g, "Y")[0]);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DifferentTargets);
    }
}

TEST(CanReplace, IsAPreorder)
{
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        const auto g = random_graph(rng, {7, 3, 0.35, false});
        for (const auto& [v, paths] : enumerate_all_paths(g)) {
            for (const auto& a : paths) {
                EXPECT_TRUE(can_replace(a, a));
                for (const auto& b : paths)
                    for (const auto& c : paths)
                        if (can_replace(a, b) && can_replace(b, c)) {
                            EXPECT_TRUE(can_replace(a, c));
                        }
            }
        }
    }
}

TEST(Shortcuts, WallstreetTopicRouteUsesDirectPath)
{
    const auto g = build_nav_graph(corpus_model("wallstreet"));
    const auto table = compute_shortcuts(g);
    const auto& row = table.byActivity.at(wsDetail);
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(row[1].chosen, row[0].original);
    EXPECT_EQ(row[0].chosen, row[0].original);
    const auto unique = unique_shortcuts(table, wsDetail);
    ASSERT_EQ(unique.size(), 1u);
    EXPECT_EQ(unique[0].length(), 2u);
}

TEST(Shortcuts, SinglePathPerVertexMapsToItself)
{
    const auto g = build_nav_graph(corpus_model("motivating"));
    const auto table = compute_shortcuts(g);
    for (const auto& [v, row] : table.byActivity) {
        ASSERT_EQ(row.size(), 1u);
        EXPECT_EQ(row[0].chosen, row[0].original);
    }
}

TEST(Shortcuts, IncomparablePathsAreBothKept)
{
    const auto g = build_nav_graph(corpus_model("wikipedia"));
    const auto unique = unique_shortcuts(compute_shortcuts(g), "org.wikipedia.GalleryActivity");
    ASSERT_EQ(unique.size(), 2u);
    EXPECT_FALSE(is_subset(path_labels(unique[0]), path_labels(unique[1])));
    EXPECT_FALSE(is_subset(path_labels(unique[1]), path_labels(unique[0])));
}

TEST(Shortcuts, EqualLabelsShorterPathWins)
{
    // S->X->Y and S->Y carry the same labels; the shorter one replaces the longer.
    const auto a = extra_label("a", ValueType::Int);
    const auto g = graph({"S", "X", "Y"}, {edge("S", "X", {a}), edge("X", "Y", {}), edge("S", "Y", {a})});
    const auto table = compute_shortcuts(g);
    const auto& row = table.byActivity.at("Y");
    ASSERT_EQ(row.size(), 2u);
    EXPECT_EQ(row[1].chosen, row[0].original);
    EXPECT_EQ(row[0].original.length(), 2u);
}

TEST(Shortcuts, AgreeWithBruteForceOracle)
{
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 60; ++i) {
        const auto g = random_graph(rng, {8, 3, 0.25, i % 2 == 0});
        const auto table = compute_shortcuts(g);
        const auto ref = oracle::shortcuts(g, g.vertices.size());
        for (const auto& v : g.vertices) {
            const auto& row = table.byActivity.at(v);
            const auto& expected = ref.at(v);
            ASSERT_EQ(row.size(), expected.size()) << v;
            for (std::size_t k = 0; k < row.size(); ++k) {
                EXPECT_EQ(render_edges(row[k].original), expected[k].first.edges);
                EXPECT_EQ(render_edges(row[k].chosen), expected[k].second.edges);
            }
        }
    }
}

TEST(Shortcuts, ChosenPathInvariants)
{
    std::mt19937_64 rng(99);
    for (int i = 0; i < 40; ++i) {
        const auto g = random_graph(rng, {8, 3, 0.25, false});
        const auto table = compute_shortcuts(g);
        for (const auto& [v, row] : table.byActivity) {
            for (const auto& s : row) {
                EXPECT_EQ(s.chosen.target(), v);
                EXPECT_TRUE(can_replace(s.chosen, s.original));
                EXPECT_LE(s.chosen.length(), s.original.length());
                for (const auto& other : row)
                    if (other.original.length() < s.chosen.length()) {
                        EXPECT_FALSE(can_replace(other.original, s.original));
                    }
            }
        }
    }
}

TEST(Shortcuts, IndependentOfEdgeDeclarationOrder)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 30; ++i) {
        auto g = random_graph(rng, {8, 3, 0.25, false});
        const auto expected = compute_shortcuts(g);
        std::shuffle(g.edges.begin(), g.edges.end(), rng);
        normalize_edges(g.edges);
        EXPECT_EQ(compute_shortcuts(g), expected);
    }
}

TEST(Shortcuts, IncomparableOnlyVerticesKeepAtLeastTwo)
{
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        const auto g = random_graph(rng, {7, 3, 0.3, false});
        const auto table = compute_shortcuts(g);
        for (const auto& [v, row] : table.byActivity) {
            if (row.size() < 2) continue;
            bool incomparable = true;
            for (const auto& a : row)
                for (const auto& b : row)
                    if (!(a.original == b.original) && can_replace(a.original, b.original)) incomparable = false;
            if (incomparable) {
                EXPECT_GE(unique_shortcuts(table, v).size(), 2u);
            }
        }
    }
}

TEST(NavGraphExport, DotListsVerticesAndLabeledEdges)
{
    const auto dot = to_dot(build_nav_graph(corpus_model("motivating")));
    EXPECT_EQ(dot.rfind("digraph", 0), 0u);
    EXPECT_NE(dot.find("\"Main\" -> \"A\""), std::string::npos);
    EXPECT_NE(dot.find("extra:p1:text"), std::string::npos);
    const auto j = to_json(build_nav_graph(corpus_model("motivating")));
    EXPECT_EQ(j["vertices"].size(), 3u);
    EXPECT_EQ(j["edges"].size(), 2u);
}
