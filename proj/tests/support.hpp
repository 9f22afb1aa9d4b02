#pragma once

#include "deeplink/deeplink.hpp"

#include <memory>
#include <string>

namespace deeplink::testing {

inline std::string corpus_path(const std::string& file) { return std::string(DEEPLINK_CORPUS_DIR) + "/" + file; }

inline AppModel corpus_model(const std::string& name) { return load_app_model_file(corpus_path(name + ".app.json")); }

inline ModelPtr corpus_ptr(const std::string& name) { return std::make_shared<const AppModel>(corpus_model(name)); }

inline const char* const corpus_names[] = {"motivating", "petstore", "wallstreet", "anki",
                                           "booster",    "npr",      "wikipedia",  "minimal"};

inline ViewNode leaf(std::string tag, std::optional<std::string> id = std::nullopt)
{
    return ViewNode{std::move(tag), std::move(id), {}};
}

inline ViewNode node(std::string tag, std::optional<std::string> id, std::vector<ViewNode> children)
{
    return ViewNode{std::move(tag), std::move(id), std::move(children)};
}

/// A hand-written manifest for the motivating example whose only template
/// sends one intent straight to B, skipping A.
inline ReleaseManifest direct_to_b_manifest(const AppModel& m)
{
    IntentDecl toB{"B", {extra_label("foo", ValueType::Int)}, {}};
    Path direct{{launch_edge(m.mainActivity), NavEdge{m.mainActivity, "B", toB, EdgeOrigin::Declared}}};
    return {m.packageName, model_digest(m), {make_template(m, direct)}};
}

} // namespace deeplink::testing
