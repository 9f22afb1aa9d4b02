#pragma once

// Declarative app model: activities, intents, screens and click handlers.
// Loaded from JSON (see docs/app-model.schema.json), validated once, and
// immutable afterwards.

#include "deeplink/error.hpp"
#include "deeplink/fnv.hpp"
#include "deeplink/values.hpp"
#include "deeplink/view_tree.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <compare>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace deeplink {

inline constexpr int model_format_version = 1;
inline constexpr std::string_view action_view = "android.intent.action.VIEW";
inline constexpr std::string_view category_browsable = "android.intent.category.BROWSABLE";
inline constexpr std::string_view action_main = "android.intent.action.MAIN";
inline constexpr std::string_view category_launcher = "android.intent.category.LAUNCHER";

enum class LabelKind { Action, Category, Data, Extra };

constexpr std::string_view to_string(LabelKind k) noexcept
{
    switch (k) {
    case LabelKind::Action: return "action";
    case LabelKind::Category: return "category";
    case LabelKind::Data: return "data";
    case LabelKind::Extra: return "extra";
    }
    return "extra";
}

/// One field of an intent. Only extras carry a value type.
struct Label {
    LabelKind kind = LabelKind::Extra;
    std::string name;
    std::optional<ValueType> valueType;

    auto operator<=>(const Label&) const = default;
    bool operator==(const Label&) const = default;

    bool is_extra() const noexcept { return kind == LabelKind::Extra; }
    bool is_opaque() const noexcept { return is_extra() && valueType == ValueType::Opaque; }
};

using LabelSet = std::set<Label>;

inline Label extra_label(std::string name, ValueType type)
{
    return {LabelKind::Extra, std::move(name), type};
}

inline std::string render(const Label& l)
{
    std::string out(to_string(l.kind));
    out += ':';
    out += l.name;
    if (l.valueType) {
        out += ':';
        out += to_string(*l.valueType);
    }
    return out;
}

inline std::string render(const LabelSet& labels)
{
    std::string out = "{";
    bool first = true;
    for (const auto& l : labels) {
        if (!first) out += ',';
        first = false;
        out += render(l);
    }
    out += '}';
    return out;
}

inline bool is_subset(const LabelSet& a, const LabelSet& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct ConstantBinding {
    Value value;
    bool operator==(const ConstantBinding&) const = default;
};

/// Copies the named parameter of the sending activity instance.
struct ForwardBinding {
    std::string param;
    bool operator==(const ForwardBinding&) const = default;
};

using Binding = std::variant<ConstantBinding, ForwardBinding>;

struct IntentDecl {
    std::string target;
    LabelSet labels;
    std::map<std::string, Binding> bindings;

    bool operator==(const IntentDecl&) const = default;

    bool has_opaque() const
    {
        return std::any_of(labels.begin(), labels.end(), [](const Label& l) { return l.is_opaque(); });
    }

    std::vector<Label> extras() const
    {
        std::vector<Label> out;
        for (const auto& l : labels)
            if (l.is_extra()) out.push_back(l);
        return out;
    }
};

struct StartActivity {
    IntentDecl intent;
    bool operator==(const StartActivity&) const = default;
};
struct ShowScreen {
    std::string screen;
    bool operator==(const ShowScreen&) const = default;
};
struct OpenPopup {
    ViewNode overlay;
    bool operator==(const OpenPopup&) const = default;
};
struct Noop {
    bool operator==(const Noop&) const = default;
};

using ClickEffect = std::variant<StartActivity, ShowScreen, OpenPopup, Noop>;

struct IntentFilterDecl {
    std::string action;
    std::set<std::string> categories;
    std::optional<std::string> dataScheme;
    std::optional<std::string> dataHost;

    bool operator==(const IntentFilterDecl&) const = default;

    bool is_deep_link() const
    {
        return action == action_view && categories.contains(std::string(category_browsable));
    }
};

/// Handlers are keyed by resource id, or by "@i/j" position for views
/// that have no id.
struct ScreenDecl {
    std::string name;
    ViewNode viewTree;
    std::map<std::string, ClickEffect> handlers;

    bool operator==(const ScreenDecl&) const = default;
};

struct ParamDecl {
    std::string name;
    ValueType type = ValueType::Text;
    bool operator==(const ParamDecl&) const = default;
};

struct ActivityDecl {
    std::string name;
    std::vector<IntentFilterDecl> manifestFilters;
    std::vector<ParamDecl> requiredParams;
    std::set<std::string> readsState;
    std::set<std::string> setsState;
    std::string rootScreen;
    std::map<std::string, ScreenDecl> screens;
    bool externallyLaunchable = false;

    bool operator==(const ActivityDecl&) const = default;

    const ScreenDecl& screen(std::string_view n) const
    {
        auto it = screens.find(std::string(n));
        if (it == screens.end())
            throw Error(ErrorCode::ValidationError, "no screen '" + std::string(n) + "' in " + name,
                        std::string(n));
        return it->second;
    }
};

/// Class name without the package prefix.
inline std::string simple_name(std::string_view activity)
{
    auto dot = activity.rfind('.');
    return std::string(dot == std::string_view::npos ? activity : activity.substr(dot + 1));
}

struct AppModel {
    std::string packageName;
    std::string mainActivity;
    std::set<std::string> stateVariables;
    std::vector<ActivityDecl> activities;

    bool operator==(const AppModel&) const = default;

    const ActivityDecl* find(std::string_view name) const
    {
        for (const auto& a : activities)
            if (a.name == name) return &a;
        return nullptr;
    }

    const ActivityDecl& activity(std::string_view name) const
    {
        if (auto* a = find(name)) return *a;
        throw Error(ErrorCode::NoSuchTarget, "no activity '" + std::string(name) + "'", std::string(name));
    }
};

using ModelPtr = std::shared_ptr<const AppModel>;

/// An intent declared by a click handler, with where it is declared.
struct DeclaredIntent {
    std::string source;
    std::string screen;
    std::string viewRef;
    const IntentDecl* intent;
};

/// Every startActivity handler in the model, in declaration order
/// (activities as listed, screens and handler keys sorted).
inline std::vector<DeclaredIntent> declared_intents(const AppModel& model)
{
    std::vector<DeclaredIntent> out;
    for (const auto& a : model.activities)
        for (const auto& [sname, screen] : a.screens)
            for (const auto& [key, effect] : screen.handlers)
                if (auto* s = std::get_if<StartActivity>(&effect))
                    out.push_back({a.name, sname, key, &s->intent});
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& j, const char* key, const std::string& where)
{
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorCode::ParseError, where + ": missing '" + key + "'", key);
    return j.at(key);
}

inline std::string require_string(const nlohmann::json& j, const char* key, const std::string& where)
{
    const auto& v = require(j, key, where);
    if (!v.is_string()) throw Error(ErrorCode::ParseError, where + ": '" + key + "' must be a string", key);
    return v.get<std::string>();
}

inline std::vector<std::string> string_list(const nlohmann::json& j, const char* key, const std::string& where)
{
    std::vector<std::string> out;
    if (!j.contains(key)) return out;
    const auto& v = j.at(key);
    if (!v.is_array()) throw Error(ErrorCode::ParseError, where + ": '" + key + "' must be an array", key);
    for (const auto& s : v) {
        if (!s.is_string())
            throw Error(ErrorCode::ParseError, where + ": '" + key + "' must hold strings", key);
        out.push_back(s.get<std::string>());
    }
    return out;
}

inline ValueType parse_type(const nlohmann::json& j, const std::string& where)
{
    auto t = require_string(j, "type", where);
    auto vt = value_type_from_string(t);
    if (!vt) throw Error(ErrorCode::ParseError, where + ": unknown value type '" + t + "'", t);
    return *vt;
}

} // namespace detail

inline nlohmann::json to_json(const IntentDecl& intent)
{
    nlohmann::json j;
    j["target"] = intent.target;
    auto cats = nlohmann::json::array();
    auto extras = nlohmann::json::array();
    for (const auto& l : intent.labels) {
        switch (l.kind) {
        case LabelKind::Action: j["action"] = l.name; break;
        case LabelKind::Category: cats.push_back(l.name); break;
        case LabelKind::Data: j["data"] = l.name; break;
        case LabelKind::Extra:
            extras.push_back({{"name", l.name}, {"type", std::string(to_string(*l.valueType))}});
            break;
        }
    }
    if (!cats.empty()) j["categories"] = cats;
    if (!extras.empty()) j["extras"] = extras;
    if (!intent.bindings.empty()) {
        auto b = nlohmann::json::object();
        for (const auto& [name, binding] : intent.bindings) {
            if (auto* c = std::get_if<ConstantBinding>(&binding))
                b[name] = {{"const", value_to_json(c->value)}};
            else
                b[name] = {{"forward", std::get<ForwardBinding>(binding).param}};
        }
        j["bindings"] = b;
    }
    return j;
}

inline IntentDecl intent_from_json(const nlohmann::json& j, const std::string& where = "intent")
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, where + ": intent must be an object");
    IntentDecl intent;
    intent.target = detail::require_string(j, "target", where);
    const auto ctx = where + " -> " + intent.target;
    if (j.contains("action")) {
        if (!j["action"].is_string()) throw Error(ErrorCode::ParseError, ctx + ": 'action' must be a string");
        intent.labels.insert({LabelKind::Action, j["action"].get<std::string>(), std::nullopt});
    }
    for (auto& c : detail::string_list(j, "categories", ctx))
        intent.labels.insert({LabelKind::Category, std::move(c), std::nullopt});
    if (j.contains("data")) {
        if (!j["data"].is_string()) throw Error(ErrorCode::ParseError, ctx + ": 'data' must be a string");
        intent.labels.insert({LabelKind::Data, j["data"].get<std::string>(), std::nullopt});
    }
    if (j.contains("extras")) {
        if (!j["extras"].is_array()) throw Error(ErrorCode::ParseError, ctx + ": 'extras' must be an array");
        std::set<std::string> seen;
        for (const auto& e : j["extras"]) {
            auto name = detail::require_string(e, "name", ctx);
            if (!seen.insert(name).second)
                throw Error(ErrorCode::ValidationError, ctx + ": duplicate extra '" + name + "'", name);
            intent.labels.insert(extra_label(name, detail::parse_type(e, ctx)));
        }
    }
    if (j.contains("bindings")) {
        if (!j["bindings"].is_object())
            throw Error(ErrorCode::ParseError, ctx + ": 'bindings' must be an object");
        for (const auto& [name, b] : j["bindings"].items()) {
            if (b.is_object() && b.contains("const"))
                intent.bindings.emplace(name, ConstantBinding{value_from_json(b["const"])});
            else if (b.is_object() && b.contains("forward") && b["forward"].is_string())
                intent.bindings.emplace(name, ForwardBinding{b["forward"].get<std::string>()});
            else
                throw Error(ErrorCode::ParseError, ctx + ": binding '" + name + "' needs 'const' or 'forward'",
                            name);
        }
    }
    return intent;
}

inline nlohmann::json to_json(const ClickEffect& effect)
{
    return std::visit(
        [](const auto& e) -> nlohmann::json {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, StartActivity>)
                return {{"kind", "startActivity"}, {"intent", to_json(e.intent)}};
            else if constexpr (std::is_same_v<T, ShowScreen>)
                return {{"kind", "showScreen"}, {"screen", e.screen}};
            else if constexpr (std::is_same_v<T, OpenPopup>)
                return {{"kind", "openPopup"}, {"overlay", to_json(e.overlay)}};
            else
                return {{"kind", "noop"}};
        },
        effect);
}

inline ClickEffect effect_from_json(const nlohmann::json& j, const std::string& where)
{
    auto kind = detail::require_string(j, "kind", where);
    if (kind == "startActivity") return StartActivity{intent_from_json(detail::require(j, "intent", where), where)};
    if (kind == "showScreen") return ShowScreen{detail::require_string(j, "screen", where)};
    if (kind == "openPopup") return OpenPopup{view_from_json(detail::require(j, "overlay", where))};
    if (kind == "noop") return Noop{};
    throw Error(ErrorCode::ParseError, where + ": unknown effect kind '" + kind + "'", kind);
}

inline nlohmann::json to_json(const AppModel& model)
{
    nlohmann::json j;
    j["formatVersion"] = model_format_version;
    j["packageName"] = model.packageName;
    j["mainActivity"] = model.mainActivity;
    j["stateVariables"] = model.stateVariables;
    j["activities"] = nlohmann::json::array();
    for (const auto& a : model.activities) {
        nlohmann::json ja;
        ja["name"] = a.name;
        ja["externallyLaunchable"] = a.externallyLaunchable;
        ja["manifestFilters"] = nlohmann::json::array();
        for (const auto& f : a.manifestFilters) {
            nlohmann::json jf{{"action", f.action}, {"categories", f.categories}};
            if (f.dataScheme) jf["dataScheme"] = *f.dataScheme;
            if (f.dataHost) jf["dataHost"] = *f.dataHost;
            ja["manifestFilters"].push_back(jf);
        }
        ja["requiredParams"] = nlohmann::json::array();
        for (const auto& p : a.requiredParams)
            ja["requiredParams"].push_back({{"name", p.name}, {"type", std::string(to_string(p.type))}});
        ja["readsState"] = a.readsState;
        ja["setsState"] = a.setsState;
        ja["rootScreen"] = a.rootScreen;
        ja["screens"] = nlohmann::json::object();
        for (const auto& [name, s] : a.screens) {
            nlohmann::json js;
            js["viewTree"] = to_json(s.viewTree);
            js["handlers"] = nlohmann::json::object();
            for (const auto& [key, e] : s.handlers) js["handlers"][key] = to_json(e);
            ja["screens"][name] = js;
        }
        j["activities"].push_back(ja);
    }
    return j;
}

/// Canonical text form of the model; also the input of `model_digest`.
inline std::string serialize_model(const AppModel& model) { return to_json(model).dump(2); }

/// FNV-1a 64 of the canonical compact serialization.
inline std::string model_digest(const AppModel& model) { return to_hex16(fnv1a64(to_json(model).dump())); }

namespace detail {

inline bool is_identifier(std::string_view s)
{
    if (s.empty()) return false;
    auto head = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == '$'; };
    if (!head(s.front())) return false;
    return std::all_of(s.begin(), s.end(), [&](char c) { return head(c) || (c >= '0' && c <= '9'); });
}

inline bool is_dotted_identifier(std::string_view s)
{
    if (s.empty()) return false;
    std::size_t start = 0;
    while (true) {
        auto dot = s.find('.', start);
        if (!is_identifier(s.substr(start, dot == std::string_view::npos ? dot : dot - start))) return false;
        if (dot == std::string_view::npos) return true;
        start = dot + 1;
    }
}

inline void collect_ids(const ViewNode& n, std::set<std::string>& seen, const std::string& where)
{
    if (n.resourceId) {
        if (n.resourceId->empty() || is_position_ref(*n.resourceId))
            throw Error(ErrorCode::ValidationError, where + ": invalid resource id '" + *n.resourceId + "'",
                        *n.resourceId);
        if (!seen.insert(*n.resourceId).second)
            throw Error(ErrorCode::ValidationError, where + ": duplicate resource id '" + *n.resourceId + "'",
                        *n.resourceId);
    }
    for (const auto& c : n.children) collect_ids(c, seen, where);
}

inline void validate_intent(const AppModel& model, const IntentDecl& intent, const std::string& where)
{
    const auto* target = model.find(intent.target);
    if (!target)
        throw Error(ErrorCode::ValidationError, where + ": intent targets undeclared activity '" + intent.target + "'",
                    intent.target);
    std::map<std::string, ValueType> extras;
    for (const auto& l : intent.labels) {
        if (l.name.empty()) throw Error(ErrorCode::ValidationError, where + ": empty label name");
        if (l.is_extra()) extras[l.name] = *l.valueType;
    }
    for (const auto& p : target->requiredParams) {
        auto it = extras.find(p.name);
        if (it == extras.end() || it->second != p.type)
            throw Error(ErrorCode::ValidationError,
                        where + ": intent to " + intent.target + " does not carry required param '" + p.name +
                            "' of type " + std::string(to_string(p.type)),
                        p.name);
    }
    for (const auto& [name, b] : intent.bindings) {
        auto it = extras.find(name);
        if (it == extras.end())
            throw Error(ErrorCode::ValidationError, where + ": binding for unknown extra '" + name + "'", name);
        if (auto* c = std::get_if<ConstantBinding>(&b)) {
            if (it->second == ValueType::Opaque)
                throw Error(ErrorCode::ValidationError, where + ": opaque extra '" + name + "' cannot be constant",
                            name);
            try {
                (void)coerce(it->second, c->value, name);
            } catch (const Error& e) {
                throw Error(ErrorCode::ValidationError, where + ": " + e.message(), name);
            }
        }
    }
}

} // namespace detail

/// Checks every cross-reference and uniqueness rule. Throws ValidationError.
inline void validate_model(const AppModel& model)
{
    using detail::is_dotted_identifier;
    if (!is_dotted_identifier(model.packageName))
        throw Error(ErrorCode::ValidationError, "packageName must be a dotted identifier", model.packageName);
    std::set<std::string> names;
    for (const auto& a : model.activities) {
        if (!is_dotted_identifier(a.name))
            throw Error(ErrorCode::ValidationError, "activity name '" + a.name + "' is not an identifier", a.name);
        if (!names.insert(a.name).second)
            throw Error(ErrorCode::ValidationError, "duplicate activity '" + a.name + "'", a.name);
    }
    if (!model.find(model.mainActivity))
        throw Error(ErrorCode::ValidationError, "main activity '" + model.mainActivity + "' is not declared",
                    model.mainActivity);
    for (const auto& a : model.activities) {
        for (const auto* vars : {&a.readsState, &a.setsState})
            for (const auto& v : *vars)
                if (!model.stateVariables.contains(v))
                    throw Error(ErrorCode::ValidationError, a.name + ": undeclared state variable '" + v + "'", v);
        std::set<std::string> params;
        for (const auto& p : a.requiredParams)
            if (!params.insert(p.name).second)
                throw Error(ErrorCode::ValidationError, a.name + ": duplicate required param '" + p.name + "'", p.name);
        if (!a.screens.contains(a.rootScreen))
            throw Error(ErrorCode::ValidationError, a.name + ": root screen '" + a.rootScreen + "' is not declared",
                        a.rootScreen);
        for (const auto& [sname, screen] : a.screens) {
            const auto where = a.name + "/" + sname;
            std::set<std::string> ids;
            detail::collect_ids(screen.viewTree, ids, where);
            for (const auto& [key, effect] : screen.handlers) {
                if (!resolve_view(screen.viewTree, key))
                    throw Error(ErrorCode::ValidationError, where + ": handler for missing view '" + key + "'", key);
                const auto hwhere = where + "#" + key;
                if (auto* s = std::get_if<StartActivity>(&effect)) {
                    detail::validate_intent(model, s->intent, hwhere);
                } else if (auto* sh = std::get_if<ShowScreen>(&effect)) {
                    if (!a.screens.contains(sh->screen))
                        throw Error(ErrorCode::ValidationError, hwhere + ": showScreen targets undeclared screen '" +
                                                                    sh->screen + "'",
                                    sh->screen);
                } else if (auto* p = std::get_if<OpenPopup>(&effect)) {
                    auto overlayIds = ids;
                    detail::collect_ids(p->overlay, overlayIds, hwhere + " overlay");
                }
            }
        }
    }
}

/// Parses and validates a model document.
inline AppModel load_app_model(const nlohmann::json& j)
{
    const std::string where = "model";
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "model document must be a JSON object");
    const auto& fv = detail::require(j, "formatVersion", where);
    if (!fv.is_number_integer() || fv.get<int>() != model_format_version)
        throw Error(ErrorCode::ParseError, "unsupported formatVersion " + fv.dump());
    AppModel m;
    m.packageName = detail::require_string(j, "packageName", where);
    m.mainActivity = detail::require_string(j, "mainActivity", where);
    for (auto& v : detail::string_list(j, "stateVariables", where)) m.stateVariables.insert(std::move(v));
    const auto& acts = detail::require(j, "activities", where);
    if (!acts.is_array()) throw Error(ErrorCode::ParseError, "'activities' must be an array");
    for (const auto& ja : acts) {
        ActivityDecl a;
        a.name = detail::require_string(ja, "name", "activity");
        const auto ctx = "activity " + a.name;
        if (ja.contains("externallyLaunchable")) {
            if (!ja["externallyLaunchable"].is_boolean())
                throw Error(ErrorCode::ParseError, ctx + ": 'externallyLaunchable' must be a boolean");
            a.externallyLaunchable = ja["externallyLaunchable"].get<bool>();
        }
        if (ja.contains("manifestFilters")) {
            if (!ja["manifestFilters"].is_array())
                throw Error(ErrorCode::ParseError, ctx + ": 'manifestFilters' must be an array");
            for (const auto& jf : ja["manifestFilters"]) {
                IntentFilterDecl f;
                f.action = detail::require_string(jf, "action", ctx);
                for (auto& c : detail::string_list(jf, "categories", ctx)) f.categories.insert(std::move(c));
                if (jf.contains("dataScheme")) f.dataScheme = detail::require_string(jf, "dataScheme", ctx);
                if (jf.contains("dataHost")) f.dataHost = detail::require_string(jf, "dataHost", ctx);
                a.manifestFilters.push_back(std::move(f));
            }
        }
        if (ja.contains("requiredParams")) {
            if (!ja["requiredParams"].is_array())
                throw Error(ErrorCode::ParseError, ctx + ": 'requiredParams' must be an array");
            for (const auto& jp : ja["requiredParams"])
                a.requiredParams.push_back({detail::require_string(jp, "name", ctx), detail::parse_type(jp, ctx)});
        }
        for (auto& v : detail::string_list(ja, "readsState", ctx)) a.readsState.insert(std::move(v));
        for (auto& v : detail::string_list(ja, "setsState", ctx)) a.setsState.insert(std::move(v));
        a.rootScreen = detail::require_string(ja, "rootScreen", ctx);
        const auto& screens = detail::require(ja, "screens", ctx);
        if (!screens.is_object()) throw Error(ErrorCode::ParseError, ctx + ": 'screens' must be an object");
        for (const auto& [sname, js] : screens.items()) {
            ScreenDecl s;
            s.name = sname;
            const auto sctx = ctx + "/" + sname;
            s.viewTree = view_from_json(detail::require(js, "viewTree", sctx));
            if (js.contains("handlers")) {
                if (!js["handlers"].is_object())
                    throw Error(ErrorCode::ParseError, sctx + ": 'handlers' must be an object");
                for (const auto& [key, je] : js["handlers"].items())
                    s.handlers.emplace(key, effect_from_json(je, sctx + "#" + key));
            }
            a.screens.emplace(sname, std::move(s));
        }
        m.activities.push_back(std::move(a));
    }
    validate_model(m);
    return m;
}

inline AppModel load_app_model(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return load_app_model(j);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline AppModel load_app_model_file(const std::string& path) { return load_app_model(std::string_view(read_file(path))); }

// ---------------------------------------------------------------------------
// Manifest-level queries

/// Number of activities with at least one VIEW + BROWSABLE intent filter.
inline int count_declared_deep_links(const AppModel& model)
{
    return static_cast<int>(std::count_if(model.activities.begin(), model.activities.end(), [](const ActivityDecl& a) {
        return std::any_of(a.manifestFilters.begin(), a.manifestFilters.end(),
                           [](const IntentFilterDecl& f) { return f.is_deep_link(); });
    }));
}

/// Activities that have inbound intents, all of which carry an opaque extra.
/// The main activity is never reported since the launch intent reaches it.
inline std::vector<std::string> validate_replayability(const AppModel& model)
{
    std::map<std::string, std::pair<int, int>> inbound; // total, opaque
    for (const auto& d : declared_intents(model)) {
        auto& [total, opaque] = inbound[d.intent->target];
        ++total;
        if (d.intent->has_opaque()) ++opaque;
    }
    std::vector<std::string> out;
    for (const auto& [name, counts] : inbound)
        if (name != model.mainActivity && counts.first > 0 && counts.first == counts.second) out.push_back(name);
    return out;
}

} // namespace deeplink
