#pragma once

// Deep-link templates: URI schemas, template construction from shortcuts
// and fragment paths, concrete link parsing, and the release manifest.

#include "deeplink/nav_graph.hpp"
#include "deeplink/ui_crawl.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deeplink {

inline constexpr int manifest_format_version = 1;

// ---------------------------------------------------------------------------
// URI encoding

inline std::string percent_encode(std::string_view s)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
            c == '_' || c == '~') {
            out += ch;
        } else {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xf];
        }
    }
    return out;
}

inline std::string percent_decode(std::string_view s)
{
    auto nibble = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        throw Error(ErrorCode::InvalidUri, "bad percent escape in '" + std::string(s) + "'", std::string(s));
    };
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '%') {
            out += s[i];
            continue;
        }
        if (i + 2 >= s.size())
            throw Error(ErrorCode::InvalidUri, "truncated percent escape in '" + std::string(s) + "'", std::string(s));
        out += static_cast<char>(nibble(s[i + 1]) * 16 + nibble(s[i + 2]));
        i += 2;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Schemas

struct UriSchema {
    std::string host;
    std::string target;
    std::vector<std::string> parameterNames; // sorted ascending
    std::optional<std::string> fragment;

    bool operator==(const UriSchema&) const = default;

    /// `http://host/Target?a={a}&b={b}#fragment`
    std::string render() const
    {
        std::string out = "http://" + host + "/" + percent_encode(target);
        for (std::size_t i = 0; i < parameterNames.size(); ++i) {
            out += i ? '&' : '?';
            const auto enc = percent_encode(parameterNames[i]);
            out += enc + "={" + enc + "}";
        }
        if (fragment) out += "#" + percent_encode(*fragment);
        return out;
    }
};

/// Package segments reversed: "com.ichi2.anki" -> "anki.ichi2.com".
inline std::string reverse_host(std::string_view packageName)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto dot = packageName.find('.', start);
        parts.push_back(packageName.substr(start, dot == std::string_view::npos ? dot : dot - start));
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    std::string out;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
        if (!out.empty()) out += '.';
        out += *it;
    }
    return out;
}

inline UriSchema make_uri_schema(std::string_view packageName, std::span<const std::string> activityNames,
                                 const std::string& activity, std::vector<std::string> params,
                                 std::optional<std::string> fragment = std::nullopt)
{
    const auto target = simple_name(activity);
    for (const auto& other : activityNames)
        if (other != activity && simple_name(other) == target)
            throw Error(ErrorCode::AmbiguousTarget,
                        "activities " + activity + " and " + other + " share the simple name " + target, target);
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end()), params.end());
    return {reverse_host(packageName), target, std::move(params), std::move(fragment)};
}

inline UriSchema make_uri_schema(const AppModel& model, const std::string& activity, std::vector<std::string> params,
                                 std::optional<std::string> fragment = std::nullopt)
{
    std::vector<std::string> names;
    for (const auto& a : model.activities) names.push_back(a.name);
    return make_uri_schema(model.packageName, names, activity, std::move(params), std::move(fragment));
}

// ---------------------------------------------------------------------------
// Templates

struct TemplateParam {
    std::string name;
    ValueType type = ValueType::Text;
    bool operator==(const TemplateParam&) const = default;
};

/// How to reach one location: the intents to issue (the first one is the
/// launch intent), then the views to click. Unpinned extras are parameters.
struct DeepLinkTemplate {
    std::string activity;
    UriSchema schema;
    std::vector<IntentDecl> intentSequence;
    ValueMap pinned;
    std::vector<std::string> actionSequence;
    std::optional<std::string> fragment;
    std::optional<StructureHash> fragmentHash;
    std::vector<TemplateParam> parameters; // sorted by name

    bool operator==(const DeepLinkTemplate&) const = default;

    /// Unique within a manifest: host, target, parameter names and fragment.
    std::string id() const { return schema.render(); }
    std::string uri_schema() const { return schema.render(); }
};

/// Extras of `intents` by name. Throws ValidationError on a name used with
/// two different types.
inline std::map<std::string, ValueType> extras_by_name(std::span<const IntentDecl> intents)
{
    std::map<std::string, ValueType> out;
    for (const auto& intent : intents)
        for (const auto& l : intent.extras()) {
            auto [it, inserted] = out.emplace(l.name, *l.valueType);
            if (!inserted && it->second != *l.valueType)
                throw Error(ErrorCode::ValidationError,
                            "extra '" + l.name + "' is used with two types on the same path", l.name);
        }
    return out;
}

struct FragmentTarget {
    std::string name;
    StructureHash hash;
    std::vector<std::string> actions;
};

/// Template that replays `path` and then the fragment's actions. Pins not
/// carried by the path are ignored.
inline DeepLinkTemplate make_template(const AppModel& model, const Path& path, const ValueMap& pins = {},
                                      const std::optional<FragmentTarget>& fragment = std::nullopt)
{
    DeepLinkTemplate t;
    t.activity = path.target();
    for (const auto& tr : path.transitions) t.intentSequence.push_back(tr.intent);
    std::vector<std::string> names;
    for (const auto& [name, type] : extras_by_name(t.intentSequence)) {
        if (type == ValueType::Opaque)
            throw Error(ErrorCode::NotReplayable, "path to " + t.activity + " carries opaque extra '" + name + "'",
                        name);
        if (auto pin = pins.find(name); pin != pins.end()) {
            t.pinned.emplace(name, coerce(type, pin->second, name));
            continue;
        }
        t.parameters.push_back({name, type});
        names.push_back(name);
    }
    if (fragment) {
        if (fragment->actions.empty())
            throw Error(ErrorCode::ValidationError,
                        "fragment '" + fragment->name + "' is the activity's start fragment; select the activity instead",
                        fragment->name);
        t.fragment = fragment->name;
        t.fragmentHash = fragment->hash;
        t.actionSequence = fragment->actions;
    }
    t.schema = make_uri_schema(model, t.activity, names, t.fragment);
    return t;
}

struct ReleaseManifest {
    std::string packageName;
    std::string modelDigest;
    std::vector<DeepLinkTemplate> templates;

    bool operator==(const ReleaseManifest&) const = default;

    const DeepLinkTemplate* find(std::string_view id) const
    {
        for (const auto& t : templates)
            if (t.id() == id) return &t;
        return nullptr;
    }
};

struct SelectionTarget {
    std::string activity;
    std::optional<std::string> fragment;
    ValueMap pins;

    bool operator==(const SelectionTarget&) const = default;
};

/// The developer's choice of link targets, plus what crawling needs.
struct Selection {
    std::vector<SelectionTarget> targets;
    std::map<std::string, EntryScript> entryScripts;    // by activity
    std::map<std::string, FragmentHints> fragmentHints; // by activity

    bool operator==(const Selection&) const = default;
};

inline Selection selection_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "selection must be an object");
    Selection s;
    const auto& targets = detail::require(j, "targets", "selection");
    if (!targets.is_array()) throw Error(ErrorCode::ParseError, "selection 'targets' must be an array");
    for (const auto& jt : targets) {
        SelectionTarget t;
        t.activity = detail::require_string(jt, "activity", "selection target");
        if (jt.contains("fragment")) t.fragment = detail::require_string(jt, "fragment", "selection target");
        if (jt.contains("pins")) t.pins = values_from_json(jt["pins"]);
        s.targets.push_back(std::move(t));
    }
    if (j.contains("entryScripts")) {
        if (!j["entryScripts"].is_object()) throw Error(ErrorCode::ParseError, "'entryScripts' must be an object");
        for (const auto& [a, js] : j["entryScripts"].items()) s.entryScripts.emplace(a, entry_script_from_json(js));
    }
    if (j.contains("fragmentHints")) {
        if (!j["fragmentHints"].is_object()) throw Error(ErrorCode::ParseError, "'fragmentHints' must be an object");
        for (const auto& [a, jh] : j["fragmentHints"].items()) s.fragmentHints.emplace(a, hints_from_json(jh));
    }
    return s;
}

inline nlohmann::json to_json(const Selection& s)
{
    nlohmann::json targets = nlohmann::json::array();
    for (const auto& t : s.targets) {
        nlohmann::json jt{{"activity", t.activity}};
        if (t.fragment) jt["fragment"] = *t.fragment;
        if (!t.pins.empty()) jt["pins"] = values_to_json(t.pins);
        targets.push_back(jt);
    }
    nlohmann::json j{{"targets", targets}};
    if (!s.entryScripts.empty()) {
        j["entryScripts"] = nlohmann::json::object();
        for (const auto& [a, e] : s.entryScripts) j["entryScripts"][a] = to_json(e);
    }
    if (!s.fragmentHints.empty()) {
        j["fragmentHints"] = nlohmann::json::object();
        for (const auto& [a, hints] : s.fragmentHints) {
            auto& jh = j["fragmentHints"][a] = nlohmann::json::object();
            for (const auto& [h, name] : hints) jh[h.hex()] = name;
        }
    }
    return j;
}

/// Every activity the shortcut table can reach, root locations only.
inline Selection select_all_activities(const ShortcutTable& shortcuts)
{
    Selection s;
    for (const auto& [activity, row] : shortcuts.byActivity)
        if (!row.empty()) s.targets.push_back({activity, std::nullopt, {}});
    return s;
}

/// One template per unique shortcut and selected location. Throws
/// NotReplayable, NotCrawled, NoSuchFragment, DuplicateSchema.
inline ReleaseManifest build_templates(const AppModel& model, const ShortcutTable& shortcuts,
                                       const std::map<std::string, FragmentTransitionGraph>& ftgs,
                                       const Selection& selection)
{
    ReleaseManifest manifest{model.packageName, model_digest(model), {}};
    std::vector<SelectionTarget> targets;
    for (const auto& t : selection.targets)
        if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);

    std::set<std::string> ids;
    for (const auto& target : targets) {
        (void)model.activity(target.activity);
        const auto paths = unique_shortcuts(shortcuts, target.activity);
        if (paths.empty())
            throw Error(ErrorCode::NotReplayable,
                        target.activity + " is only reachable through intents with opaque payloads", target.activity);

        std::optional<FragmentTarget> fragment;
        if (target.fragment) {
            auto f = ftgs.find(target.activity);
            if (f == ftgs.end())
                throw Error(ErrorCode::NotCrawled, target.activity + " has not been crawled", target.activity);
            auto hints = selection.fragmentHints.find(target.activity);
            const auto names = name_fragments(f->second, hints == selection.fragmentHints.end() ? FragmentHints{}
                                                                                                : hints->second);
            auto named = std::find_if(names.begin(), names.end(),
                                      [&](const auto& kv) { return kv.second == *target.fragment; });
            if (named == names.end())
                throw Error(ErrorCode::NoSuchFragment,
                            "no fragment named '" + *target.fragment + "' in " + target.activity, *target.fragment);
            fragment = FragmentTarget{*target.fragment, named->first, fragment_path(f->second, named->first)};
        }

        std::set<std::string> pinsUsed;
        for (const auto& path : paths) {
            auto t = make_template(model, path, target.pins, fragment);
            for (const auto& [name, v] : t.pinned) pinsUsed.insert(name);
            if (!ids.insert(t.id()).second)
                throw Error(ErrorCode::DuplicateSchema, "two templates share the schema " + t.id(), t.id());
            manifest.templates.push_back(std::move(t));
        }
        for (const auto& [name, v] : target.pins)
            if (!pinsUsed.contains(name))
                throw Error(ErrorCode::ValidationError,
                            "pinned value '" + name + "' is not an extra on any path to " + target.activity, name);
    }
    return manifest;
}

// ---------------------------------------------------------------------------
// Concrete links

struct DeepLink {
    std::string uri;
    std::string templateId;
    ValueMap values;
    std::optional<std::string> fragment;

    bool operator==(const DeepLink&) const = default;
};

/// Concrete URI for `t` with `values` (one per parameter, type-checked).
inline std::string render_link(const DeepLinkTemplate& t, const ValueMap& values)
{
    std::string out = "http://" + t.schema.host + "/" + percent_encode(t.schema.target);
    bool first = true;
    for (const auto& p : t.parameters) {
        auto it = values.find(p.name);
        if (it == values.end())
            throw Error(ErrorCode::TypeMismatch, "missing value for parameter '" + p.name + "'", p.name);
        out += first ? '?' : '&';
        first = false;
        out += percent_encode(p.name) + "=" + percent_encode(format_value(coerce(p.type, it->second, p.name)));
    }
    if (t.fragment) out += "#" + percent_encode(*t.fragment);
    return out;
}

inline DeepLink parse_deep_link(const ReleaseManifest& manifest, std::string_view uri)
{
    constexpr std::string_view scheme = "http://";
    if (uri.substr(0, scheme.size()) != scheme)
        throw Error(ErrorCode::InvalidUri, "deep links must start with http://", std::string(uri));
    auto rest = uri.substr(scheme.size());

    std::optional<std::string> fragment;
    if (auto hash = rest.find('#'); hash != std::string_view::npos) {
        fragment = percent_decode(rest.substr(hash + 1));
        rest = rest.substr(0, hash);
    }
    std::string_view query;
    bool hasQuery = false;
    if (auto q = rest.find('?'); q != std::string_view::npos) {
        query = rest.substr(q + 1);
        hasQuery = true;
        rest = rest.substr(0, q);
    }
    auto slash = rest.find('/');
    if (slash == std::string_view::npos || slash == 0)
        throw Error(ErrorCode::InvalidUri, "deep link needs http://host/Target", std::string(uri));
    const auto host = std::string(rest.substr(0, slash));
    const auto targetPart = rest.substr(slash + 1);
    if (targetPart.empty() || targetPart.find('/') != std::string_view::npos)
        throw Error(ErrorCode::InvalidUri, "deep link path must be a single target segment", std::string(uri));
    const auto target = percent_decode(targetPart);

    std::map<std::string, std::string> raw;
    if (hasQuery) {
        std::size_t start = 0;
        while (start <= query.size()) {
            auto amp = query.find('&', start);
            auto part = query.substr(start, amp == std::string_view::npos ? std::string_view::npos : amp - start);
            auto eq = part.find('=');
            if (eq == std::string_view::npos)
                throw Error(ErrorCode::InvalidUri, "query part '" + std::string(part) + "' has no '='",
                            std::string(uri));
            auto key = percent_decode(part.substr(0, eq));
            if (!raw.emplace(key, percent_decode(part.substr(eq + 1))).second)
                throw Error(ErrorCode::InvalidUri, "parameter '" + key + "' given twice", key);
            if (amp == std::string_view::npos) break;
            start = amp + 1;
        }
    }
    std::vector<std::string> names;
    for (const auto& [k, v] : raw) names.push_back(k);

    const DeepLinkTemplate* match = nullptr;
    for (const auto& t : manifest.templates) {
        if (t.schema.host != host || t.schema.target != target || t.fragment != fragment ||
            t.schema.parameterNames != names)
            continue;
        if (match) throw Error(ErrorCode::AmbiguousMatch, "several templates match " + std::string(uri), std::string(uri));
        match = &t;
    }
    if (!match) throw Error(ErrorCode::NoMatchingTemplate, "no template matches " + std::string(uri), std::string(uri));

    DeepLink link{std::string(uri), match->id(), {}, fragment};
    for (const auto& p : match->parameters) link.values.emplace(p.name, parse_value(p.type, raw.at(p.name), p.name));
    return link;
}

// ---------------------------------------------------------------------------
// Manifest documents

inline nlohmann::json to_json(const DeepLinkTemplate& t)
{
    nlohmann::json intents = nlohmann::json::array();
    for (const auto& i : t.intentSequence) intents.push_back(to_json(i));
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : t.parameters) params.push_back({{"name", p.name}, {"type", std::string(to_string(p.type))}});
    nlohmann::json j{{"id", t.id()},
                     {"activity", t.activity},
                     {"uriSchema", t.uri_schema()},
                     {"host", t.schema.host},
                     {"target", t.schema.target},
                     {"intentSequence", intents},
                     {"actionSequence", t.actionSequence},
                     {"parameters", params},
                     {"pinned", values_to_json(t.pinned)}};
    if (t.fragment) j["fragment"] = *t.fragment;
    if (t.fragmentHash) j["fragmentHash"] = t.fragmentHash->hex();
    return j;
}

inline nlohmann::json to_json(const ReleaseManifest& m)
{
    nlohmann::json templates = nlohmann::json::array();
    for (const auto& t : m.templates) templates.push_back(to_json(t));
    return {{"formatVersion", manifest_format_version},
            {"packageName", m.packageName},
            {"modelDigest", m.modelDigest},
            {"templates", templates}};
}

inline std::string export_manifest(const ReleaseManifest& m) { return to_json(m).dump(2) + "\n"; }

namespace detail {

inline DeepLinkTemplate template_from_json(const nlohmann::json& j, const std::string& packageName)
{
    auto fail = [](const std::string& msg) -> DeepLinkTemplate { throw Error(ErrorCode::FormatError, msg); };
    DeepLinkTemplate t;
    try {
        t.activity = require_string(j, "activity", "template");
        for (const auto& ji : require(j, "intentSequence", "template")) t.intentSequence.push_back(intent_from_json(ji));
        for (auto& a : string_list(j, "actionSequence", "template")) t.actionSequence.push_back(std::move(a));
        for (const auto& jp : require(j, "parameters", "template"))
            t.parameters.push_back({require_string(jp, "name", "parameter"), parse_type(jp, "parameter")});
        if (j.contains("pinned")) t.pinned = values_from_json(j["pinned"]);
        if (j.contains("fragment")) t.fragment = require_string(j, "fragment", "template");
        if (j.contains("fragmentHash")) t.fragmentHash = structure_hash_from_hex(require_string(j, "fragmentHash", "template"));
    } catch (const Error& e) {
        return fail("malformed template: " + std::string(e.what()));
    } catch (const nlohmann::json::exception& e) {
        return fail("malformed template: " + std::string(e.what()));
    }
    const auto where = "template for " + t.activity;
    if (t.intentSequence.empty() || t.intentSequence.front().labels != launch_labels())
        return fail(where + ": intent sequence must start with the launch intent");
    if (t.intentSequence.back().target != t.activity) return fail(where + ": intent sequence ends elsewhere");
    if (t.actionSequence.empty() != !t.fragment)
        return fail(where + ": an action sequence is required exactly when a fragment is targeted");
    if (t.fragment.has_value() != t.fragmentHash.has_value())
        return fail(where + ": fragment and fragmentHash go together");
    std::map<std::string, ValueType> extras;
    try {
        extras = extras_by_name(t.intentSequence);
    } catch (const Error& e) {
        return fail(where + ": " + e.message());
    }
    std::vector<std::string> names;
    for (const auto& [name, type] : extras) {
        if (auto pin = t.pinned.find(name); pin != t.pinned.end()) {
            try {
                pin->second = coerce(type, pin->second, name);
            } catch (const Error& e) {
                return fail(where + ": " + e.message());
            }
            continue;
        }
        names.push_back(name);
    }
    std::vector<TemplateParam> expected;
    for (const auto& n : names) expected.push_back({n, extras.at(n)});
    if (expected != t.parameters) return fail(where + ": parameters must be the unpinned extras of the intents");
    if (t.pinned.size() + names.size() != extras.size()) return fail(where + ": pinned value for an unknown extra");
    t.schema = {reverse_host(packageName), simple_name(t.activity), names, t.fragment};
    if (j.contains("uriSchema") && j["uriSchema"] != t.uri_schema())
        return fail(where + ": uriSchema does not match " + t.uri_schema());
    return t;
}

} // namespace detail

/// Parses a manifest document and checks its invariants; when `model` is
/// given, the digest must match it.
inline ReleaseManifest import_manifest(const nlohmann::json& j, const AppModel* model = nullptr)
{
    if (!j.is_object()) throw Error(ErrorCode::FormatError, "manifest must be a JSON object");
    if (!j.contains("formatVersion") || j["formatVersion"] != manifest_format_version)
        throw Error(ErrorCode::FormatError, "unsupported manifest formatVersion");
    ReleaseManifest m;
    try {
        m.packageName = detail::require_string(j, "packageName", "manifest");
        m.modelDigest = detail::require_string(j, "modelDigest", "manifest");
    } catch (const Error& e) {
        throw Error(ErrorCode::FormatError, e.message());
    }
    if (!j.contains("templates") || !j["templates"].is_array())
        throw Error(ErrorCode::FormatError, "manifest needs a 'templates' array");
    std::set<std::string> ids;
    for (const auto& jt : j["templates"]) {
        auto t = detail::template_from_json(jt, m.packageName);
        if (!ids.insert(t.id()).second)
            throw Error(ErrorCode::FormatError, "duplicate schema " + t.id(), t.id());
        m.templates.push_back(std::move(t));
    }
    if (model) {
        if (model->packageName != m.packageName)
            throw Error(ErrorCode::DigestMismatch, "manifest is for package " + m.packageName, m.packageName);
        const auto digest = model_digest(*model);
        if (digest != m.modelDigest)
            throw Error(ErrorCode::DigestMismatch,
                        "manifest digest " + m.modelDigest + " does not match model digest " + digest, digest);
    }
    return m;
}

inline ReleaseManifest import_manifest(std::string_view text, const AppModel* model = nullptr)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::FormatError, e.what());
    }
    return import_manifest(j, model);
}

} // namespace deeplink
