#pragma once

#include "deeplink/error.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>

namespace deeplink {

/// Extra payload types. Everything except Opaque can be populated from
/// outside the app; Opaque stands for app-specific objects.
enum class ValueType { Int, Long, Double, Boolean, Text, Opaque };

constexpr bool is_basic(ValueType t) noexcept { return t != ValueType::Opaque; }

constexpr std::string_view to_string(ValueType t) noexcept
{
    switch (t) {
    case ValueType::Int: return "int";
    case ValueType::Long: return "long";
    case ValueType::Double: return "double";
    case ValueType::Boolean: return "boolean";
    case ValueType::Text: return "text";
    case ValueType::Opaque: return "opaque";
    }
    return "opaque";
}

inline std::optional<ValueType> value_type_from_string(std::string_view s) noexcept
{
    if (s == "int") return ValueType::Int;
    if (s == "long") return ValueType::Long;
    if (s == "double") return ValueType::Double;
    if (s == "boolean") return ValueType::Boolean;
    if (s == "text") return ValueType::Text;
    if (s == "opaque") return ValueType::Opaque;
    return std::nullopt;
}

using Value = std::variant<std::int64_t, double, bool, std::string>;
using ValueMap = std::map<std::string, Value>;

/// Checks `v` against `type` and normalizes it (integers are accepted for
/// double slots). Throws TypeMismatch otherwise.
inline Value coerce(ValueType type, const Value& v, std::string_view name = {})
{
    auto fail = [&]() -> Value {
        throw Error(ErrorCode::TypeMismatch,
                    "value for '" + std::string(name) + "' is not of type " +
                        std::string(to_string(type)),
                    std::string(name));
    };
    switch (type) {
    case ValueType::Int:
        if (auto* i = std::get_if<std::int64_t>(&v)) {
            if (*i >= std::numeric_limits<std::int32_t>::min() &&
                *i <= std::numeric_limits<std::int32_t>::max())
                return v;
        }
        return fail();
    case ValueType::Long:
        if (std::holds_alternative<std::int64_t>(v)) return v;
        return fail();
    case ValueType::Double:
        if (auto* d = std::get_if<double>(&v)) return *d;
        if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
        return fail();
    case ValueType::Boolean:
        if (std::holds_alternative<bool>(v)) return v;
        return fail();
    case ValueType::Text:
        if (std::holds_alternative<std::string>(v)) return v;
        return fail();
    case ValueType::Opaque:
        break;
    }
    throw Error(ErrorCode::TypeMismatch,
                "opaque payload for '" + std::string(name) +
                    "' cannot be supplied from outside the app",
                std::string(name));
}

/// Value the simulator uses when an app-side click has to fill an extra
/// that no binding determines.
inline Value default_value(ValueType type)
{
    switch (type) {
    case ValueType::Int:
    case ValueType::Long: return std::int64_t{0};
    case ValueType::Double: return 0.0;
    case ValueType::Boolean: return false;
    case ValueType::Text:
    case ValueType::Opaque: break;
    }
    return std::string{};
}

/// Text rendering used in URIs. Doubles use the shortest round-trip form.
inline std::string format_value(const Value& v)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else {
                char buf[64];
                auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
                (void)ec;
                return std::string(buf, end);
            }
        },
        v);
}

inline Value parse_value(ValueType type, std::string_view text, std::string_view name = {})
{
    auto fail = [&]() -> Value {
        throw Error(ErrorCode::TypeMismatch,
                    "'" + std::string(text) + "' is not a valid " +
                        std::string(to_string(type)) + " for '" + std::string(name) + "'",
                    std::string(name));
    };
    const char* first = text.data();
    const char* last = text.data() + text.size();
    switch (type) {
    case ValueType::Int:
    case ValueType::Long: {
        std::int64_t out{};
        auto [p, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || p != last || text.empty()) return fail();
        return coerce(type, out, name);
    }
    case ValueType::Double: {
        double out{};
        auto [p, ec] = std::from_chars(first, last, out);
        if (ec != std::errc{} || p != last || text.empty()) return fail();
        return out;
    }
    case ValueType::Boolean:
        if (text == "true") return true;
        if (text == "false") return false;
        return fail();
    case ValueType::Text:
        return std::string(text);
    case ValueType::Opaque:
        break;
    }
    return coerce(ValueType::Opaque, std::string(text), name);
}

inline nlohmann::json value_to_json(const Value& v)
{
    return std::visit([](const auto& x) { return nlohmann::json(x); }, v);
}

inline Value value_from_json(const nlohmann::json& j)
{
    if (j.is_boolean()) return j.get<bool>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw Error(ErrorCode::ParseError, "value must be a number, boolean or string: " + j.dump());
}

inline nlohmann::json values_to_json(const ValueMap& values)
{
    auto out = nlohmann::json::object();
    for (const auto& [k, v] : values) out[k] = value_to_json(v);
    return out;
}

inline ValueMap values_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "value map must be an object");
    ValueMap out;
    for (const auto& [k, v] : j.items()) out.emplace(k, value_from_json(v));
    return out;
}

} // namespace deeplink
