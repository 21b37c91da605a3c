#pragma once

#include <string>

#include <json.hpp>

namespace varconvex {

/// Minimal JSON-schema subset checker: type (single or list), required,
/// properties, items, enum. Enough for the schemas this project ships.
inline bool schema_validate(const nlohmann::json& value,
                            const nlohmann::json& schema, std::string* error,
                            const std::string& path = "$") {
    auto fail = [&](const std::string& why) {
        if (error) *error = path + ": " + why;
        return false;
    };

    if (schema.contains("type")) {
        auto matches = [&](const std::string& t) {
            if (t == "number") return value.is_number();
            if (t == "integer") return value.is_number_integer();
            if (t == "string") return value.is_string();
            if (t == "boolean") return value.is_boolean();
            if (t == "array") return value.is_array();
            if (t == "object") return value.is_object();
            if (t == "null") return value.is_null();
            return false;
        };
        const auto& ty = schema["type"];
        bool ok = false;
        if (ty.is_string()) {
            ok = matches(ty.get<std::string>());
        } else {
            for (const auto& t : ty) ok = ok || matches(t.get<std::string>());
        }
        if (!ok) return fail("type mismatch, expected " + ty.dump());
    }

    if (schema.contains("enum")) {
        bool ok = false;
        for (const auto& e : schema["enum"]) ok = ok || (e == value);
        if (!ok) return fail("value not in enum");
    }

    if (value.is_object()) {
        if (schema.contains("required"))
            for (const auto& key : schema["required"])
                if (!value.contains(key.get<std::string>()))
                    return fail("missing required key " + key.dump());
        if (schema.contains("properties")) {
            for (auto it = schema["properties"].begin();
                 it != schema["properties"].end(); ++it) {
                if (!value.contains(it.key())) continue;
                if (!schema_validate(value.at(it.key()), it.value(), error,
                                     path + "." + it.key()))
                    return false;
            }
        }
    }

    if (value.is_array() && schema.contains("items")) {
        for (std::size_t i = 0; i < value.size(); ++i)
            if (!schema_validate(value[i], schema["items"], error,
                                 path + "[" + std::to_string(i) + "]"))
                return false;
    }

    return true;
}

}  // namespace varconvex
