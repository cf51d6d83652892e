#pragma once

// Small JSON Schema checker covering the subset the shipped schema uses:
// type, enum, const, required, properties, additionalProperties (boolean),
// items, minItems, minimum, oneOf, and $ref into #/$defs. Enough to assert
// conformance in tests without an external validator.

#include <string>

#include <json.hpp>

namespace schema {

inline bool conforms(const nlohmann::json& spec, const nlohmann::json& value,
                     const nlohmann::json& root) {
    if (spec.contains("$ref")) {
        const std::string ref = spec["$ref"].get<std::string>();
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) return false;
        const std::string name = ref.substr(prefix.size());
        if (!root.contains("$defs") || !root["$defs"].contains(name)) return false;
        return conforms(root["$defs"][name], value, root);
    }

    if (spec.contains("type")) {
        const std::string type = spec["type"].get<std::string>();
        if (type == "object" && !value.is_object()) return false;
        if (type == "array" && !value.is_array()) return false;
        if (type == "string" && !value.is_string()) return false;
        if (type == "boolean" && !value.is_boolean()) return false;
        if (type == "integer" && !value.is_number_integer()) return false;
        if (type == "number" && !value.is_number()) return false;
    }

    if (spec.contains("enum")) {
        bool found = false;
        for (const auto& candidate : spec["enum"]) found = found || candidate == value;
        if (!found) return false;
    }
    if (spec.contains("const") && spec["const"] != value) return false;

    if (spec.contains("minimum") && value.is_number() &&
        value.get<double>() < spec["minimum"].get<double>())
        return false;

    if (value.is_object()) {
        if (spec.contains("required"))
            for (const auto& key : spec["required"])
                if (!value.contains(key.get<std::string>())) return false;
        const bool closed = spec.contains("additionalProperties") &&
                            spec["additionalProperties"].is_boolean() &&
                            !spec["additionalProperties"].get<bool>();
        for (const auto& [key, member] : value.items()) {
            if (spec.contains("properties") && spec["properties"].contains(key)) {
                if (!conforms(spec["properties"][key], member, root)) return false;
            } else if (closed) {
                return false;
            }
        }
    }

    if (value.is_array()) {
        if (spec.contains("minItems") && value.size() < spec["minItems"].get<std::size_t>())
            return false;
        if (spec.contains("items"))
            for (const auto& element : value)
                if (!conforms(spec["items"], element, root)) return false;
    }

    if (spec.contains("oneOf")) {
        std::size_t matches = 0;
        for (const auto& option : spec["oneOf"])
            if (conforms(option, value, root)) ++matches;
        if (matches != 1) return false;
    }

    return true;
}

inline bool conforms(const nlohmann::json& spec, const nlohmann::json& value) {
    return conforms(spec, value, spec);
}

} // namespace schema
