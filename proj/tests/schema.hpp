#pragma once

// Validator for the subset of JSON Schema used in schemas/: type, enum,
// required, properties, items, minimum, $ref into local $defs.

#include <string>
#include <vector>

#include <weyllab/io.hpp>

namespace schema {

using weyllab::json;

inline bool type_matches(const json& v, const std::string& t)
{
    if (t == "object") return v.is_object();
    if (t == "array") return v.is_array();
    if (t == "string") return v.is_string();
    if (t == "boolean") return v.is_boolean();
    if (t == "integer") return v.is_number_integer() || v.is_number_unsigned();
    if (t == "number") return v.is_number();
    if (t == "null") return v.is_null();
    return false;
}

inline void validate(const json& v, const json& s, const json& root, const std::string& path, std::vector<std::string>& errors)
{
    if (s.contains("$ref")) {
        const std::string ref = s["$ref"];
        const std::string prefix = "#/$defs/";
        if (ref.rfind(prefix, 0) != 0) {
            errors.push_back(path + ": unsupported $ref " + ref);
            return;
        }
        validate(v, root["$defs"][ref.substr(prefix.size())], root, path, errors);
        return;
    }
    if (s.contains("type") && !type_matches(v, s["type"])) {
        errors.push_back(path + ": expected " + s["type"].get<std::string>());
        return;
    }
    if (s.contains("enum")) {
        bool found = false;
        for (const auto& e : s["enum"]) found = found || e == v;
        if (!found) errors.push_back(path + ": value not in enum");
    }
    if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>()) errors.push_back(path + ": below minimum");
    if (v.is_object()) {
        if (s.contains("required"))
            for (const auto& k : s["required"])
                if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing " + k.get<std::string>());
        if (s.contains("properties"))
            for (auto& [k, sub] : s["properties"].items())
                if (v.contains(k)) validate(v[k], sub, root, path + "/" + k, errors);
    }
    if (v.is_array() && s.contains("items"))
        for (std::size_t i = 0; i < v.size(); ++i) validate(v[i], s["items"], root, path + "/" + std::to_string(i), errors);
}

inline std::vector<std::string> check(const json& v, const json& s)
{
    std::vector<std::string> errors;
    validate(v, s, s, "", errors);
    return errors;
}

} // namespace schema
