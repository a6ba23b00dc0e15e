#ifndef APPSLICE_SRC_JSON_UTIL_HPP
#define APPSLICE_SRC_JSON_UTIL_HPP

// Strict helpers for walking parsed documents. Every accessor takes the
// JSON-pointer style path of the node it inspects so errors point at the
// offending field.

#include <cstdint>
#include <initializer_list>
#include <string>

#include "json.hpp"

#include "appslice/errors.hpp"
#include "appslice/spec_model.hpp"

namespace appslice::detail {

inline const json& expect_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    return j;
}

inline const json& expect_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array");
    return j;
}

inline const json& require_field(const json& obj, const char* key,
                                 const std::string& path) {
    expect_object(obj, path);
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaError(path + "/" + key, "missing field");
    return *it;
}

inline void reject_unknown(const json& obj,
                           std::initializer_list<const char*> allowed,
                           const std::string& path) {
    expect_object(obj, path);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known)
            throw SchemaError(path + "/" + it.key(), "unknown field");
    }
}

inline double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline std::int64_t as_integer(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        throw SchemaError(path, "expected an integer");
    return j.get<std::int64_t>();
}

inline bool as_boolean(const json& j, const std::string& path) {
    if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
    return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
}

}  // namespace appslice::detail

#endif  // APPSLICE_SRC_JSON_UTIL_HPP
