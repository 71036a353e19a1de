#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "eventcast/error.hpp"

namespace eventcast {

// Attribute values are numeric or categorical. Timestamps and partition
// keys are first-class fields, everything else lives in the map.
using AttrValue = std::variant<double, std::string>;

struct Event {
    std::int64_t timestamp = 0;
    std::string partition;
    std::map<std::string, AttrValue> attributes;

    bool has(const std::string& name) const { return attributes.count(name) > 0; }

    double number(const std::string& name) const {
        auto it = attributes.find(name);
        if (it == attributes.end())
            throw_config("missing attribute '" + name + "' on event at t=" + std::to_string(timestamp));
        if (const double* d = std::get_if<double>(&it->second)) return *d;
        throw_config("type mismatch: attribute '" + name + "' is not numeric");
    }

    const std::string& text(const std::string& name) const {
        auto it = attributes.find(name);
        if (it == attributes.end())
            throw_config("missing attribute '" + name + "' on event at t=" + std::to_string(timestamp));
        if (const std::string* s = std::get_if<std::string>(&it->second)) return *s;
        throw_config("type mismatch: attribute '" + name + "' is not categorical");
    }
};

}  // namespace eventcast
