#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hdsg/errors.hpp"

namespace hdsg {

enum class VarType { Continuous, Integer, Ordinal, Categorical };

const char* var_type_name(VarType t);
VarType var_type_from_name(const std::string& s);

/// A concrete variable value: double for continuous, integer value for
/// integer variables, level label for ordinal/categorical.
using Value = std::variant<double, long long, std::string>;

/// Point entries are a value or EXC (excluded), encoded as nullopt.
using Entry = std::optional<Value>;

std::string value_to_string(const Value& v);
bool value_equal(const Value& a, const Value& b);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool empty() const { return lo > hi; }
};

/// Declared domain of a variable. Continuous variables carry an interval,
/// integer variables an increasing value list, ordinal/categorical a label
/// list (ordinal rank = declaration position).
struct Domain {
    VarType type = VarType::Continuous;
    Interval bounds;
    std::vector<long long> int_levels;
    std::vector<std::string> labels;

    bool is_discrete() const { return type != VarType::Continuous; }
    std::size_t level_count() const {
        return type == VarType::Integer ? int_levels.size() : labels.size();
    }
    Value level_value(std::size_t idx) const;
    /// Index of a value in the declared level list; throws DomainError if absent.
    std::size_t level_index(const Value& v) const;
    bool contains(const Value& v) const;
    /// Affine map of a quantitative value onto [0,1]; ordinal uses ranks.
    double normalize(const Value& v) const;
    /// Numeric view of a quantitative value (continuous/integer/ordinal rank).
    double numeric(const Value& v) const;
};

struct VariableDecl {
    std::string name;
    Domain domain;
};

inline const char* var_type_name(VarType t) {
    switch (t) {
        case VarType::Continuous:  return "continuous";
        case VarType::Integer:     return "integer";
        case VarType::Ordinal:     return "ordinal";
        case VarType::Categorical: return "categorical";
    }
    return "?";
}

inline VarType var_type_from_name(const std::string& s) {
    if (s == "continuous") return VarType::Continuous;
    if (s == "integer") return VarType::Integer;
    if (s == "ordinal") return VarType::Ordinal;
    if (s == "categorical") return VarType::Categorical;
    throw DomainError("unknown variable type '" + s + "'");
}

inline std::string value_to_string(const Value& v) {
    if (std::holds_alternative<double>(v)) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", std::get<double>(v));
        return buf;
    }
    if (std::holds_alternative<long long>(v)) return std::to_string(std::get<long long>(v));
    return std::get<std::string>(v);
}

inline bool value_equal(const Value& a, const Value& b) {
    return a == b;
}

inline Value Domain::level_value(std::size_t idx) const {
    if (type == VarType::Integer) return int_levels.at(idx);
    return labels.at(idx);
}

inline std::size_t Domain::level_index(const Value& v) const {
    if (type == VarType::Integer) {
        if (!std::holds_alternative<long long>(v))
            throw DomainError("integer variable expects an integer value, got " + value_to_string(v));
        const long long x = std::get<long long>(v);
        for (std::size_t i = 0; i < int_levels.size(); ++i)
            if (int_levels[i] == x) return i;
    } else {
        if (!std::holds_alternative<std::string>(v))
            throw DomainError("discrete variable expects a level label, got " + value_to_string(v));
        const auto& s = std::get<std::string>(v);
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == s) return i;
    }
    throw DomainError("value " + value_to_string(v) + " is not a declared level");
}

inline bool Domain::contains(const Value& v) const {
    if (type == VarType::Continuous) {
        return std::holds_alternative<double>(v) && bounds.contains(std::get<double>(v));
    }
    try {
        (void)level_index(v);
        return true;
    } catch (const DomainError&) {
        return false;
    }
}

inline double Domain::numeric(const Value& v) const {
    switch (type) {
        case VarType::Continuous: return std::get<double>(v);
        case VarType::Integer:    return static_cast<double>(std::get<long long>(v));
        default:                  return static_cast<double>(level_index(v));
    }
}

inline double Domain::normalize(const Value& v) const {
    switch (type) {
        case VarType::Continuous: {
            const double w = bounds.width();
            return w > 0 ? (std::get<double>(v) - bounds.lo) / w : 0.0;
        }
        case VarType::Integer: {
            const double lo = static_cast<double>(int_levels.front());
            const double hi = static_cast<double>(int_levels.back());
            return hi > lo ? (numeric(v) - lo) / (hi - lo) : 0.0;
        }
        case VarType::Ordinal: {
            const double n = static_cast<double>(labels.size());
            return n > 1 ? numeric(v) / (n - 1.0) : 0.0;
        }
        case VarType::Categorical:
            throw DomainError("categorical values have no quantitative normalization");
    }
    return 0.0;
}

} // namespace hdsg
