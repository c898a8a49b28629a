#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hdsg/graph.hpp"
#include "hdsg/rng.hpp"

namespace hdsg {

/// Admissible value set of a variable given its parents: an interval for
/// continuous variables, declared-level indices otherwise. Empty support
/// means the variable is excluded.
struct Support {
    bool discrete = false;
    Interval range;
    std::vector<std::size_t> level_idx;

    bool empty() const { return discrete ? level_idx.empty() : range.empty(); }
    bool contains(const Domain& dom, const Value& v) const;
};

/// Full-width point over the extended domain: one entry per declared
/// variable, nullopt marking EXC, plus the activeness mask.
struct ExtendedPoint {
    std::vector<Entry> values;
    std::vector<bool> active;
};

struct ValidityReport {
    bool ok = true;
    std::vector<std::string> violations;
};

/// Discrete configuration: values for active discrete variables, EXC
/// elsewhere; active continuous variables keep an unspecified entry.
struct DiscreteConfig {
    std::vector<Entry> values;
    std::vector<bool> active;
};

struct ImputationStats {
    long long n_valid = 0;
    long long n_declared = 0;
    double imp_ratio = 1.0;
    long long n_discrete = 0;
    long long n_dim_cont = 0;
    double n_dim_cont_mean = 0.0;
    double cont_imp_ratio = 1.0;
};

using RawPoint = std::map<std::string, Value>;

inline constexpr long long kDefaultEnumerationCap = 10'000'000;

/// Support of `var` given concrete parent values (every decree ancestor must
/// appear in the map, EXC entries included). Decree rules only; edge
/// constraints are enforced by is_valid/correct.
Support support(const DesignSpaceGraph& g, const std::string& var,
                const std::map<std::string, Entry>& parent_values);

ValidityReport is_valid(const DesignSpaceGraph& g, const ExtendedPoint& p);

/// Projects a raw assignment onto the valid space: exclusions applied,
/// out-of-support values snapped to the nearest admissible value, missing
/// entries filled with support defaults (midpoint / first level).
ExtendedPoint correct(const DesignSpaceGraph& g, const RawPoint& raw);

/// Complete encoder: all valid discrete configurations, continuous
/// variables abstracted to active/inactive, lexicographic over topo order.
std::vector<DiscreteConfig> enumerate_discrete(const DesignSpaceGraph& g,
                                               long long cap = kDefaultEnumerationCap);

/// Fast encoder: greedy topological decode of per-variable level choices
/// (declaration order over discrete variables), clamping each choice into
/// its support without global enumeration.
DiscreteConfig decode_fast(const DesignSpaceGraph& g, const std::vector<std::size_t>& raw_levels);

/// Level-index encoding of a configuration (index 0 for EXC entries), the
/// inverse input for decode_fast.
std::vector<std::size_t> encode_config(const DesignSpaceGraph& g, const DiscreteConfig& c);

ImputationStats stats(const DesignSpaceGraph& g, long long cap = kDefaultEnumerationCap);

/// One uniform point for a given configuration (continuous actives drawn
/// from their supports).
ExtendedPoint realize_config(const DesignSpaceGraph& g, const DiscreteConfig& c, CounterRng rng);

/// Valid design of experiments: one point per valid configuration, then a
/// deterministic subsample (without replacement when n <= n_valid).
std::vector<ExtendedPoint> sample_valid(const DesignSpaceGraph& g, std::size_t n,
                                        std::uint64_t seed,
                                        long long cap = kDefaultEnumerationCap);

std::string to_dot(const DesignSpaceGraph& g);

/// Canonical "name=value" key of the active discrete part of a point or
/// configuration (declaration order). Two points in the same discrete
/// subspace share the key.
std::string active_discrete_key(const DesignSpaceGraph& g, const std::vector<Entry>& values);

/// Raw map view of a point (active entries only).
RawPoint to_raw(const DesignSpaceGraph& g, const ExtendedPoint& p);

} // namespace hdsg
