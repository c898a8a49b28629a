#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hdsg/problems.hpp"
#include "hdsg/rng.hpp"
#include "hdsg/space.hpp"

namespace hdsg::testing {

/// Independent brute-force filter: walk the full Cartesian product of
/// declared discrete levels, derive the masked point through the public
/// support() lookup, try a handful of continuous realizations (both sides
/// of any intermediate threshold), and keep combos passing is_valid.
/// Returns the number of distinct masked discrete signatures.
inline long long brute_force_valid_count(const DesignSpaceGraph& g) {
    const auto discrete = g.discrete_indices();
    std::vector<std::size_t> radix(discrete.size());
    long long total = 1;
    for (std::size_t k = 0; k < discrete.size(); ++k) {
        radix[k] = g.variable(discrete[k]).domain.level_count();
        total *= static_cast<long long>(radix[k]);
    }

    // Candidate continuous values: interval midpoint plus, when a threshold
    // formula reads the variable, a value on each side of the cutoff.
    auto continuous_candidates = [&](std::size_t v, const Interval& sup) {
        std::vector<double> cands{0.5 * (sup.lo + sup.hi)};
        for (std::size_t m = 0; m < g.size(); ++m) {
            if (!g.is_intermediate(m)) continue;
            for (const auto& atom : *g.formula(m)) {
                if (!atom.threshold || g.index_of(atom.var) != v) continue;
                const double t = *atom.threshold;
                if (sup.lo < t) cands.push_back(0.5 * (sup.lo + std::min(sup.hi, t)));
                if (sup.hi >= t) cands.push_back(0.5 * (std::max(sup.lo, t) + sup.hi));
            }
        }
        return cands;
    };

    std::set<std::string> signatures;
    std::vector<std::size_t> combo(discrete.size(), 0);
    for (long long it = 0; it < total; ++it) {
        long long rem = it;
        for (std::size_t k = 0; k < discrete.size(); ++k) {
            combo[k] = static_cast<std::size_t>(rem % static_cast<long long>(radix[k]));
            rem /= static_cast<long long>(radix[k]);
        }
        // Build masked points in topo order; branch over continuous candidates.
        std::vector<ExtendedPoint> partials(1);
        partials[0].values.assign(g.size(), std::nullopt);
        partials[0].active.assign(g.size(), false);
        for (std::size_t v : g.topo_order()) {
            std::map<std::string, Entry> parents;
            std::vector<ExtendedPoint> next;
            for (auto& p : partials) {
                parents.clear();
                for (std::size_t a : g.ancestors(v))
                    parents[g.variable(a).name] = p.values[a];
                const Support s = support(g, g.variable(v).name, parents);
                if (s.empty()) {
                    next.push_back(p);
                    continue;
                }
                if (g.variable(v).domain.type == VarType::Continuous) {
                    for (double x : continuous_candidates(v, s.range)) {
                        ExtendedPoint q = p;
                        q.values[v] = x;
                        q.active[v] = true;
                        next.push_back(q);
                    }
                } else {
                    std::size_t pos = 0;
                    for (std::size_t k = 0; k < discrete.size(); ++k)
                        if (discrete[k] == v) pos = k;
                    ExtendedPoint q = p;
                    q.values[v] = g.variable(v).domain.level_value(combo[pos]);
                    q.active[v] = true;
                    next.push_back(q);
                }
            }
            partials = std::move(next);
        }
        for (const auto& p : partials) {
            if (!is_valid(g, p).ok) continue;
            std::string sig = active_discrete_key(g, p.values);
            sig += '#';
            for (std::size_t i = 0; i < g.size(); ++i)
                if (g.variable(i).domain.type == VarType::Continuous)
                    sig += p.active[i] ? '1' : '0';
            signatures.insert(sig);
        }
    }
    return static_cast<long long>(signatures.size());
}

/// Random raw assignment over the declared domains (ignoring hierarchy), the
/// natural fuzz input for correct().
inline RawPoint random_raw(const DesignSpaceGraph& g, CounterRng& rng, double keep_prob = 1.0) {
    RawPoint raw;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_intermediate(i)) continue;
        if (rng.uniform() > keep_prob) continue;
        const Domain& dom = g.variable(i).domain;
        if (dom.type == VarType::Continuous)
            raw[g.variable(i).name] = rng.uniform(dom.bounds.lo, dom.bounds.hi);
        else
            raw[g.variable(i).name] = dom.level_value(rng.below(dom.level_count()));
    }
    return raw;
}

/// Training set of distinct points: configurations round-robin, each
/// realization on its own stream; identical draws (possible in purely
/// discrete spaces) are dropped.
inline std::vector<ExtendedPoint> distinct_points(const DesignSpaceGraph& g, std::size_t n,
                                                  std::uint64_t seed) {
    const auto configs = enumerate_discrete(g);
    CounterRng root(seed);
    std::vector<ExtendedPoint> out;
    std::set<std::string> seen;
    for (std::size_t k = 0; out.size() < n && k < 40 * n; ++k) {
        ExtendedPoint p = realize_config(g, configs[k % configs.size()], root.split(k));
        std::string sig;
        for (std::size_t i = 0; i < g.size(); ++i)
            sig += (p.values[i] ? value_to_string(*p.values[i]) : "EXC") + "|";
        if (seen.insert(sig).second) out.push_back(std::move(p));
        if (g.continuous_indices().empty() && seen.size() == configs.size()) break;
    }
    return out;
}

inline std::uint64_t fnv_seed(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline bool points_equal(const ExtendedPoint& a, const ExtendedPoint& b) {
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.values[i].has_value() != b.values[i].has_value()) return false;
        if (a.values[i] && !(*a.values[i] == *b.values[i])) return false;
    }
    return true;
}

} // namespace hdsg::testing
