#include "hdsg/space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hdsg/errors.hpp"

namespace hdsg {

namespace {

constexpr double kOrderEpsScale = 1e-9;

double order_eps(const Domain& lesser) {
    return kOrderEpsScale * lesser.bounds.width();
}

Support full_support(const Domain& dom) {
    Support s;
    if (dom.is_discrete()) {
        s.discrete = true;
        s.level_idx.resize(dom.level_count());
        std::iota(s.level_idx.begin(), s.level_idx.end(), 0);
    } else {
        s.range = dom.bounds;
    }
    return s;
}

void intersect_levels(std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    for (std::size_t x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) out.push_back(x);
    a = std::move(out);
}

/// Decree-rule support of variable v given the (partial) assignment in
/// `values`; parents are expected to be assigned already.
Support rule_support(const DesignSpaceGraph& g, std::size_t v, const std::vector<Entry>& values) {
    const Domain& dom = g.variable(v).domain;
    bool has_gate = false, any_included = false, excluded = false;
    Support s = full_support(dom);
    for (std::size_t ri : g.rules_into(v)) {
        const DecreeRule& rule = g.rules()[ri];
        if (rule.effect.kind != EffectKind::RestrictBounds) has_gate = true;
        const std::size_t p = g.index_of(rule.parent);
        const Entry& pv = values[p];
        if (!pv) continue;  // inactive parent: rule dormant
        if (!rule.when.matches(g.variable(p).domain, *pv)) continue;
        switch (rule.effect.kind) {
            case EffectKind::Exclude:
                excluded = true;
                break;
            case EffectKind::Include:
                any_included = true;
                if (dom.is_discrete()) {
                    if (!rule.effect.levels.empty()) intersect_levels(s.level_idx, rule.effect.levels);
                } else if (rule.effect.range) {
                    s.range.lo = std::max(s.range.lo, rule.effect.range->lo);
                    s.range.hi = std::min(s.range.hi, rule.effect.range->hi);
                }
                break;
            case EffectKind::RestrictBounds: {
                if (dom.is_discrete()) {
                    intersect_levels(s.level_idx, rule.effect.levels);
                    break;
                }
                const double pnum = g.variable(p).domain.numeric(*pv);
                if (rule.effect.lower) s.range.lo = std::max(s.range.lo, rule.effect.lower->eval(pnum));
                if (rule.effect.upper) s.range.hi = std::min(s.range.hi, rule.effect.upper->eval(pnum));
                break;
            }
        }
    }
    if (excluded || (has_gate && !any_included)) {
        s.level_idx.clear();
        s.range = {1.0, 0.0};
    }
    return s;
}

bool atom_holds(const DesignSpaceGraph& g, const FormulaAtom& atom, const std::vector<Entry>& values) {
    const std::size_t p = g.index_of(atom.var);
    const Entry& pv = values[p];
    if (!pv) return false;  // atoms over excluded parents read false
    const Domain& dom = g.variable(p).domain;
    if (atom.threshold) {
        const double x = dom.numeric(*pv);
        return atom.less_than ? x < *atom.threshold : x >= *atom.threshold;
    }
    const std::size_t idx = dom.level_index(*pv);
    return std::find(atom.levels.begin(), atom.levels.end(), idx) != atom.levels.end();
}

long long eval_formula(const DesignSpaceGraph& g, std::size_t v, const std::vector<Entry>& values) {
    for (const auto& atom : *g.formula(v))
        if (!atom_holds(g, atom, values)) return 0;
    return 1;
}

bool node_ref_satisfied(const DesignSpaceGraph& g, const NodeRef& ref, const std::vector<Entry>& values,
                        const std::vector<bool>& active) {
    const std::size_t v = g.index_of(ref.var);
    if (!active[v]) return false;
    if (!ref.level) return true;
    return values[v] && value_equal(*values[v], *ref.level);
}

/// Removes values of v that would violate an incompatibility edge against an
/// already-assigned endpoint. Returns false when v must be fully excluded.
bool prune_incompatible(const DesignSpaceGraph& g, std::size_t v, const std::vector<Entry>& values,
                        const std::vector<bool>& active, Support& s) {
    for (const auto& edge : g.incompatibilities()) {
        const NodeRef* mine = nullptr;
        const NodeRef* other = nullptr;
        if (g.index_of(edge.a.var) == v) { mine = &edge.a; other = &edge.b; }
        else if (g.index_of(edge.b.var) == v) { mine = &edge.b; other = &edge.a; }
        else continue;
        if (!node_ref_satisfied(g, *other, values, active)) continue;
        if (!mine->level) return false;  // whole-variable conflict: v cannot be active
        if (s.discrete) {
            const std::size_t bad = g.variable(v).domain.level_index(*mine->level);
            s.level_idx.erase(std::remove(s.level_idx.begin(), s.level_idx.end(), bad),
                              s.level_idx.end());
        }
        // A single continuous value has measure zero; nothing to prune.
    }
    return true;
}

/// Clamps a continuous support against order edges whose partner is already
/// assigned. Strict edges leave an epsilon gap sized by the lesser variable.
void clamp_orders(const DesignSpaceGraph& g, std::size_t v, const std::vector<Entry>& values,
                  Support& s) {
    if (s.discrete) {
        for (const auto& o : g.orders()) {
            const std::size_t le = g.index_of(o.lesser), gr = g.index_of(o.greater);
            const Domain& dom = g.variable(v).domain;
            if (le == v && values[gr]) {
                const double bound = g.variable(gr).domain.numeric(*values[gr]);
                std::vector<std::size_t> keep;
                for (std::size_t idx : s.level_idx) {
                    const double x = dom.numeric(dom.level_value(idx));
                    if (o.strict ? x < bound : x <= bound) keep.push_back(idx);
                }
                s.level_idx = std::move(keep);
            } else if (gr == v && values[le]) {
                const double bound = g.variable(le).domain.numeric(*values[le]);
                std::vector<std::size_t> keep;
                for (std::size_t idx : s.level_idx) {
                    const double x = dom.numeric(dom.level_value(idx));
                    if (o.strict ? x > bound : x >= bound) keep.push_back(idx);
                }
                s.level_idx = std::move(keep);
            }
        }
        return;
    }
    for (const auto& o : g.orders()) {
        const std::size_t le = g.index_of(o.lesser), gr = g.index_of(o.greater);
        if (le == v && values[gr]) {
            const double b = g.variable(gr).domain.numeric(*values[gr]);
            s.range.hi = std::min(s.range.hi, o.strict ? b - order_eps(g.variable(le).domain) : b);
        } else if (gr == v && values[le]) {
            const double b = g.variable(le).domain.numeric(*values[le]);
            s.range.lo = std::max(s.range.lo, o.strict ? b + order_eps(g.variable(le).domain) : b);
        }
    }
}

Value snap_to_support(const Domain& dom, const Support& s, const Value& raw) {
    if (!s.discrete) {
        double x = std::holds_alternative<double>(raw) ? std::get<double>(raw) : dom.numeric(raw);
        return std::clamp(x, s.range.lo, s.range.hi);
    }
    if (dom.type == VarType::Categorical) {
        for (std::size_t idx : s.level_idx)
            if (value_equal(dom.level_value(idx), raw)) return raw;
        return dom.level_value(s.level_idx.front());
    }
    // Quantitative finite domain: nearest by value (rank for ordinals),
    // ties resolved toward the lower value.
    double x;
    if (std::holds_alternative<double>(raw)) x = std::get<double>(raw);
    else if (std::holds_alternative<long long>(raw)) x = static_cast<double>(std::get<long long>(raw));
    else x = dom.numeric(raw);
    std::size_t best = s.level_idx.front();
    double best_d = std::abs(dom.numeric(dom.level_value(best)) - x);
    for (std::size_t idx : s.level_idx) {
        const double d = std::abs(dom.numeric(dom.level_value(idx)) - x);
        const double bx = dom.numeric(dom.level_value(best));
        const double cx = dom.numeric(dom.level_value(idx));
        if (d < best_d || (d == best_d && cx < bx)) {
            best = idx;
            best_d = d;
        }
    }
    return dom.level_value(best);
}

Value default_value(const Domain& dom, const Support& s) {
    if (!s.discrete) return 0.5 * (s.range.lo + s.range.hi);
    return dom.level_value(s.level_idx.front());
}

} // namespace

bool Support::contains(const Domain& dom, const Value& v) const {
    if (!discrete) {
        return std::holds_alternative<double>(v) && range.contains(std::get<double>(v));
    }
    for (std::size_t idx : level_idx)
        if (value_equal(dom.level_value(idx), v)) return true;
    return false;
}

Support support(const DesignSpaceGraph& g, const std::string& var,
                const std::map<std::string, Entry>& parent_values) {
    const std::size_t v = g.index_of(var);
    std::vector<Entry> values(g.size());
    for (const auto& [name, entry] : parent_values) {
        const std::size_t i = g.index_of(name);
        if (entry && !g.variable(i).domain.contains(*entry))
            throw DomainError("value " + value_to_string(*entry) + " not in domain of '" + name + "'");
        values[i] = entry;
    }
    for (std::size_t a : g.ancestors(v))
        if (!parent_values.count(g.variable(a).name))
            throw MissingParentError("support of '" + var + "' needs a value for ancestor '" +
                                     g.variable(a).name + "'");
    return rule_support(g, v, values);
}

ValidityReport is_valid(const DesignSpaceGraph& g, const ExtendedPoint& p) {
    const std::size_t n = g.size();
    if (p.values.size() != n || p.active.size() != n)
        throw WidthError("point has " + std::to_string(p.values.size()) + " entries, expected " +
                         std::to_string(n));
    ValidityReport rep;
    auto flag = [&](const std::string& msg) {
        rep.ok = false;
        rep.violations.push_back(msg);
    };

    for (std::size_t i = 0; i < n; ++i) {
        if (p.active[i] != p.values[i].has_value())
            flag("variable '" + g.variable(i).name + "': activeness mask disagrees with EXC marker");
        if (p.values[i] && !g.variable(i).domain.contains(*p.values[i]))
            flag("variable '" + g.variable(i).name + "': value " + value_to_string(*p.values[i]) +
                 " outside declared domain");
    }
    if (!rep.ok) return rep;

    for (std::size_t v : g.topo_order()) {
        const Support s = rule_support(g, v, p.values);
        const bool included = !s.empty();
        if (included && !p.values[v]) {
            flag("variable '" + g.variable(v).name + "': excluded but its support is non-empty");
            continue;
        }
        if (!included && p.values[v]) {
            flag("variable '" + g.variable(v).name + "': active but excluded by decree rules");
            continue;
        }
        if (!p.values[v]) continue;
        if (g.is_intermediate(v)) {
            const long long want = eval_formula(g, v, p.values);
            if (std::get<long long>(*p.values[v]) != want)
                flag("intermediate '" + g.variable(v).name + "': value disagrees with its formula");
        } else if (!s.contains(g.variable(v).domain, *p.values[v])) {
            flag("variable '" + g.variable(v).name + "': value " + value_to_string(*p.values[v]) +
                 " outside its support");
        }
    }

    for (const auto& e : g.incompatibilities()) {
        if (node_ref_satisfied(g, e.a, p.values, p.active) &&
            node_ref_satisfied(g, e.b, p.values, p.active))
            flag("incompatibility violated between '" + e.a.var + "' and '" + e.b.var + "'");
    }
    for (const auto& o : g.orders()) {
        const std::size_t le = g.index_of(o.lesser), gr = g.index_of(o.greater);
        if (!p.values[le] || !p.values[gr]) continue;
        const double a = g.variable(le).domain.numeric(*p.values[le]);
        const double b = g.variable(gr).domain.numeric(*p.values[gr]);
        if (o.strict ? !(a < b) : !(a <= b))
            flag("order violation: '" + o.lesser + "' must be " + (o.strict ? "<" : "<=") +
                 " '" + o.greater + "'");
    }
    return rep;
}

ExtendedPoint correct(const DesignSpaceGraph& g, const RawPoint& raw) {
    const std::size_t n = g.size();
    for (const auto& [name, value] : raw) (void)g.index_of(name);

    ExtendedPoint p;
    p.values.assign(n, std::nullopt);
    p.active.assign(n, false);
    for (std::size_t v : g.topo_order()) {
        Support s = rule_support(g, v, p.values);
        if (s.empty()) continue;  // excluded, stays EXC
        if (g.is_intermediate(v)) {
            p.values[v] = eval_formula(g, v, p.values);
            p.active[v] = true;
            continue;
        }
        if (!prune_incompatible(g, v, p.values, p.active, s)) {
            if (g.gated(v))
                throw InfeasibleError("no valid completion: '" + g.variable(v).name +
                                      "' is included but incompatible with earlier choices");
            throw InfeasibleError("no valid completion: permanent variable '" + g.variable(v).name +
                                  "' conflicts with earlier choices");
        }
        clamp_orders(g, v, p.values, s);
        if (s.empty())
            throw InfeasibleError("no valid completion: constraints empty the support of '" +
                                  g.variable(v).name + "'");
        const auto it = raw.find(g.variable(v).name);
        p.values[v] = (it != raw.end()) ? snap_to_support(g.variable(v).domain, s, it->second)
                                        : default_value(g.variable(v).domain, s);
        p.active[v] = true;
    }
    return p;
}

namespace {

struct Enumerator {
    const DesignSpaceGraph& g;
    long long cap;
    std::vector<Entry> values;
    std::vector<bool> active;
    std::vector<DiscreteConfig> out;

    Enumerator(const DesignSpaceGraph& gg, long long c)
        : g(gg), cap(c), values(gg.size()), active(gg.size(), false) {}

    void emit() {
        if (static_cast<long long>(out.size()) >= cap)
            throw BudgetError("enumeration exceeds cap of " + std::to_string(cap) +
                              " configurations");
        out.push_back({values, active});
    }

    /// Feasible values {0,1} of an included intermediate node when its
    /// threshold parent is a continuous variable left unspecified.
    std::vector<long long> mid_branches(std::size_t v) {
        const FormulaAtom* th = nullptr;
        for (const auto& atom : *g.formula(v)) {
            const std::size_t p = g.index_of(atom.var);
            if (atom.threshold && !values[p] && active[p]) {
                th = &atom;
                continue;
            }
            if (!atom_holds(g, atom, values)) return {0};
        }
        if (!th) return {1};
        // Both branches are feasible iff the threshold splits the parent's
        // current interval support.
        const std::size_t p = g.index_of(th->var);
        Support ps = rule_support(g, p, values);
        std::vector<long long> branches;
        const bool below = ps.range.lo < *th->threshold;
        const bool at_or_above = ps.range.hi >= *th->threshold;
        const bool truth_below = th->less_than;
        if ((below && truth_below) || (at_or_above && !truth_below)) branches.push_back(1);
        if ((below && !truth_below) || (at_or_above && truth_below)) branches.push_back(0);
        std::sort(branches.begin(), branches.end());
        return branches;
    }

    void recurse(std::size_t pos) {
        if (pos == g.topo_order().size()) {
            emit();
            return;
        }
        const std::size_t v = g.topo_order()[pos];
        const Domain& dom = g.variable(v).domain;

        Support s = rule_support(g, v, values);
        if (s.empty()) {
            // Excluded by rules; gated variables may legitimately be EXC,
            // a permanent variable with empty support kills the branch.
            if (!g.gated(v)) return;
            recurse(pos + 1);
            return;
        }
        if (!prune_incompatible(g, v, values, active, s)) return;
        if (dom.type == VarType::Continuous) {
            active[v] = true;
            recurse(pos + 1);
            active[v] = false;
            return;
        }
        if (g.is_intermediate(v)) {
            for (long long b : mid_branches(v)) {
                values[v] = b;
                active[v] = true;
                recurse(pos + 1);
                values[v] = std::nullopt;
                active[v] = false;
            }
            return;
        }
        clamp_orders(g, v, values, s);
        if (s.empty()) return;
        for (std::size_t idx : s.level_idx) {
            values[v] = dom.level_value(idx);
            active[v] = true;
            recurse(pos + 1);
            values[v] = std::nullopt;
            active[v] = false;
        }
    }
};

} // namespace

std::vector<DiscreteConfig> enumerate_discrete(const DesignSpaceGraph& g, long long cap) {
    Enumerator e(g, cap);
    e.recurse(0);
    return std::move(e.out);
}

DiscreteConfig decode_fast(const DesignSpaceGraph& g, const std::vector<std::size_t>& raw_levels) {
    const auto discrete = g.discrete_indices();
    if (raw_levels.size() != discrete.size())
        throw WidthError("raw vector has " + std::to_string(raw_levels.size()) +
                         " entries, expected " + std::to_string(discrete.size()));
    std::vector<std::size_t> choice(g.size(), 0);
    for (std::size_t k = 0; k < discrete.size(); ++k) {
        if (raw_levels[k] >= g.variable(discrete[k]).domain.level_count())
            throw DomainError("raw level " + std::to_string(raw_levels[k]) +
                              " out of range for '" + g.variable(discrete[k]).name + "'");
        choice[discrete[k]] = raw_levels[k];
    }

    DiscreteConfig c;
    c.values.assign(g.size(), std::nullopt);
    c.active.assign(g.size(), false);
    for (std::size_t v : g.topo_order()) {
        const Domain& dom = g.variable(v).domain;
        Support s = rule_support(g, v, c.values);
        if (s.empty()) continue;
        if (dom.type == VarType::Continuous) {
            c.active[v] = true;
            continue;
        }
        if (!prune_incompatible(g, v, c.values, c.active, s) || s.empty())
            throw InfeasibleError("decode: '" + g.variable(v).name +
                                  "' has no admissible level under earlier choices");
        if (g.is_intermediate(v)) {
            // Keep the raw branch when the formula cannot be resolved from
            // discrete values alone; otherwise the formula decides.
            const FormulaAtom* unresolved = nullptr;
            bool fixed_false = false;
            for (const auto& atom : *g.formula(v)) {
                const std::size_t p = g.index_of(atom.var);
                if (atom.threshold && !c.values[p] && c.active[p]) {
                    unresolved = &atom;
                    continue;
                }
                if (!atom_holds(g, atom, c.values)) fixed_false = true;
            }
            long long val;
            if (fixed_false) val = 0;
            else if (!unresolved) val = 1;
            else val = static_cast<long long>(choice[v] != 0);
            c.values[v] = val;
            c.active[v] = true;
            continue;
        }
        clamp_orders(g, v, c.values, s);
        if (s.empty())
            throw InfeasibleError("decode: order relations empty the support of '" +
                                  g.variable(v).name + "'");
        const Value wanted = dom.level_value(choice[v]);
        c.values[v] = snap_to_support(dom, s, wanted);
        c.active[v] = true;
    }
    return c;
}

std::vector<std::size_t> encode_config(const DesignSpaceGraph& g, const DiscreteConfig& c) {
    std::vector<std::size_t> enc;
    for (std::size_t v : g.discrete_indices())
        enc.push_back(c.values[v] ? g.variable(v).domain.level_index(*c.values[v]) : 0);
    return enc;
}

ImputationStats stats(const DesignSpaceGraph& g, long long cap) {
    ImputationStats st;
    const auto configs = enumerate_discrete(g, cap);
    st.n_valid = static_cast<long long>(configs.size());
    st.n_declared = 1;
    for (std::size_t v : g.discrete_indices())
        st.n_declared *= static_cast<long long>(g.variable(v).domain.level_count());
    st.n_discrete = static_cast<long long>(g.discrete_indices(false).size());
    st.n_dim_cont = static_cast<long long>(g.continuous_indices().size());

    long long active_total = 0;
    for (const auto& c : configs)
        for (std::size_t v : g.continuous_indices()) active_total += c.active[v] ? 1 : 0;
    st.n_dim_cont_mean =
        st.n_valid > 0 ? static_cast<double>(active_total) / static_cast<double>(st.n_valid) : 0.0;
    st.imp_ratio = st.n_valid > 0
                       ? static_cast<double>(st.n_declared) / static_cast<double>(st.n_valid)
                       : 1.0;
    st.cont_imp_ratio = st.n_dim_cont_mean > 0.0
                            ? static_cast<double>(st.n_dim_cont) / st.n_dim_cont_mean
                            : 1.0;
    return st;
}

ExtendedPoint realize_config(const DesignSpaceGraph& g, const DiscreteConfig& c, CounterRng rng) {
    ExtendedPoint p;
    p.values = c.values;
    p.active = c.active;
    for (std::size_t v : g.topo_order()) {
        if (!c.active[v] || g.variable(v).domain.type != VarType::Continuous) continue;
        Support s = rule_support(g, v, p.values);
        clamp_orders(g, v, p.values, s);
        // Included intermediates pin their threshold parent to the matching
        // side of the cutoff.
        for (std::size_t m = 0; m < g.size(); ++m) {
            if (!g.is_intermediate(m) || !c.values[m]) continue;
            for (const auto& atom : *g.formula(m)) {
                if (!atom.threshold || g.index_of(atom.var) != v) continue;
                bool others_true = true;
                for (const auto& a2 : *g.formula(m))
                    if (&a2 != &atom && !atom_holds(g, a2, p.values)) others_true = false;
                if (!others_true) continue;
                // `x < t` holds on [lo, t) and fails on [t, hi]; `x >= t`
                // mirrors it. The open side keeps an epsilon gap.
                const bool must_hold = std::get<long long>(*c.values[m]) == 1;
                const double eps = order_eps(g.variable(v).domain);
                if (atom.less_than == must_hold) s.range.hi = std::min(s.range.hi, *atom.threshold - eps);
                else s.range.lo = std::max(s.range.lo, *atom.threshold);
            }
        }
        if (s.range.empty())
            throw InfeasibleError("sampling: empty continuous support for '" + g.variable(v).name + "'");
        p.values[v] = s.range.lo + (s.range.hi - s.range.lo) * rng.uniform();
    }
    return p;
}

std::vector<ExtendedPoint> sample_valid(const DesignSpaceGraph& g, std::size_t n,
                                        std::uint64_t seed, long long cap) {
    const auto configs = enumerate_discrete(g, cap);
    const std::size_t m = configs.size();
    CounterRng root(seed);
    std::vector<ExtendedPoint> pool;
    pool.reserve(m);
    for (std::size_t i = 0; i < m; ++i)
        pool.push_back(realize_config(g, configs[i], root.split(i)));

    std::vector<ExtendedPoint> out;
    out.reserve(n);
    CounterRng pick = root.split(m + 1);
    if (n <= m) {
        std::vector<std::size_t> idx(m);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(pick.below(m - k));
            std::swap(idx[k], idx[j]);
            out.push_back(pool[idx[k]]);
        }
    } else {
        for (std::size_t k = 0; k < n; ++k)
            out.push_back(pool[static_cast<std::size_t>(pick.below(m))]);
    }
    return out;
}

std::string active_discrete_key(const DesignSpaceGraph& g, const std::vector<Entry>& values) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t v : g.discrete_indices()) {
        if (!values[v]) continue;
        if (!first) os << '|';
        first = false;
        os << g.variable(v).name << '=' << value_to_string(*values[v]);
    }
    return os.str();
}

RawPoint to_raw(const DesignSpaceGraph& g, const ExtendedPoint& p) {
    RawPoint raw;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (p.values[i]) raw[g.variable(i).name] = *p.values[i];
    return raw;
}

namespace {

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

std::string to_dot(const DesignSpaceGraph& g) {
    std::ostringstream os;
    os << "digraph design_space {\n  rankdir=LR;\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& var = g.variable(i);
        const std::string shape = g.is_intermediate(i) ? "box" : "ellipse";
        os << "  " << dot_quote(var.name) << " [label=" << dot_quote(var.name + " : " + g.role(i).label())
           << ", shape=" << shape << "];\n";
        if (var.domain.is_discrete()) {
            for (std::size_t l = 0; l < var.domain.level_count(); ++l) {
                const std::string id = var.name + "::" + value_to_string(var.domain.level_value(l));
                os << "  " << dot_quote(id) << " [label="
                   << dot_quote(value_to_string(var.domain.level_value(l)))
                   << ", shape=plaintext];\n";
                os << "  " << dot_quote(var.name) << " -> " << dot_quote(id)
                   << " [style=dotted, arrowhead=none];\n";
            }
        } else {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "[%g, %g]", var.domain.bounds.lo, var.domain.bounds.hi);
            const std::string id = var.name + "::bounds";
            os << "  " << dot_quote(id) << " [label=" << dot_quote(buf) << ", shape=plaintext];\n";
            os << "  " << dot_quote(var.name) << " -> " << dot_quote(id)
               << " [style=dotted, arrowhead=none];\n";
        }
    }
    // One arc per (parent, target) pair; labeled when any rule only
    // restricts the child instead of fully including it.
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, bool>> arcs;
    auto note_arc = [&](std::size_t p, std::size_t t, bool partial) {
        for (auto& a : arcs)
            if (a.first == std::make_pair(p, t)) {
                a.second = a.second || partial;
                return;
            }
        arcs.push_back({{p, t}, partial});
    };
    for (const auto& rule : g.rules()) {
        const std::size_t p = g.index_of(rule.parent), t = g.index_of(rule.target);
        bool partial = rule.effect.kind == EffectKind::RestrictBounds;
        if (rule.effect.kind == EffectKind::Include) {
            const Domain& dom = g.variable(t).domain;
            if (dom.is_discrete()) {
                partial = !rule.effect.levels.empty() && rule.effect.levels.size() < dom.level_count();
            } else if (rule.effect.range) {
                partial = rule.effect.range->lo > dom.bounds.lo || rule.effect.range->hi < dom.bounds.hi;
            }
        }
        note_arc(p, t, partial);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t p : g.formula_parents(i)) note_arc(p, i, true);
    for (const auto& [pt, partial] : arcs) {
        os << "  " << dot_quote(g.variable(pt.first).name) << " -> "
           << dot_quote(g.variable(pt.second).name);
        if (partial) os << " [label=\"partial decree\"]";
        os << ";\n";
    }
    for (const auto& e : g.incompatibilities()) {
        auto endpoint = [&](const NodeRef& r) {
            return r.level ? dot_quote(r.var + "::" + value_to_string(*r.level)) : dot_quote(r.var);
        };
        os << "  " << endpoint(e.a) << " -> " << endpoint(e.b)
           << " [dir=none, style=dashed, color=red, label=\"incomp.\"];\n";
    }
    for (const auto& o : g.orders()) {
        os << "  " << dot_quote(o.lesser) << " -> " << dot_quote(o.greater)
           << " [dir=none, style=dashed, color=blue, label=" << (o.strict ? "\"<\"" : "\"<=\"")
           << "];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace hdsg
