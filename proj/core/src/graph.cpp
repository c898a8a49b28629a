#include "hdsg/graph.hpp"

#include <algorithm>
#include <set>

#include "hdsg/errors.hpp"

namespace hdsg {

bool Condition::matches(const Domain& parent_domain, const Value& v) const {
    if (always()) return true;
    if (range) {
        return range->contains(parent_domain.numeric(v));
    }
    const std::size_t idx = parent_domain.level_index(v);
    return std::find(levels.begin(), levels.end(), idx) != levels.end();
}

std::string Role::label() const {
    switch (base) {
        case BaseRole::Neutral: return "neutral";
        case BaseRole::Meta:    return "meta";
        case BaseRole::Decreed: return partially_decreed ? "partially-decreed" : "decreed";
        case BaseRole::MetaDecreed:
            return partially_decreed ? "meta-partially-decreed" : "meta-decreed";
    }
    return "?";
}

std::size_t DesignSpaceGraph::index_of(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ReferenceError("unknown variable '" + name + "'");
    return it->second;
}

namespace {

void check_domain(const VariableDecl& d) {
    const Domain& dom = d.domain;
    switch (dom.type) {
        case VarType::Continuous:
            if (!(dom.bounds.lo < dom.bounds.hi))
                throw DomainError("variable '" + d.name + "': continuous bounds need lower < upper");
            if (!std::isfinite(dom.bounds.lo) || !std::isfinite(dom.bounds.hi))
                throw DomainError("variable '" + d.name + "': non-finite bounds");
            break;
        case VarType::Integer: {
            if (dom.int_levels.empty())
                throw DomainError("variable '" + d.name + "': empty integer domain");
            for (std::size_t i = 1; i < dom.int_levels.size(); ++i)
                if (dom.int_levels[i] <= dom.int_levels[i - 1])
                    throw DomainError("variable '" + d.name + "': integer levels must be strictly increasing");
            break;
        }
        case VarType::Ordinal:
        case VarType::Categorical: {
            if (dom.labels.empty())
                throw DomainError("variable '" + d.name + "': empty level list");
            std::set<std::string> seen(dom.labels.begin(), dom.labels.end());
            if (seen.size() != dom.labels.size())
                throw DomainError("variable '" + d.name + "': duplicate levels");
            break;
        }
    }
}

void check_effect_subset(const VariableDecl& target, const Effect& e) {
    const Domain& dom = target.domain;
    if (e.kind == EffectKind::Exclude) return;
    if (e.kind == EffectKind::RestrictBounds && dom.is_discrete()) {
        if (e.levels.empty())
            throw DomainError("restrict-bounds on discrete variable '" + target.name +
                              "' needs a level subset");
    }
    if (dom.is_discrete()) {
        for (std::size_t idx : e.levels)
            if (idx >= dom.level_count())
                throw ReferenceError("rule effect references level " + std::to_string(idx) +
                                     " outside domain of '" + target.name + "'");
    } else if (e.kind == EffectKind::Include && e.range) {
        if (e.range->lo < dom.bounds.lo || e.range->hi > dom.bounds.hi || e.range->empty())
            throw DomainError("rule effect interval not a subset of '" + target.name + "' bounds");
    }
}

} // namespace

DesignSpaceGraph DesignSpaceGraph::build(std::vector<VariableDecl> decls,
                                         std::vector<DecreeRule> rules,
                                         std::vector<IncompatibilityEdge> incompat,
                                         std::vector<OrderRelation> orders,
                                         std::vector<IntermediateNode> mids) {
    DesignSpaceGraph g;
    g.vars_ = std::move(decls);

    // Intermediate nodes join the variable set with domain {0,1}; their
    // driven rules are merged into the rule list.
    std::vector<std::optional<std::vector<FormulaAtom>>> formulas(g.vars_.size());
    for (auto& mid : mids) {
        VariableDecl d;
        d.name = mid.name;
        d.domain.type = VarType::Integer;
        d.domain.int_levels = {0, 1};
        g.vars_.push_back(std::move(d));
        formulas.emplace_back(std::move(mid.atoms));
        for (auto& r : mid.targets) rules.push_back(std::move(r));
    }
    g.formula_ = std::move(formulas);

    for (std::size_t i = 0; i < g.vars_.size(); ++i) {
        check_domain(g.vars_[i]);
        if (!g.index_.emplace(g.vars_[i].name, i).second)
            throw DomainError("duplicate variable name '" + g.vars_[i].name + "'");
    }

    g.rules_ = std::move(rules);
    g.incompat_ = std::move(incompat);
    g.orders_ = std::move(orders);

    const std::size_t n = g.vars_.size();
    g.rules_in_.assign(n, {});
    g.rules_out_.assign(n, {});
    for (std::size_t r = 0; r < g.rules_.size(); ++r) {
        const DecreeRule& rule = g.rules_[r];
        const std::size_t p = g.index_of(rule.parent);
        const std::size_t t = g.index_of(rule.target);
        if (p == t) throw DomainError("rule with parent = target '" + rule.parent + "'");
        const Domain& pd = g.vars_[p].domain;
        if (pd.is_discrete()) {
            if (rule.when.range && rule.when.levels.empty()) {
                // interval condition on an integer parent is fine; labels are not
                if (pd.type != VarType::Integer && pd.type != VarType::Ordinal)
                    throw DomainError("interval condition on categorical parent '" + rule.parent + "'");
            }
            for (std::size_t idx : rule.when.levels)
                if (idx >= pd.level_count())
                    throw ReferenceError("rule condition references level " + std::to_string(idx) +
                                         " outside domain of '" + rule.parent + "'");
        } else if (!rule.when.levels.empty()) {
            throw DomainError("continuous parent '" + rule.parent + "' needs an interval condition");
        }
        check_effect_subset(g.vars_[t], rule.effect);
        // Parameterized restrict-bounds must stay non-empty for every
        // admissible parent value; affine bounds reach extremes at the ends.
        if (rule.effect.kind == EffectKind::RestrictBounds &&
            !g.vars_[t].domain.is_discrete() && (rule.effect.lower || rule.effect.upper)) {
            const Domain& td = g.vars_[t].domain;
            auto span_at = [&](double pv) {
                const double lo = rule.effect.lower ? std::max(td.bounds.lo, rule.effect.lower->eval(pv))
                                                    : td.bounds.lo;
                const double hi = rule.effect.upper ? std::min(td.bounds.hi, rule.effect.upper->eval(pv))
                                                    : td.bounds.hi;
                return hi - lo;
            };
            double pv_lo, pv_hi;
            if (pd.type == VarType::Continuous) {
                pv_lo = pd.bounds.lo;
                pv_hi = pd.bounds.hi;
            } else if (pd.type == VarType::Integer) {
                pv_lo = static_cast<double>(pd.int_levels.front());
                pv_hi = static_cast<double>(pd.int_levels.back());
            } else {
                pv_lo = 0.0;
                pv_hi = static_cast<double>(pd.level_count() - 1);
            }
            if (rule.when.range) {
                pv_lo = std::max(pv_lo, rule.when.range->lo);
                pv_hi = std::min(pv_hi, rule.when.range->hi);
            }
            if (span_at(pv_lo) < 0.0 || span_at(pv_hi) < 0.0)
                throw DomainError("restrict-bounds on '" + rule.target +
                                  "' is empty for an admissible value of '" + rule.parent + "'");
        }
        g.rules_in_[t].push_back(r);
        g.rules_out_[p].push_back(r);
    }

    g.gated_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t r : g.rules_in_[i])
            if (g.rules_[r].effect.kind != EffectKind::RestrictBounds) g.gated_[i] = true;
    g.permanent_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.permanent_[i] = !g.gated_[i];

    for (const auto& e : g.incompat_) {
        for (const NodeRef* ref : {&e.a, &e.b}) {
            const std::size_t v = g.index_of(ref->var);
            if (ref->level && !g.vars_[v].domain.contains(*ref->level))
                throw ReferenceError("incompatibility references value " +
                                     value_to_string(*ref->level) + " not in domain of '" + ref->var + "'");
        }
        // An edge between two permanent whole-variable nodes can never be
        // satisfied: the space is infeasible.
        if (!e.a.level && !e.b.level &&
            g.permanent_[g.index_of(e.a.var)] && g.permanent_[g.index_of(e.b.var)])
            throw InfeasibleError("incompatibility between permanent nodes '" + e.a.var +
                                  "' and '" + e.b.var + "'");
    }

    for (const auto& o : g.orders_) {
        const std::size_t a = g.index_of(o.lesser);
        const std::size_t b = g.index_of(o.greater);
        const VarType ta = g.vars_[a].domain.type, tb = g.vars_[b].domain.type;
        if (ta == VarType::Categorical || tb == VarType::Categorical)
            throw DomainError("order relation between non-quantitative variables '" +
                              o.lesser + "', '" + o.greater + "'");
    }

    // Order relations must be acyclic as a directed lesser->greater graph.
    {
        std::vector<std::vector<std::size_t>> adj(n);
        std::vector<std::size_t> indeg(n, 0);
        for (const auto& o : g.orders_) {
            adj[g.index_of(o.lesser)].push_back(g.index_of(o.greater));
            ++indeg[g.index_of(o.greater)];
        }
        std::vector<std::size_t> q;
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] == 0) q.push_back(i);
        std::size_t seen = 0;
        while (!q.empty()) {
            std::size_t u = q.back();
            q.pop_back();
            ++seen;
            for (std::size_t v : adj[u])
                if (--indeg[v] == 0) q.push_back(v);
        }
        if (seen != n) throw CycleError("order relations form a cycle");
    }

    // Formula atoms make their variables dependencies of the intermediate
    // node (ordering only; they do not gate inclusion or change roles).
    g.formula_parents_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        if (!g.formula_[i]) continue;
        std::size_t n_threshold = 0;
        for (const auto& atom : (*g.formula_[i])) {
            const std::size_t p = g.index_of(atom.var);
            if (p == i) throw DomainError("intermediate node '" + g.vars_[i].name + "' reads itself");
            g.formula_parents_[i].push_back(p);
            if (atom.threshold) {
                if (g.vars_[p].domain.type == VarType::Categorical)
                    throw DomainError("threshold atom on categorical parent '" + atom.var + "'");
                ++n_threshold;
            } else {
                for (std::size_t idx : atom.levels)
                    if (idx >= g.vars_[p].domain.level_count())
                        throw ReferenceError("formula atom references level " + std::to_string(idx) +
                                             " outside domain of '" + atom.var + "'");
            }
        }
        if (n_threshold > 1)
            throw DomainError("intermediate node '" + g.vars_[i].name +
                              "' has more than one threshold atom");
    }

    g.compute_topo();
    g.derive_roles();

    g.ancestors_.assign(n, {});
    for (std::size_t v : g.topo_) {
        std::set<std::size_t> anc;
        auto add_parent = [&](std::size_t p) {
            anc.insert(p);
            anc.insert(g.ancestors_[p].begin(), g.ancestors_[p].end());
        };
        for (std::size_t r : g.rules_in_[v]) add_parent(g.index_of(g.rules_[r].parent));
        for (std::size_t p : g.formula_parents_[v]) add_parent(p);
        g.ancestors_[v].assign(anc.begin(), anc.end());
    }
    return g;
}

void DesignSpaceGraph::compute_topo() {
    // Kahn's algorithm over the decree-arc subgraph; ties broken by
    // declaration index so the order is deterministic.
    const std::size_t n = vars_.size();
    std::vector<std::set<std::size_t>> children(n);
    std::vector<std::size_t> indeg(n, 0);
    for (const auto& rule : rules_) {
        const std::size_t p = index_of(rule.parent), t = index_of(rule.target);
        if (children[p].insert(t).second) ++indeg[t];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p : formula_parents_[i])
            if (children[p].insert(i).second) ++indeg[i];
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.insert(i);
    topo_.clear();
    while (!ready.empty()) {
        const std::size_t u = *ready.begin();
        ready.erase(ready.begin());
        topo_.push_back(u);
        for (std::size_t v : children[u])
            if (--indeg[v] == 0) ready.insert(v);
    }
    if (topo_.size() != n) {
        std::string members;
        for (std::size_t i = 0; i < n; ++i)
            if (indeg[i] > 0) members += (members.empty() ? "" : ", ") + vars_[i].name;
        throw CycleError("decree arcs form a cycle among: " + members);
    }
}

void DesignSpaceGraph::derive_roles() {
    const std::size_t n = vars_.size();
    roles_.assign(n, {});
    for (std::size_t i = 0; i < n; ++i) {
        const bool has_parent = !rules_in_[i].empty();
        const bool has_child = !rules_out_[i].empty();
        Role& r = roles_[i];
        if (has_parent && has_child) r.base = BaseRole::MetaDecreed;
        else if (has_parent) r.base = BaseRole::Decreed;
        else if (has_child) r.base = BaseRole::Meta;
        else r.base = BaseRole::Neutral;
        // Partially decreed: some incoming rule restricts without excluding —
        // restrict-bounds, or an include with a proper subset of the domain.
        for (std::size_t ri : rules_in_[i]) {
            const Effect& e = rules_[ri].effect;
            if (e.kind == EffectKind::RestrictBounds) r.partially_decreed = true;
            if (e.kind == EffectKind::Include) {
                const Domain& dom = vars_[i].domain;
                if (dom.is_discrete()) {
                    if (!e.levels.empty() && e.levels.size() < dom.level_count())
                        r.partially_decreed = true;
                } else if (e.range && (e.range->lo > dom.bounds.lo || e.range->hi < dom.bounds.hi)) {
                    r.partially_decreed = true;
                }
            }
        }
    }
}

std::vector<std::size_t> DesignSpaceGraph::discrete_indices(bool include_intermediates) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].domain.is_discrete() && (include_intermediates || !is_intermediate(i)))
            out.push_back(i);
    return out;
}

std::vector<std::size_t> DesignSpaceGraph::continuous_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].domain.type == VarType::Continuous) out.push_back(i);
    return out;
}

Role derive_role(const DesignSpaceGraph& g, const std::string& var) {
    return g.role(var);
}

} // namespace hdsg
