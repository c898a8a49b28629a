#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdsg/value.hpp"

namespace hdsg {

/// Predicate over a single parent value: level membership for discrete
/// parents, a closed interval for quantitative parents. An empty condition
/// matches any value (fires whenever the parent is active).
struct Condition {
    std::vector<std::size_t> levels;  // indices into the parent's declared levels
    std::optional<Interval> range;    // quantitative parents

    bool always() const { return levels.empty() && !range; }
    bool matches(const Domain& parent_domain, const Value& v) const;
};

enum class EffectKind { Include, Exclude, RestrictBounds };

/// Affine bound a + b * parent_value; b = 0 gives a constant bound.
struct AffineBound {
    double offset = 0.0;
    double slope = 0.0;
    double eval(double parent_value) const { return offset + slope * parent_value; }
};

struct Effect {
    EffectKind kind = EffectKind::Include;
    // Include: admissible subset of the target's domain. Empty members mean
    // "full declared domain". RestrictBounds narrows the support without
    // gating inclusion: a level subset for discrete targets, affine bounds
    // (optionally parameterized by the parent's numeric value) otherwise.
    std::vector<std::size_t> levels;
    std::optional<Interval> range;
    std::optional<AffineBound> lower;
    std::optional<AffineBound> upper;
};

struct DecreeRule {
    std::string parent;
    Condition when;
    std::string target;
    Effect effect;
};

/// Endpoint of an incompatibility edge: a whole variable (level unset,
/// meaning "this variable is active") or one of its levels.
struct NodeRef {
    std::string var;
    std::optional<Value> level;
};

struct IncompatibilityEdge {
    NodeRef a;
    NodeRef b;
};

struct OrderRelation {
    std::string lesser;
    std::string greater;
    bool strict = true;
};

/// Atom of an intermediate-node formula. Either level membership on a
/// discrete parent or a single threshold comparison on a quantitative
/// parent (at most one threshold atom per node, so that both indicator
/// branches remain per-variable interval restrictions).
struct FormulaAtom {
    std::string var;
    std::vector<std::size_t> levels;     // discrete membership
    std::optional<double> threshold;     // quantitative comparison
    bool less_than = true;               // value < threshold, else value >= threshold
};

/// Binary-valued logic node: value 1 iff all atoms hold. Participates in
/// the DAG like a variable with domain {0,1}; decree rules may target it
/// (inclusion) and use it as a parent (the rules it drives).
struct IntermediateNode {
    std::string name;
    std::vector<FormulaAtom> atoms;
    std::vector<DecreeRule> targets;  // convenience: rules with parent == name
};

enum class BaseRole { Neutral, Meta, Decreed, MetaDecreed };

struct Role {
    BaseRole base = BaseRole::Neutral;
    bool partially_decreed = false;

    std::string label() const;
    bool is_meta() const { return base == BaseRole::Meta || base == BaseRole::MetaDecreed; }
    bool has_parent() const { return base == BaseRole::Decreed || base == BaseRole::MetaDecreed; }
};

/// Immutable validated design space graph: variable/level/bound/intermediate
/// nodes, decree arcs, incompatibility and order edges, role table and
/// topological order. Safe for concurrent reads once built.
class DesignSpaceGraph {
public:
    static DesignSpaceGraph build(std::vector<VariableDecl> decls,
                                  std::vector<DecreeRule> rules,
                                  std::vector<IncompatibilityEdge> incompat = {},
                                  std::vector<OrderRelation> orders = {},
                                  std::vector<IntermediateNode> mids = {});

    std::size_t size() const { return vars_.size(); }
    const std::vector<VariableDecl>& variables() const { return vars_; }
    const VariableDecl& variable(std::size_t i) const { return vars_[i]; }
    std::size_t index_of(const std::string& name) const;
    bool has_variable(const std::string& name) const { return index_.count(name) > 0; }

    const std::vector<DecreeRule>& rules() const { return rules_; }
    const std::vector<IncompatibilityEdge>& incompatibilities() const { return incompat_; }
    const std::vector<OrderRelation>& orders() const { return orders_; }

    bool is_intermediate(std::size_t i) const { return formula_[i].has_value(); }
    const std::optional<std::vector<FormulaAtom>>& formula(std::size_t i) const { return formula_[i]; }

    Role role(std::size_t i) const { return roles_[i]; }
    Role role(const std::string& name) const { return roles_[index_of(name)]; }

    /// Variable indices, parents before children.
    const std::vector<std::size_t>& topo_order() const { return topo_; }
    /// Indices of rules targeting / leaving each variable.
    const std::vector<std::size_t>& rules_into(std::size_t i) const { return rules_in_[i]; }
    const std::vector<std::size_t>& rules_from(std::size_t i) const { return rules_out_[i]; }
    /// Decree ancestors (transitive parents, formula dependencies included).
    const std::vector<std::size_t>& ancestors(std::size_t i) const { return ancestors_[i]; }
    /// Variables an intermediate node's formula reads.
    const std::vector<std::size_t>& formula_parents(std::size_t i) const { return formula_parents_[i]; }
    /// True when the variable can never be excluded (no gating rules).
    bool permanent(std::size_t i) const { return permanent_[i]; }
    /// True when the variable has at least one Include/Exclude rule.
    bool gated(std::size_t i) const { return gated_[i]; }

    std::vector<std::size_t> discrete_indices(bool include_intermediates = true) const;
    std::vector<std::size_t> continuous_indices() const;

private:
    DesignSpaceGraph() = default;
    void derive_roles();
    void compute_topo();

    std::vector<VariableDecl> vars_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<DecreeRule> rules_;
    std::vector<IncompatibilityEdge> incompat_;
    std::vector<OrderRelation> orders_;
    std::vector<std::optional<std::vector<FormulaAtom>>> formula_;
    std::vector<Role> roles_;
    std::vector<std::size_t> topo_;
    std::vector<std::vector<std::size_t>> rules_in_;
    std::vector<std::vector<std::size_t>> rules_out_;
    std::vector<std::vector<std::size_t>> ancestors_;
    std::vector<std::vector<std::size_t>> formula_parents_;
    std::vector<bool> permanent_;
    std::vector<bool> gated_;
};

/// Role of one variable (see Role::label for the six names).
Role derive_role(const DesignSpaceGraph& g, const std::string& var);

} // namespace hdsg
