#include <doctest.h>

#include "hdsg/errors.hpp"
#include "hdsg/graph.hpp"
#include "hdsg/problems.hpp"

using namespace hdsg;

namespace {

VariableDecl cat3(const std::string& name) {
    VariableDecl d;
    d.name = name;
    d.domain.type = VarType::Categorical;
    d.domain.labels = {"a", "b", "c"};
    return d;
}

} // namespace

TEST_CASE("three isolated variables are all neutral") {
    const auto g = DesignSpaceGraph::build({cat3("x"), cat3("y"), cat3("z")}, {});
    for (const auto& name : {"x", "y", "z"}) {
        CHECK(g.role(name).base == BaseRole::Neutral);
        CHECK(g.role(name).label() == "neutral");
    }
    CHECK(g.rules().empty());
    CHECK(g.topo_order().size() == 3);
}

TEST_CASE("a two-rule cycle is rejected") {
    std::vector<DecreeRule> rules = {
        {"x", {}, "y", {EffectKind::Include, {}, {}, {}, {}}},
        {"y", {}, "x", {EffectKind::Include, {}, {}, {}, {}}},
    };
    CHECK_THROWS_AS(DesignSpaceGraph::build({cat3("x"), cat3("y")}, rules), CycleError);
}

TEST_CASE("dangling rule names are rejected") {
    std::vector<DecreeRule> rules = {{"x", {}, "nope", {EffectKind::Include, {}, {}, {}, {}}}};
    CHECK_THROWS_AS(DesignSpaceGraph::build({cat3("x")}, rules), ReferenceError);
}

TEST_CASE("malformed domains are rejected") {
    VariableDecl bad_cont;
    bad_cont.name = "w";
    bad_cont.domain.type = VarType::Continuous;
    bad_cont.domain.bounds = {2.0, 1.0};
    CHECK_THROWS_AS(DesignSpaceGraph::build({bad_cont}, {}), DomainError);

    VariableDecl empty_cat;
    empty_cat.name = "e";
    empty_cat.domain.type = VarType::Categorical;
    CHECK_THROWS_AS(DesignSpaceGraph::build({empty_cat}, {}), DomainError);

    VariableDecl dup_cat;
    dup_cat.name = "d";
    dup_cat.domain.type = VarType::Categorical;
    dup_cat.domain.labels = {"a", "a"};
    CHECK_THROWS_AS(DesignSpaceGraph::build({dup_cat}, {}), DomainError);

    CHECK_THROWS_AS(DesignSpaceGraph::build({cat3("x"), cat3("x")}, {}), DomainError);
}

TEST_CASE("incompatibility between two permanent whole-variable nodes is infeasible") {
    std::vector<IncompatibilityEdge> edges = {{{"x", std::nullopt}, {"y", std::nullopt}}};
    CHECK_THROWS_AS(DesignSpaceGraph::build({cat3("x"), cat3("y")}, {}, edges), InfeasibleError);
    // Level-specific endpoints merely prune combinations.
    std::vector<IncompatibilityEdge> level_edge = {
        {{"x", Value{std::string("a")}}, {"y", Value{std::string("b")}}}};
    CHECK_NOTHROW(DesignSpaceGraph::build({cat3("x"), cat3("y")}, {}, level_edge));
}

TEST_CASE("MLP role table derives the expected roles") {
    const auto g = get_problem("mlp").graph;
    CHECK(g->role("optimizer").label() == "meta");
    CHECK(g->role("learning_rate").label() == "neutral");
    CHECK(g->role("activation").label() == "neutral");
    CHECK(g->role("n_layers").label() == "meta-decreed");
    CHECK(g->role("decay").label() == "decreed");
    CHECK(g->role("units_1").label() == "decreed");
    CHECK(derive_role(*g, "optimizer").is_meta());
    CHECK_THROWS_AS(derive_role(*g, "missing"), ReferenceError);

    // Roots: the two neutral variables plus the meta optimizer.
    for (const auto& name : {"learning_rate", "activation", "optimizer"})
        CHECK_FALSE(g->role(name).has_parent());
    // The decree chain optimizer -> n_layers -> units gives a 2-level hierarchy.
    CHECK(g->ancestors(g->index_of("units_2")).size() == 2);
}

TEST_CASE("consumer source choices are decreed with the partial-decree flag") {
    const auto g = get_problem("source_to_consumer").graph;
    const Role r = g->role("consumer_1_source");
    CHECK(r.base == BaseRole::Decreed);
    CHECK(r.partially_decreed);
    CHECK(r.label() == "partially-decreed");
    CHECK(g->role("n_sources").label() == "meta");
    CHECK(g->role("n_consumers").label() == "meta");
}

TEST_CASE("pressure chain derives meta-partially-decreed roles") {
    const auto g = get_problem("pressure_order").graph;
    CHECK(g->role("p_max").label() == "meta");
    CHECK(g->role("p_input").label() == "meta-partially-decreed");
    CHECK(g->role("p_min").label() == "partially-decreed");
}

TEST_CASE("role partition agrees with independent degree counts") {
    for (const auto& name : problem_names()) {
        const auto g = get_problem(name).graph;
        for (std::size_t i = 0; i < g->size(); ++i) {
            std::size_t indeg = 0, outdeg = 0;
            for (const auto& rule : g->rules()) {
                if (g->index_of(rule.target) == i) ++indeg;
                if (g->index_of(rule.parent) == i) ++outdeg;
            }
            const Role r = g->role(i);
            CHECK((r.base == BaseRole::Meta) == (indeg == 0 && outdeg >= 1));
            CHECK((r.base == BaseRole::Decreed) == (indeg >= 1 && outdeg == 0));
            CHECK((r.base == BaseRole::MetaDecreed) == (indeg >= 1 && outdeg >= 1));
            CHECK((r.base == BaseRole::Neutral) == (indeg == 0 && outdeg == 0));
        }
    }
}

TEST_CASE("topological order puts parents before children") {
    for (const auto& name : problem_names()) {
        const auto g = get_problem(name).graph;
        std::vector<std::size_t> pos(g->size());
        for (std::size_t k = 0; k < g->topo_order().size(); ++k) pos[g->topo_order()[k]] = k;
        for (const auto& rule : g->rules())
            CHECK(pos[g->index_of(rule.parent)] < pos[g->index_of(rule.target)]);
        for (std::size_t i = 0; i < g->size(); ++i)
            for (std::size_t p : g->formula_parents(i)) CHECK(pos[p] < pos[i]);
    }
}

TEST_CASE("order relations must be acyclic and quantitative") {
    VariableDecl a, b;
    a.name = "a";
    a.domain.type = VarType::Continuous;
    a.domain.bounds = {0, 1};
    b = a;
    b.name = "b";
    std::vector<OrderRelation> cyc = {{"a", "b", true}, {"b", "a", true}};
    CHECK_THROWS_AS(DesignSpaceGraph::build({a, b}, {}, {}, cyc), CycleError);

    std::vector<OrderRelation> on_cat = {{"a", "c", true}};
    CHECK_THROWS_AS(DesignSpaceGraph::build({a, cat3("c")}, {}, {}, on_cat), DomainError);
}
