#include <doctest.h>

#include <cmath>

#include "hdsg/distance.hpp"
#include "hdsg/errors.hpp"
#include "hdsg/gp.hpp"
#include "hdsg/io.hpp"
#include "hdsg/kernel.hpp"
#include "hdsg/problems.hpp"
#include "helpers.hpp"

using namespace hdsg;
using namespace hdsg::testing;

namespace {

/// Ordinal size choice gating a continuous variable, with an exclude rule
/// and a discrete order relation; covers variable kinds and effects the
/// built-in catalog does not.
DesignSpaceGraph corner_space() {
    VariableDecl size{"size", {VarType::Ordinal, {}, {}, {"small", "medium", "large", "huge"}}};
    VariableDecl trim{"trim", {VarType::Ordinal, {}, {}, {"small", "medium", "large", "huge"}}};
    VariableDecl mode{"mode", {VarType::Categorical, {}, {}, {"eco", "sport"}}};
    VariableDecl boost{"boost", {VarType::Continuous, {0.0, 1.0}, {}, {}}};

    std::vector<DecreeRule> rules = {
        // boost exists only in sport mode and never for huge sizes
        {"mode", Condition{{1}, {}}, "boost", {EffectKind::Include, {}, {}, {}, {}}},
        {"size", Condition{{3}, {}}, "boost", {EffectKind::Exclude, {}, {}, {}, {}}},
    };
    std::vector<OrderRelation> orders = {{"trim", "size", false}};  // trim <= size by rank
    return DesignSpaceGraph::build({size, trim, mode, boost}, std::move(rules), {},
                                   std::move(orders));
}

} // namespace

TEST_CASE("ordinal distances use normalized ranks") {
    const auto g = corner_space();
    DistanceParams params = DistanceParams::defaults(g);
    const std::size_t size = g.index_of("size");

    CHECK(per_var_distance(g, size, Value{std::string("small")}, Value{std::string("huge")},
                           params) == 1.0);
    CHECK(per_var_distance(g, size, Value{std::string("small")}, Value{std::string("medium")},
                           params) == doctest::Approx(1.0 / 3.0));
    CHECK(default_delta(g, "size") == 0.5);
}

TEST_CASE("exclude rules override inclusion") {
    const auto g = corner_space();
    const ExtendedPoint p = correct(g, {{"mode", Value{std::string("sport")}},
                                        {"size", Value{std::string("huge")}},
                                        {"trim", Value{std::string("small")}},
                                        {"boost", Value{0.7}}});
    CHECK_FALSE(p.values[g.index_of("boost")].has_value());
    CHECK(is_valid(g, p).ok);

    const ExtendedPoint q = correct(g, {{"mode", Value{std::string("sport")}},
                                        {"size", Value{std::string("large")}},
                                        {"trim", Value{std::string("small")}},
                                        {"boost", Value{0.7}}});
    CHECK(q.values[g.index_of("boost")].has_value());
}

TEST_CASE("discrete order relations prune enumeration and correction") {
    const auto g = corner_space();
    // trim <= size by rank: 4+3+2+1 = 10 ordered pairs, x mode levels, with
    // boost abstracted to activeness.
    const auto configs = enumerate_discrete(g);
    long long expect = 0;
    for (int s = 0; s < 4; ++s)
        for (int t = 0; t <= s; ++t) expect += 2;
    CHECK(static_cast<long long>(configs.size()) == expect);
    CHECK(static_cast<long long>(configs.size()) == brute_force_valid_count(g));

    // Correction clamps the later-processed endpoint onto the feasible ranks.
    const ExtendedPoint p = correct(g, {{"size", Value{std::string("medium")}},
                                        {"trim", Value{std::string("huge")}},
                                        {"mode", Value{std::string("eco")}}});
    const auto rank = [&](const char* var) {
        return g.variable(g.index_of(var)).domain.level_index(*p.values[g.index_of(var)]);
    };
    CHECK(rank("trim") <= rank("size"));
    CHECK(is_valid(g, p).ok);
}

TEST_CASE("ordinal snapping picks the nearest rank, ties toward the lower") {
    VariableDecl size{"size", {VarType::Ordinal, {}, {}, {"s", "m", "l", "xl", "xxl"}}};
    VariableDecl gate{"gate", {VarType::Categorical, {}, {}, {"a", "b"}}};
    std::vector<DecreeRule> rules = {
        {"gate", Condition{{0}, {}}, "size",
         {EffectKind::RestrictBounds, {0, 2}, {}, {}, {}}},  // a -> {s, l}
        {"gate", Condition{{1}, {}}, "size",
         {EffectKind::RestrictBounds, {0, 3}, {}, {}, {}}},  // b -> {s, xl}
    };
    const auto g = DesignSpaceGraph::build({size, gate}, std::move(rules));
    auto snap = [&](const char* gate_level, const char* raw) {
        const ExtendedPoint p = correct(g, {{"gate", Value{std::string(gate_level)}},
                                            {"size", Value{std::string(raw)}}});
        return std::get<std::string>(*p.values[g.index_of("size")]);
    };
    CHECK(snap("a", "m") == "s");    // tie between ranks 0 and 2: lower wins
    CHECK(snap("b", "m") == "s");    // rank 1 is nearer 0 than 3
    CHECK(snap("b", "l") == "xl");   // rank 2 is nearer 3 than 0
    CHECK(snap("b", "xxl") == "xl");
}

TEST_CASE("ordinal variables flow through kernels and sampling") {
    const auto g = std::make_shared<DesignSpaceGraph>(corner_space());
    for (const KernelKind kind :
         {KernelKind::Hier, KernelKind::Gower, KernelKind::ContinuousRelaxation}) {
        const KernelHyperparams hp = KernelHyperparams::defaults(*g, kind);
        const auto pts = sample_valid(*g, 20, 7);
        const auto [eig, pass] = spd_check(gram(*g, pts, hp), 1e-8);
        INFO("kind ", kernel_kind_name(kind), " min eig ", eig);
        CHECK(pass);
        for (const auto& p : pts) CHECK(is_valid(*g, p).ok);
    }
}

TEST_CASE("the corner space round-trips through the file format") {
    const auto g = corner_space();
    const std::string text = serialize_design_space(g);
    const DesignSpaceGraph back = parse_design_space_text(text);
    CHECK(serialize_design_space(back) == text);
    CHECK(enumerate_discrete(back).size() == enumerate_discrete(g).size());
}

TEST_CASE("non-finite targets are rejected") {
    const ProblemSpec problem = get_problem("dragon_lite");
    Dataset data;
    data.points = sample_valid(*problem.graph, 5, 3);
    data.targets = {1.0, 2.0, std::nan(""), 4.0, 5.0};
    CHECK_THROWS_AS(fit(problem.graph, data, KernelKind::Hier), NonFiniteError);
}
