#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "hdsg/errors.hpp"
#include "hdsg/io.hpp"
#include "hdsg/problems.hpp"
#include "helpers.hpp"

using namespace hdsg;
using namespace hdsg::testing;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("design-space round trip is the identity on the canonical form") {
    for (const auto& name : problem_names()) {
        const ProblemSpec p = get_problem(name);
        const std::string text = serialize_design_space(*p.graph);
        const DesignSpaceGraph back = parse_design_space_text(text);
        CHECK(serialize_design_space(back) == text);
        // Parsed graph behaves identically.
        CHECK(enumerate_discrete(back).size() ==
              static_cast<std::size_t>(p.known_valid_count));
        const ImputationStats a = stats(*p.graph), b = stats(back);
        CHECK(a.n_declared == b.n_declared);
        CHECK(a.n_dim_cont_mean == b.n_dim_cont_mean);
    }
}

TEST_CASE("schema violations are named by key path") {
    CHECK_THROWS_AS(parse_design_space_text("not json"), ParseError);
    CHECK_THROWS_AS(parse_design_space_text("{}"), ParseError);

    // empty variables list
    CHECK_THROWS_AS(parse_design_space_text(R"({"schema_version":1,"variables":[]})"),
                    DomainError);

    // unknown key, named in the message
    try {
        parse_design_space_text(R"({"schema_version":1,"variables":[],"surprise":3})");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("surprise") != std::string::npos);
    }

    try {
        parse_design_space_text(
            R"({"schema_version":1,"variables":[{"name":"x","type":"continuous","bounds":[0,1],"extra":1}]})");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("extra") != std::string::npos);
    }

    CHECK_THROWS_AS(parse_design_space_text(R"({"schema_version":99,"variables":[]})"),
                    ParseError);

    // rule naming an undeclared parent: resolved at build, named in the message
    try {
        parse_design_space_text(R"({"schema_version":1,
          "variables":[{"name":"x","type":"categorical","levels":["a"]}],
          "decree_rules":[{"parent":"ghost","target":"x","effect":{"kind":"include"}}]})");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }

    // condition value outside the parent's domain
    CHECK_THROWS_AS(parse_design_space_text(R"({"schema_version":1,
        "variables":[{"name":"x","type":"categorical","levels":["a","b"]},
                     {"name":"y","type":"categorical","levels":["c"]}],
        "decree_rules":[{"parent":"x","when":{"values":["zzz"]},"target":"y",
                         "effect":{"kind":"include"}}]})"),
                    ParseError);
}

TEST_CASE("point files round trip through format and parse") {
    const ProblemSpec p = get_problem("mlp");
    const auto pts = sample_valid(*p.graph, 10, 42);
    const std::string path = temp_path("hdsg_points_test.txt");
    write_point_file(*p.graph, pts, path);
    const auto back = read_point_file(*p.graph, path);
    REQUIRE(back.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(points_equal(pts[i], back[i]));
        CHECK(is_valid(*p.graph, back[i]).ok);
    }
    std::remove(path.c_str());

    CHECK_THROWS_AS(parse_point_line(*p.graph, "garbage-token"), ParseError);
    CHECK_THROWS_AS(parse_point_line(*p.graph, "unknown_var=3"), ReferenceError);

    const RawPoint raw = parse_raw_line(*p.graph, "optimizer=Adam learning_rate=0.25");
    CHECK(raw.size() == 2);
    CHECK(std::get<double>(raw.at("learning_rate")) == 0.25);
}

TEST_CASE("model save/load round trips predictions") {
    const ProblemSpec problem = get_problem("dragon_lite");
    Dataset data;
    data.points = sample_valid(*problem.graph, 15, 4);
    for (const auto& pt : data.points) data.targets.push_back(evaluate(problem, pt));
    data.provenance = "dragon_lite seed=4";
    const GpModel m = fit(problem.graph, data, KernelKind::Hier);

    const std::string path = temp_path("hdsg_model_test.json");
    save_model(m, path);
    const GpModel back = load_model(path);
    std::remove(path.c_str());

    CHECK(back.hp.kind == m.hp.kind);
    CHECK(back.hp.sigma2 == m.hp.sigma2);
    CHECK(back.data.provenance == m.data.provenance);
    for (const auto& x : sample_valid(*problem.graph, 10, 9)) {
        const auto a = predict(m, x);
        const auto b = predict(back, x);
        CHECK(a.first == doctest::Approx(b.first).epsilon(1e-9));
        CHECK(a.second == doctest::Approx(b.second).epsilon(1e-9));
    }
}

TEST_CASE("golden design-space files parse to the documented statistics") {
    // docs/spaces/*.json are committed renderings of the built-in problems.
    const std::string dir = std::string(HDSG_SOURCE_DIR) + "/docs/spaces/";
    for (const auto& name : problem_names()) {
        const ProblemSpec p = get_problem(name);
        const std::string path = dir + name + ".json";
        INFO("golden file ", path);
        const std::string text = read_text_file(path);
        CHECK(text == serialize_design_space(*p.graph));
        const DesignSpaceGraph g = parse_design_space(path);
        CHECK(static_cast<long long>(enumerate_discrete(g).size()) == p.known_valid_count);
    }
}
