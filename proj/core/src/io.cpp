#include "hdsg/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hdsg/errors.hpp"

namespace hdsg {

using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ParseError(path + ": " + what);
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) fail(path + "." + key, "unknown key");
    }
}

Value value_from_json(const Domain& dom, const json& j, const std::string& path) {
    switch (dom.type) {
        case VarType::Continuous:
            if (!j.is_number()) fail(path, "expected a number");
            return j.get<double>();
        case VarType::Integer:
            if (!j.is_number_integer()) fail(path, "expected an integer");
            return j.get<long long>();
        default:
            if (!j.is_string()) fail(path, "expected a level label");
            return j.get<std::string>();
    }
}

json value_to_json(const Value& v) {
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    if (std::holds_alternative<long long>(v)) return std::get<long long>(v);
    return std::get<std::string>(v);
}

std::vector<std::size_t> levels_from_values(const Domain& dom, const json& arr,
                                            const std::string& path) {
    if (!arr.is_array()) fail(path, "expected an array of values");
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < arr.size(); ++k) {
        const Value v = value_from_json(dom, arr[k], path + "[" + std::to_string(k) + "]");
        try {
            idx.push_back(dom.level_index(v));
        } catch (const DomainError& e) {
            fail(path + "[" + std::to_string(k) + "]", e.what());
        }
    }
    return idx;
}

Interval interval_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(path, "expected [lower, upper]");
    return {j[0].get<double>(), j[1].get<double>()};
}

AffineBound affine_from_json(const json& j, const std::string& path) {
    check_keys(j, path, {"offset", "slope"});
    AffineBound b;
    if (j.contains("offset")) b.offset = j["offset"].get<double>();
    if (j.contains("slope")) b.slope = j["slope"].get<double>();
    return b;
}

VariableDecl variable_from_json(const json& j, const std::string& path) {
    check_keys(j, path, {"name", "type", "bounds", "levels"});
    if (!j.contains("name") || !j["name"].is_string()) fail(path, "missing variable name");
    if (!j.contains("type") || !j["type"].is_string()) fail(path, "missing variable type");
    VariableDecl d;
    d.name = j["name"].get<std::string>();
    d.domain.type = var_type_from_name(j["type"].get<std::string>());
    if (d.domain.type == VarType::Continuous) {
        if (!j.contains("bounds")) fail(path, "continuous variable needs bounds");
        d.domain.bounds = interval_from_json(j["bounds"], path + ".bounds");
    } else {
        if (!j.contains("levels") || !j["levels"].is_array())
            fail(path, "discrete variable needs levels");
        for (std::size_t k = 0; k < j["levels"].size(); ++k) {
            const json& lv = j["levels"][k];
            const std::string lp = path + ".levels[" + std::to_string(k) + "]";
            if (d.domain.type == VarType::Integer) {
                if (!lv.is_number_integer()) fail(lp, "expected an integer level");
                d.domain.int_levels.push_back(lv.get<long long>());
            } else {
                if (!lv.is_string()) fail(lp, "expected a string level");
                d.domain.labels.push_back(lv.get<std::string>());
            }
        }
    }
    return d;
}

struct DeclLookup {
    const std::vector<VariableDecl>& decls;
    const Domain& domain(const std::string& name, const std::string& path) const {
        for (const auto& d : decls)
            if (d.name == name) return d.domain;
        fail(path, "unknown variable '" + name + "'");
    }
};

Condition condition_from_json(const DeclLookup& look, const std::string& parent, const json& j,
                              const std::string& path) {
    Condition c;
    if (j.is_null()) return c;
    check_keys(j, path, {"values", "range"});
    if (j.contains("values"))
        c.levels = levels_from_values(look.domain(parent, path), j["values"], path + ".values");
    if (j.contains("range")) c.range = interval_from_json(j["range"], path + ".range");
    return c;
}

Effect effect_from_json(const DeclLookup& look, const std::string& target, const json& j,
                        const std::string& path) {
    check_keys(j, path, {"kind", "values", "range", "lower", "upper"});
    if (!j.contains("kind") || !j["kind"].is_string()) fail(path, "missing effect kind");
    const std::string kind = j["kind"].get<std::string>();
    Effect e;
    if (kind == "include") e.kind = EffectKind::Include;
    else if (kind == "exclude") e.kind = EffectKind::Exclude;
    else if (kind == "restrict") e.kind = EffectKind::RestrictBounds;
    else fail(path + ".kind", "expected include | exclude | restrict");
    const Domain& dom = look.domain(target, path);
    if (j.contains("values"))
        e.levels = levels_from_values(dom, j["values"], path + ".values");
    if (j.contains("range")) e.range = interval_from_json(j["range"], path + ".range");
    if (j.contains("lower")) e.lower = affine_from_json(j["lower"], path + ".lower");
    if (j.contains("upper")) e.upper = affine_from_json(j["upper"], path + ".upper");
    return e;
}

DecreeRule rule_from_json(const DeclLookup& look, const json& j, const std::string& path) {
    check_keys(j, path, {"parent", "when", "target", "effect"});
    for (const char* k : {"parent", "target"})
        if (!j.contains(k) || !j[k].is_string()) fail(path, std::string("missing ") + k);
    DecreeRule r;
    r.parent = j["parent"].get<std::string>();
    r.target = j["target"].get<std::string>();
    if (j.contains("when")) r.when = condition_from_json(look, r.parent, j["when"], path + ".when");
    if (!j.contains("effect")) fail(path, "missing effect");
    r.effect = effect_from_json(look, r.target, j["effect"], path + ".effect");
    return r;
}

NodeRef node_ref_from_json(const DeclLookup& look, const json& j, const std::string& path) {
    check_keys(j, path, {"var", "value"});
    if (!j.contains("var") || !j["var"].is_string()) fail(path, "missing var");
    NodeRef r;
    r.var = j["var"].get<std::string>();
    if (j.contains("value"))
        r.level = value_from_json(look.domain(r.var, path), j["value"], path + ".value");
    return r;
}

json condition_to_json(const DesignSpaceGraph& g, const DecreeRule& r) {
    json j = json::object();
    if (!r.when.levels.empty()) {
        const Domain& dom = g.variable(g.index_of(r.parent)).domain;
        json arr = json::array();
        for (std::size_t idx : r.when.levels) arr.push_back(value_to_json(dom.level_value(idx)));
        j["values"] = arr;
    }
    if (r.when.range) j["range"] = {r.when.range->lo, r.when.range->hi};
    return j;
}

json effect_to_json(const DesignSpaceGraph& g, const DecreeRule& r) {
    json j = json::object();
    switch (r.effect.kind) {
        case EffectKind::Include: j["kind"] = "include"; break;
        case EffectKind::Exclude: j["kind"] = "exclude"; break;
        case EffectKind::RestrictBounds: j["kind"] = "restrict"; break;
    }
    if (!r.effect.levels.empty()) {
        const Domain& dom = g.variable(g.index_of(r.target)).domain;
        json arr = json::array();
        for (std::size_t idx : r.effect.levels) arr.push_back(value_to_json(dom.level_value(idx)));
        j["values"] = arr;
    }
    if (r.effect.range) j["range"] = {r.effect.range->lo, r.effect.range->hi};
    if (r.effect.lower) j["lower"] = {{"offset", r.effect.lower->offset}, {"slope", r.effect.lower->slope}};
    if (r.effect.upper) j["upper"] = {{"offset", r.effect.upper->offset}, {"slope", r.effect.upper->slope}};
    return j;
}

DesignSpaceGraph graph_from_json(const json& root) {
    check_keys(root, "$", {"schema_version", "variables", "decree_rules", "incompatibilities",
                           "order_relations", "intermediate_nodes"});
    if (!root.contains("schema_version") || !root["schema_version"].is_number_integer())
        fail("$", "missing schema_version");
    if (root["schema_version"].get<int>() != kSchemaVersion)
        fail("$.schema_version", "unsupported schema version");
    if (!root.contains("variables") || !root["variables"].is_array())
        fail("$", "missing variables array");

    std::vector<VariableDecl> decls;
    for (std::size_t k = 0; k < root["variables"].size(); ++k)
        decls.push_back(
            variable_from_json(root["variables"][k], "$.variables[" + std::to_string(k) + "]"));
    if (decls.empty()) throw DomainError("design space declares no variables");

    // Intermediate declarations join the lookup so rules may reference them.
    std::vector<IntermediateNode> mids;
    std::vector<VariableDecl> lookup_decls = decls;
    if (root.contains("intermediate_nodes")) {
        const json& arr = root["intermediate_nodes"];
        if (!arr.is_array()) fail("$.intermediate_nodes", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "$.intermediate_nodes[" + std::to_string(k) + "]";
            check_keys(arr[k], path, {"name", "atoms", "targets"});
            if (!arr[k].contains("name") || !arr[k]["name"].is_string())
                fail(path, "missing intermediate name");
            IntermediateNode mid;
            mid.name = arr[k]["name"].get<std::string>();
            VariableDecl d;
            d.name = mid.name;
            d.domain.type = VarType::Integer;
            d.domain.int_levels = {0, 1};
            lookup_decls.push_back(d);
            mids.push_back(std::move(mid));
        }
        DeclLookup look{lookup_decls};
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "$.intermediate_nodes[" + std::to_string(k) + "]";
            IntermediateNode& mid = mids[k];
            if (arr[k].contains("atoms")) {
                const json& atoms = arr[k]["atoms"];
                if (!atoms.is_array()) fail(path + ".atoms", "expected an array");
                for (std::size_t a = 0; a < atoms.size(); ++a) {
                    const std::string ap = path + ".atoms[" + std::to_string(a) + "]";
                    check_keys(atoms[a], ap, {"var", "values", "op", "threshold"});
                    if (!atoms[a].contains("var") || !atoms[a]["var"].is_string())
                        fail(ap, "missing atom var");
                    FormulaAtom atom;
                    atom.var = atoms[a]["var"].get<std::string>();
                    if (atoms[a].contains("threshold")) {
                        atom.threshold = atoms[a]["threshold"].get<double>();
                        if (atoms[a].contains("op")) {
                            const std::string op = atoms[a]["op"].get<std::string>();
                            if (op == "<") atom.less_than = true;
                            else if (op == ">=") atom.less_than = false;
                            else fail(ap + ".op", "expected < or >=");
                        }
                    } else if (atoms[a].contains("values")) {
                        atom.levels = levels_from_values(look.domain(atom.var, ap),
                                                         atoms[a]["values"], ap + ".values");
                    } else {
                        fail(ap, "atom needs values or threshold");
                    }
                    mid.atoms.push_back(std::move(atom));
                }
            }
            if (arr[k].contains("targets")) {
                const json& ts = arr[k]["targets"];
                if (!ts.is_array()) fail(path + ".targets", "expected an array");
                for (std::size_t t = 0; t < ts.size(); ++t)
                    mid.targets.push_back(
                        rule_from_json(look, ts[t], path + ".targets[" + std::to_string(t) + "]"));
            }
        }
    }

    DeclLookup look{lookup_decls};
    std::vector<DecreeRule> rules;
    if (root.contains("decree_rules")) {
        const json& arr = root["decree_rules"];
        if (!arr.is_array()) fail("$.decree_rules", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k)
            rules.push_back(rule_from_json(look, arr[k], "$.decree_rules[" + std::to_string(k) + "]"));
    }
    std::vector<IncompatibilityEdge> incompat;
    if (root.contains("incompatibilities")) {
        const json& arr = root["incompatibilities"];
        if (!arr.is_array()) fail("$.incompatibilities", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "$.incompatibilities[" + std::to_string(k) + "]";
            check_keys(arr[k], path, {"a", "b"});
            if (!arr[k].contains("a") || !arr[k].contains("b")) fail(path, "missing endpoint");
            incompat.push_back({node_ref_from_json(look, arr[k]["a"], path + ".a"),
                                node_ref_from_json(look, arr[k]["b"], path + ".b")});
        }
    }
    std::vector<OrderRelation> orders;
    if (root.contains("order_relations")) {
        const json& arr = root["order_relations"];
        if (!arr.is_array()) fail("$.order_relations", "expected an array");
        for (std::size_t k = 0; k < arr.size(); ++k) {
            const std::string path = "$.order_relations[" + std::to_string(k) + "]";
            check_keys(arr[k], path, {"lesser", "greater", "strict"});
            OrderRelation o;
            if (!arr[k].contains("lesser") || !arr[k].contains("greater"))
                fail(path, "missing endpoint");
            o.lesser = arr[k]["lesser"].get<std::string>();
            o.greater = arr[k]["greater"].get<std::string>();
            if (arr[k].contains("strict")) o.strict = arr[k]["strict"].get<bool>();
            orders.push_back(std::move(o));
        }
    }
    return DesignSpaceGraph::build(std::move(decls), std::move(rules), std::move(incompat),
                                   std::move(orders), std::move(mids));
}

} // namespace

DesignSpaceGraph parse_design_space_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return graph_from_json(root);
}

DesignSpaceGraph parse_design_space(const std::string& path) {
    return parse_design_space_text(read_text_file(path));
}

std::string serialize_design_space(const DesignSpaceGraph& g) {
    json root;
    root["schema_version"] = kSchemaVersion;
    json vars = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.is_intermediate(i)) continue;
        const auto& d = g.variable(i);
        json v;
        v["name"] = d.name;
        v["type"] = var_type_name(d.domain.type);
        if (d.domain.type == VarType::Continuous) {
            v["bounds"] = {d.domain.bounds.lo, d.domain.bounds.hi};
        } else {
            json levels = json::array();
            for (std::size_t l = 0; l < d.domain.level_count(); ++l)
                levels.push_back(value_to_json(d.domain.level_value(l)));
            v["levels"] = levels;
        }
        vars.push_back(v);
    }
    root["variables"] = vars;

    json rules = json::array();
    for (const auto& r : g.rules()) {
        json j;
        j["parent"] = r.parent;
        const json cond = condition_to_json(g, r);
        if (!cond.empty()) j["when"] = cond;
        j["target"] = r.target;
        j["effect"] = effect_to_json(g, r);
        rules.push_back(j);
    }
    root["decree_rules"] = rules;

    json incompat = json::array();
    for (const auto& e : g.incompatibilities()) {
        json j;
        j["a"]["var"] = e.a.var;
        if (e.a.level) j["a"]["value"] = value_to_json(*e.a.level);
        j["b"]["var"] = e.b.var;
        if (e.b.level) j["b"]["value"] = value_to_json(*e.b.level);
        incompat.push_back(j);
    }
    root["incompatibilities"] = incompat;

    json orders = json::array();
    for (const auto& o : g.orders())
        orders.push_back({{"lesser", o.lesser}, {"greater", o.greater}, {"strict", o.strict}});
    root["order_relations"] = orders;

    json mids = json::array();
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.is_intermediate(i)) continue;
        json j;
        j["name"] = g.variable(i).name;
        json atoms = json::array();
        for (const auto& atom : *g.formula(i)) {
            json a;
            a["var"] = atom.var;
            if (atom.threshold) {
                a["op"] = atom.less_than ? "<" : ">=";
                a["threshold"] = *atom.threshold;
            } else {
                const Domain& dom = g.variable(g.index_of(atom.var)).domain;
                json vals = json::array();
                for (std::size_t idx : atom.levels) vals.push_back(value_to_json(dom.level_value(idx)));
                a["values"] = vals;
            }
            atoms.push_back(a);
        }
        j["atoms"] = atoms;
        mids.push_back(j);
    }
    root["intermediate_nodes"] = mids;
    return root.dump(2) + "\n";
}

std::string format_point(const DesignSpaceGraph& g, const ExtendedPoint& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (i) os << ' ';
        os << g.variable(i).name << '=';
        os << (p.values[i] ? value_to_string(*p.values[i]) : "EXC");
    }
    return os.str();
}

namespace {

std::vector<std::pair<std::string, std::string>> split_pairs(const std::string& line) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ParseError("expected name=value, got '" + tok + "'");
        out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
    }
    return out;
}

Value value_from_string(const Domain& dom, const std::string& s) {
    try {
        switch (dom.type) {
            case VarType::Continuous: return std::stod(s);
            case VarType::Integer:    return static_cast<long long>(std::stoll(s));
            default:                  return s;
        }
    } catch (const std::exception&) {
        throw ParseError("cannot parse value '" + s + "'");
    }
}

} // namespace

ExtendedPoint parse_point_line(const DesignSpaceGraph& g, const std::string& line) {
    ExtendedPoint p;
    p.values.assign(g.size(), std::nullopt);
    p.active.assign(g.size(), false);
    for (const auto& [name, text] : split_pairs(line)) {
        const std::size_t i = g.index_of(name);
        if (text == "EXC") continue;
        p.values[i] = value_from_string(g.variable(i).domain, text);
        p.active[i] = true;
    }
    return p;
}

RawPoint parse_raw_line(const DesignSpaceGraph& g, const std::string& line) {
    RawPoint raw;
    for (const auto& [name, text] : split_pairs(line)) {
        const std::size_t i = g.index_of(name);
        if (text == "EXC") continue;
        raw[name] = value_from_string(g.variable(i).domain, text);
    }
    return raw;
}

namespace {

std::vector<std::string> point_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        lines.push_back(line);
    }
    return lines;
}

} // namespace

std::vector<ExtendedPoint> read_point_file(const DesignSpaceGraph& g, const std::string& path) {
    std::vector<ExtendedPoint> out;
    for (const auto& line : point_lines(path)) out.push_back(parse_point_line(g, line));
    return out;
}

std::vector<RawPoint> read_raw_point_file(const DesignSpaceGraph& g, const std::string& path) {
    std::vector<RawPoint> out;
    for (const auto& line : point_lines(path)) out.push_back(parse_raw_line(g, line));
    return out;
}

void write_point_file(const DesignSpaceGraph& g, const std::vector<ExtendedPoint>& pts,
                      const std::string& path) {
    std::ostringstream os;
    for (const auto& p : pts) os << format_point(g, p) << '\n';
    write_text_file(path, os.str());
}

void save_model(const GpModel& m, const std::string& path) {
    json root;
    root["schema_version"] = kSchemaVersion;
    root["design_space"] = json::parse(serialize_design_space(*m.graph));
    root["kind"] = kernel_kind_name(m.hp.kind);
    root["theta_neu"] = m.hp.theta_neu;
    root["theta_meta"] = m.hp.theta_meta;
    root["theta_dec"] = m.hp.theta_dec;
    root["sigma2"] = m.hp.sigma2;
    root["nugget"] = m.hp.nugget;
    root["provenance"] = m.data.provenance;
    json pts = json::array();
    for (const auto& p : m.data.points) pts.push_back(format_point(*m.graph, p));
    root["points"] = pts;
    root["targets"] = m.data.targets;
    write_text_file(path, root.dump(2) + "\n");
}

GpModel load_model(const std::string& path) {
    json root;
    try {
        root = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    check_keys(root, "$", {"schema_version", "design_space", "kind", "theta_neu", "theta_meta",
                           "theta_dec", "sigma2", "nugget", "provenance", "points", "targets"});
    if (root["schema_version"].get<int>() != kSchemaVersion)
        fail("$.schema_version", "unsupported schema version");
    auto graph = std::make_shared<DesignSpaceGraph>(graph_from_json(root["design_space"]));
    KernelHyperparams hp;
    hp.kind = kernel_kind_from_name(root["kind"].get<std::string>());
    hp.theta_neu = root["theta_neu"].get<std::vector<double>>();
    hp.theta_meta = root["theta_meta"].get<std::vector<double>>();
    hp.theta_dec = root["theta_dec"].get<std::vector<double>>();
    hp.sigma2 = root["sigma2"].get<double>();
    hp.nugget = root["nugget"].get<double>();
    Dataset data;
    data.provenance = root.value("provenance", std::string{});
    for (const auto& line : root["points"])
        data.points.push_back(parse_point_line(*graph, line.get<std::string>()));
    data.targets = root["targets"].get<std::vector<double>>();
    return make_model(graph, std::move(data), hp);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

} // namespace hdsg
