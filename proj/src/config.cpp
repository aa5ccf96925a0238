#include "dprime/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "dprime/errors.hpp"

namespace dprime {

#ifndef DPRIME_VERSION
#define DPRIME_VERSION "0.0.0"
#endif

const char* library_version() { return DPRIME_VERSION; }

namespace {

// A JSON value together with its pointer, for error reporting.
class Node {
public:
    Node(const Json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {}

    const std::string& pointer() const { return ptr_; }
    const Json& raw() const { return j_; }

    [[noreturn]] void fail(const std::string& what) const { throw SchemaError(ptr_.empty() ? "/" : ptr_, what); }

    const Node& object(std::initializer_list<const char*> allowed) const {
        if (!j_.is_object()) fail("expected an object");
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool known = false;
            for (const char* k : allowed) known = known || it.key() == k;
            if (!known) Node(*it, child_ptr(it.key())).fail("unknown key");
        }
        return *this;
    }

    bool has(const char* key) const { return j_.contains(key); }
    Node at(const char* key) const {
        if (!j_.contains(key)) Node(j_, child_ptr(key)).fail("required key missing");
        return Node(j_.at(key), child_ptr(key));
    }
    std::vector<Node> items() const {
        if (!j_.is_array()) fail("expected an array");
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], ptr_ + "/" + std::to_string(i));
        return out;
    }

    double number() const {
        if (!j_.is_number()) fail("expected a number");
        const double v = j_.get<double>();
        if (!std::isfinite(v)) fail("expected a finite number");
        return v;
    }
    long integer() const {
        if (!j_.is_number_integer()) fail("expected an integer");
        return j_.get<long>();
    }
    bool boolean() const {
        if (!j_.is_boolean()) fail("expected a boolean");
        return j_.get<bool>();
    }
    std::string string() const {
        if (!j_.is_string()) fail("expected a string");
        return j_.get<std::string>();
    }
    std::vector<double> numbers() const {
        std::vector<double> out;
        for (const Node& n : items()) out.push_back(n.number());
        return out;
    }
    std::pair<double, double> pair() const {
        const auto v = items();
        if (v.size() != 2) fail("expected two numbers");
        return {v[0].number(), v[1].number()};
    }

private:
    std::string child_ptr(const std::string& key) const {
        std::string escaped;
        for (char c : key) {
            if (c == '~') escaped += "~0";
            else if (c == '/') escaped += "~1";
            else escaped += c;
        }
        return ptr_ + "/" + escaped;
    }

    const Json& j_;
    std::string ptr_;
};

Boundary parse_boundary(const Node& n) {
    const std::string s = n.string();
    if (s == "dirichlet") return Boundary::Dirichlet;
    if (s == "neumann") return Boundary::Neumann;
    n.fail("expected \"dirichlet\" or \"neumann\"");
}

const char* boundary_name(Boundary b) { return b == Boundary::Dirichlet ? "dirichlet" : "neumann"; }

const char* variation_name(VariationClass v) {
    switch (v) {
        case VariationClass::Finite: return "finite";
        case VariationClass::UnboundedPInL2: return "unbounded_p_in_l2";
        case VariationClass::PNotInL2: return "p_not_in_l2";
    }
    return "finite";
}

EndpointDescriptor parse_endpoint(const Node& n) {
    n.object({"finite", "variation", "q_in_class"});
    EndpointDescriptor d;
    d.finite = n.at("finite").boolean();
    if (n.has("variation")) {
        const Node v = n.at("variation");
        const std::string s = v.string();
        if (s == "finite") d.variation = VariationClass::Finite;
        else if (s == "unbounded_p_in_l2") d.variation = VariationClass::UnboundedPInL2;
        else if (s == "p_not_in_l2") d.variation = VariationClass::PNotInL2;
        else v.fail("expected \"finite\", \"unbounded_p_in_l2\" or \"p_not_in_l2\"");
    }
    if (n.has("q_in_class")) d.q_in_class = n.at("q_in_class").boolean();
    return d;
}

Json endpoint_json(const EndpointDescriptor& d) {
    return {{"finite", d.finite}, {"variation", variation_name(d.variation)}, {"q_in_class", d.q_in_class}};
}

SingularMeasure parse_measure(const Node& n) {
    n.object({"atoms", "cantor"});
    SingularMeasure m;
    if (n.has("atoms")) {
        for (const Node& a : n.at("atoms").items()) {
            a.object({"x", "beta"});
            m.atoms.push_back({a.at("x").number(), a.at("beta").number()});
        }
    }
    if (n.has("cantor")) {
        for (const Node& c : n.at("cantor").items()) {
            c.object({"support", "mass", "ratio", "level_cap"});
            CantorSpec s;
            std::tie(s.c, s.d) = c.at("support").pair();
            s.mass = c.at("mass").number();
            if (c.has("ratio")) s.ratio = c.at("ratio").number();
            if (c.has("level_cap")) s.level_cap = static_cast<int>(c.at("level_cap").integer());
            m.cantor.push_back(s);
        }
    }
    try {
        validate(m);
    } catch (const InputError& e) {
        n.fail(e.what());
    }
    return m;
}

PiecewisePotential parse_potential(const Node& n, double a, double b) {
    n.object({"breakpoints", "values"});
    PiecewisePotential q;
    q.breakpoints = n.at("breakpoints").numbers();
    q.values = n.at("values").numbers();
    if (q.breakpoints.empty() && q.values.empty()) return q;
    if (q.breakpoints.size() != q.values.size() + 1) n.fail("potential needs one more breakpoint than values");
    for (std::size_t i = 1; i < q.breakpoints.size(); ++i)
        if (!(q.breakpoints[i - 1] < q.breakpoints[i])) n.at("breakpoints").fail("breakpoints must increase");
    if (q.breakpoints.front() > a || q.breakpoints.back() < b) n.fail("potential cells must cover the interval");
    return q;
}

}  // namespace

ProblemConfig parse_config(const Json& j) {
    const Node root(j, "");
    root.object({"schema", "interval", "boundary", "potential", "measure", "level", "tolerances", "endpoints",
                 "criteria", "asymptotics"});
    const Node schema = root.at("schema");
    if (schema.integer() != kSchemaVersion) schema.fail("unsupported schema version");

    ProblemConfig c;
    ProblemSpec& p = c.problem;
    const Node interval = root.at("interval");
    std::tie(p.a, p.b) = interval.pair();
    if (!(p.a < p.b)) interval.fail("interval must satisfy a < b");

    if (root.has("boundary")) {
        const Node bd = root.at("boundary");
        bd.object({"left", "right"});
        if (bd.has("left")) p.left = parse_boundary(bd.at("left"));
        if (bd.has("right")) p.right = parse_boundary(bd.at("right"));
    }
    if (root.has("potential")) p.potential = parse_potential(root.at("potential"), p.a, p.b);
    if (root.has("measure")) p.measure = parse_measure(root.at("measure"));
    if (root.has("level")) {
        const Node lv = root.at("level");
        p.level = static_cast<int>(lv.integer());
        if (p.level < 0) lv.fail("level must be nonnegative");
    }

    if (root.has("tolerances")) {
        const Node t = root.at("tolerances");
        t.object({"rel_tol", "abs_tol", "hs_tol"});
        auto positive = [&](const char* key, double& out) {
            if (!t.has(key)) return;
            const Node n = t.at(key);
            out = n.number();
            if (!(out > 0.0)) n.fail("tolerance must be positive");
        };
        positive("rel_tol", c.tolerances.rel_tol);
        positive("abs_tol", c.tolerances.abs_tol);
        positive("hs_tol", c.tolerances.hs_tol);
    }

    if (root.has("endpoints")) {
        const Node e = root.at("endpoints");
        e.object({"left", "right"});
        if (e.has("left")) c.left_endpoint = parse_endpoint(e.at("left"));
        if (e.has("right")) c.right_endpoint = parse_endpoint(e.at("right"));
    }

    if (root.has("criteria")) {
        const Node n = root.at("criteria");
        n.object({"gaps", "harmonic", "start", "lower_semibounded", "epsilon_grid"});
        CriteriaConfig cc;
        if (n.has("gaps") == n.has("harmonic")) n.fail("give exactly one of \"gaps\" and \"harmonic\"");
        if (n.has("gaps")) {
            for (const Node& g : n.at("gaps").items()) {
                const auto [lo, hi] = g.pair();
                cc.gaps.gaps.push_back({lo, hi});
            }
        } else {
            const Node h = n.at("harmonic");
            const long k = h.integer();
            if (k < 1) h.fail("harmonic gap count must be positive");
            cc.harmonic = static_cast<std::size_t>(k);
        }
        if (n.has("start")) cc.start = n.at("start").number();
        if (n.has("lower_semibounded")) cc.lower_semibounded = n.at("lower_semibounded").boolean();
        if (n.has("epsilon_grid")) {
            const Node eg = n.at("epsilon_grid");
            cc.epsilon_grid = eg.numbers();
            if (cc.epsilon_grid.empty()) eg.fail("epsilon grid must not be empty");
            for (double e : cc.epsilon_grid)
                if (!(e > 0.0)) eg.fail("epsilon values must be positive");
        }
        c.criteria = cc;
    }

    if (root.has("asymptotics")) {
        const Node n = root.at("asymptotics");
        n.object({"alpha", "r_grid", "t_grid", "mu"});
        AsymptoticsConfig ac;
        if (n.has("alpha")) {
            const Node al = n.at("alpha");
            ac.alpha = al.number();
            if (ac.alpha < 0.0 || ac.alpha > 1.0) al.fail("alpha must lie in [0, 1]");
        }
        if (n.has("r_grid")) ac.r_grid = n.at("r_grid").numbers();
        if (n.has("t_grid")) ac.t_grid = n.at("t_grid").numbers();
        if (n.has("mu")) {
            const auto [re, im] = n.at("mu").pair();
            ac.mu = {re, im};
        }
        c.asymptotics = ac;
    }
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    Json j;
    try {
        j = Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
    return parse_config(j);
}

Json to_json(const ProblemConfig& c) {
    const ProblemSpec& p = c.problem;
    Json atoms = Json::array();
    for (const Atom& a : p.measure.atoms) atoms.push_back({{"x", a.x}, {"beta", a.beta}});
    Json cantor = Json::array();
    for (const CantorSpec& s : p.measure.cantor)
        cantor.push_back({{"support", {s.c, s.d}}, {"mass", s.mass}, {"ratio", s.ratio}, {"level_cap", s.level_cap}});

    Json j = {
        {"schema", kSchemaVersion},
        {"interval", {p.a, p.b}},
        {"boundary", {{"left", boundary_name(p.left)}, {"right", boundary_name(p.right)}}},
        {"potential", {{"breakpoints", p.potential.breakpoints}, {"values", p.potential.values}}},
        {"measure", {{"atoms", atoms}, {"cantor", cantor}}},
        {"level", p.level},
        {"tolerances",
         {{"rel_tol", c.tolerances.rel_tol}, {"abs_tol", c.tolerances.abs_tol}, {"hs_tol", c.tolerances.hs_tol}}},
    };
    if (c.left_endpoint || c.right_endpoint) {
        Json e = Json::object();
        if (c.left_endpoint) e["left"] = endpoint_json(*c.left_endpoint);
        if (c.right_endpoint) e["right"] = endpoint_json(*c.right_endpoint);
        j["endpoints"] = e;
    }
    if (c.criteria) {
        const CriteriaConfig& cc = *c.criteria;
        Json k = {{"start", cc.start}, {"lower_semibounded", cc.lower_semibounded}, {"epsilon_grid", cc.epsilon_grid}};
        if (cc.harmonic > 0) {
            k["harmonic"] = cc.harmonic;
        } else {
            Json gaps = Json::array();
            for (const Gap& g : cc.gaps.gaps) gaps.push_back({g.lo, g.hi});
            k["gaps"] = gaps;
        }
        j["criteria"] = k;
    }
    if (c.asymptotics) {
        const AsymptoticsConfig& ac = *c.asymptotics;
        j["asymptotics"] = {{"alpha", ac.alpha},
                            {"r_grid", ac.r_grid},
                            {"t_grid", ac.t_grid},
                            {"mu", {ac.mu.real(), ac.mu.imag()}}};
    }
    return j;
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string problem_hash(const Json& canonical) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical.dump())));
    return buf;
}

GapStructure realize_gaps(const CriteriaConfig& c) {
    if (c.harmonic == 0) return c.gaps;
    GapStructure g;
    double x = c.start;
    for (std::size_t k = 1; k <= c.harmonic; ++k) {
        const double d = 1.0 / static_cast<double>(k);
        g.gaps.push_back({x, x + d});
        x += d;
    }
    return g;
}

namespace {

const std::set<std::string>& known_commands() {
    static const std::set<std::string> s{"spectrum", "classify",   "kappa",   "resolvent-study",
                                         "mfunction", "asymptotics", "criteria"};
    return s;
}

}  // namespace

Json result_envelope(const std::string& command, const std::string& method, const std::string& hash,
                     const Tolerances& tol, Json result) {
    return {{"schema", kSchemaVersion},
            {"version", library_version()},
            {"command", command},
            {"method", method},
            {"problem_hash", hash},
            {"tolerances", {{"rel_tol", tol.rel_tol}, {"abs_tol", tol.abs_tol}, {"hs_tol", tol.hs_tol}}},
            {"result", std::move(result)}};
}

void validate_result(const Json& j) {
    const Node root(j, "");
    root.object({"schema", "version", "command", "method", "problem_hash", "tolerances", "result"});
    const Node schema = root.at("schema");
    if (schema.integer() != kSchemaVersion) schema.fail("unsupported schema version");
    const Node version = root.at("version");
    if (version.string() != library_version()) version.fail("version mismatch");
    const Node command = root.at("command");
    if (!known_commands().count(command.string())) command.fail("unknown command");
    if (root.at("method").string().empty()) root.at("method").fail("method must not be empty");
    const Node hash = root.at("problem_hash");
    const std::string h = hash.string();
    if (h.size() != 16 || h.find_first_not_of("0123456789abcdef") != std::string::npos)
        hash.fail("expected 16 lowercase hex digits");
    const Node tol = root.at("tolerances");
    tol.object({"rel_tol", "abs_tol", "hs_tol"});
    for (const char* k : {"rel_tol", "abs_tol", "hs_tol"})
        if (!(tol.at(k).number() > 0.0)) tol.at(k).fail("tolerance must be positive");
    if (!root.at("result").raw().is_object()) root.at("result").fail("expected an object");
}

}  // namespace dprime
