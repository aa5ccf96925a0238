// Command-line front end: parse a problem config, run one computation and
// write CSV or JSON. Exit status 0 on success, 2 on domain errors, 1 on I/O,
// usage or schema errors.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dprime/asymptotics.hpp"
#include "dprime/classify.hpp"
#include "dprime/config.hpp"
#include "dprime/errors.hpp"
#include "dprime/resolvent.hpp"
#include "dprime/spectrum.hpp"

using namespace dprime;

namespace {

struct Flags {
    std::string config;
    std::string out;
    std::string format;
    std::optional<long> count;
    std::string window;
    std::string levels = "2..8";
    std::string z = "-1";
    std::optional<unsigned long long> seed;
    std::optional<double> tol;
};

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* flag) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InputError(std::string(flag) + ": cannot parse '" + s + "'");
    return v;
}

std::pair<std::string, std::string> split_once(const std::string& s, const std::string& sep) {
    const auto pos = s.find(sep);
    if (pos == std::string::npos) return {s, ""};
    return {s.substr(0, pos), s.substr(pos + sep.size())};
}

std::pair<double, double> parse_window(const std::string& s) {
    const auto [lo, hi] = split_once(s, ",");
    if (hi.empty()) throw InputError("--window: expected LO,HI");
    const double l = parse_double(lo, "--window"), h = parse_double(hi, "--window");
    if (!(l <= h)) throw InputError("--window: LO must not exceed HI");
    return {l, h};
}

std::vector<int> parse_levels(const std::string& s) {
    const auto [lo, hi] = split_once(s, "..");
    if (hi.empty()) throw InputError("--levels: expected A..B");
    const double a = parse_double(lo, "--levels"), b = parse_double(hi, "--levels");
    if (a != std::floor(a) || b != std::floor(b) || a < 0 || b <= a) throw InputError("--levels: need integers 0 <= A < B");
    std::vector<int> out;
    for (int l = static_cast<int>(a); l <= static_cast<int>(b); ++l) out.push_back(l);
    return out;
}

Complex parse_z(const std::string& s) {
    const auto [re, im] = split_once(s, ",");
    return {parse_double(re, "--z"), im.empty() ? 0.0 : parse_double(im, "--z")};
}

EigenOptions eigen_options(const Tolerances& t) {
    EigenOptions o;
    o.rel_tol = t.rel_tol;
    o.abs_tol = t.abs_tol;
    return o;
}

// Output assembled in memory and written once at the end.
struct Output {
    std::string command;
    std::string method;
    std::string hash;
    Tolerances tol;
    std::string note;  // extra key=value pairs for the CSV comment line
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    Json result = Json::object();

    std::string csv() const {
        std::ostringstream s;
        s << "# dprime " << library_version() << " command=" << command << " method=" << method
          << " problem_hash=" << hash;
        if (!note.empty()) s << ' ' << note;
        s << '\n';
        for (std::size_t i = 0; i < header.size(); ++i) s << (i ? "," : "") << header[i];
        s << '\n';
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) s << (i ? "," : "") << r[i];
            s << '\n';
        }
        return s.str();
    }

    std::string json() const {
        const Json env = result_envelope(command, method, hash, tol, result);
        validate_result(env);
        return env.dump(2) + "\n";
    }
};

struct Context {
    ProblemConfig config;
    std::string hash;
};

Context load(const Flags& f) {
    if (f.config.empty()) throw InputError("--config is required for this command");
    Context c{load_config(f.config), {}};
    if (f.tol) {
        if (!(*f.tol > 0.0)) throw InputError("--tol must be positive");
        c.config.tolerances.rel_tol = *f.tol;
        c.config.tolerances.hs_tol = *f.tol;
    }
    c.hash = problem_hash(to_json(c.config));
    return c;
}

Output start(const std::string& command, const std::string& method, const Context& c) {
    Output o;
    o.command = command;
    o.method = method;
    o.hash = c.hash;
    o.tol = c.config.tolerances;
    return o;
}

Output cmd_spectrum(const Flags& f) {
    const Context c = load(f);
    const RealizedProblem p(c.config.problem);
    const long count = f.count.value_or(10);
    if (count < 1) throw InputError("--count must be positive");
    double lo = -INFINITY, hi = INFINITY;
    if (!f.window.empty()) std::tie(lo, hi) = parse_window(f.window);
    const SpectralData d = eigenvalues(p, static_cast<std::size_t>(count), lo, hi, eigen_options(c.config.tolerances));

    Output o = start("spectrum", p.nonnegative_measure() ? "oscillation-count" : "galerkin-bracket-shooting", c);
    o.header = {"n", "lambda", "norming_constant"};
    Json list = Json::array();
    for (const Eigenpair& e : d.eigen) {
        o.rows.push_back({std::to_string(e.n), num(e.lambda), num(e.norming)});
        list.push_back({{"n", e.n}, {"lambda", e.lambda}, {"norming_constant", e.norming}});
    }
    o.result = {{"window", {lo, hi}}, {"eigenpairs", list}};
    return o;
}

std::string kappa_method(const RealizedProblem& p) {
    if (p.zero_potential()) return "measure-count";
    if (p.nonnegative_measure()) return "oscillation-count";
    return "eigenvalue-count";
}

Json kappa_json(const KappaMinus& k) { return k.infinite ? Json("infinite") : Json(k.count); }

// Random signed atomic measures on (0,1), Neumann at 0 and Dirichlet at 1,
// q = 0: the count from the measure against oracle inertia.
Output kappa_sweep(const Flags& f) {
    const long count = f.count.value_or(100);
    if (count < 1) throw InputError("--count must be positive");
    const unsigned long long seed = *f.seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> natoms(1, 6);
    std::uniform_real_distribution<double> pos(0.02, 0.98);
    std::uniform_real_distribution<double> mag(0.05, 1.5);
    std::bernoulli_distribution neg(0.5);

    Output o;
    o.command = "kappa";
    o.method = "measure-count";
    o.hash = problem_hash(Json{{"sweep", "kappa"}, {"seed", seed}, {"count", count}});
    o.header = {"instance", "atoms", "negative_atoms", "kappa_minus", "oracle_inertia", "agree"};
    Json rows = Json::array();
    long failures = 0;
    for (long i = 0; i < count; ++i) {
        const int n = natoms(rng);
        std::vector<double> xs;
        while (static_cast<int>(xs.size()) < n) {
            const double x = pos(rng);
            bool ok = true;
            for (double y : xs) ok = ok && std::abs(x - y) >= 0.02;
            if (ok) xs.push_back(x);
        }
        std::sort(xs.begin(), xs.end());
        ProblemSpec s;
        s.left = Boundary::Neumann;
        s.right = Boundary::Dirichlet;
        std::size_t negatives = 0;
        for (double x : xs) {
            double beta = mag(rng);
            if (neg(rng)) {
                beta = -beta;
                ++negatives;
            }
            s.measure.atoms.push_back({x, beta});
        }
        const RealizedProblem p(s);
        const KappaMinus k = negative_count(p);
        const std::size_t inertia = galerkin_oracle(p, default_oracle_mesh(p), 1).inertia_at_zero;
        const bool agree = !k.infinite && k.count == negatives && inertia == negatives;
        failures += agree ? 0 : 1;
        o.rows.push_back({std::to_string(i), std::to_string(n), std::to_string(negatives),
                          k.infinite ? "infinite" : std::to_string(k.count), std::to_string(inertia),
                          agree ? "1" : "0"});
        rows.push_back({{"instance", i},
                        {"atoms", n},
                        {"negative_atoms", negatives},
                        {"kappa_minus", kappa_json(k)},
                        {"oracle_inertia", inertia},
                        {"agree", agree}});
    }
    o.note = "seed=" + std::to_string(seed) + " failures=" + std::to_string(failures);
    o.result = {{"seed", seed}, {"instances", rows}, {"failures", failures}};
    return o;
}

Output cmd_kappa(const Flags& f) {
    if (f.config.empty() && f.seed) return kappa_sweep(f);
    const Context c = load(f);
    const RealizedProblem p(c.config.problem);
    const KappaMinus k = negative_count(p, eigen_options(c.config.tolerances));
    Output o = start("kappa", kappa_method(p), c);
    o.header = {"kappa_minus"};
    o.rows.push_back({k.infinite ? "infinite" : std::to_string(k.count)});
    o.result = {{"kappa_minus", kappa_json(k)}};
    return o;
}

Output cmd_resolvent_study(const Flags& f) {
    const Context c = load(f);
    const std::vector<int> levels = parse_levels(f.levels);
    const Complex z = parse_z(f.z);
    HsOptions hs;
    hs.tol = c.config.tolerances.hs_tol;
    const auto rows = convergence_study(c.config.problem, levels, z, hs);

    Output o = start("resolvent-study", "hilbert-schmidt-quadrature", c);
    o.note = "z=" + num(z.real()) + "," + num(z.imag()) + " reference_level=" + std::to_string(levels.back());
    o.header = {"level", "hs", "hs_decreasing", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "lambda_5"};
    Json list = Json::array();
    for (const StudyRow& r : rows) {
        std::vector<std::string> line{std::to_string(r.level), num(r.hs), r.hs_decreasing ? "1" : "0"};
        Json lam = Json::array();
        for (std::size_t i = 0; i < 5; ++i) {
            const double v = i < r.lambda.size() ? r.lambda[i] : NAN;
            line.push_back(num(v));
            lam.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
        }
        o.rows.push_back(std::move(line));
        list.push_back({{"level", r.level}, {"hs", r.hs}, {"hs_decreasing", r.hs_decreasing}, {"lambda", lam}});
    }
    o.result = {{"z", {z.real(), z.imag()}}, {"reference_level", levels.back()}, {"rows", list}};
    return o;
}

Output cmd_mfunction(const Flags& f) {
    const Context c = load(f);
    const RealizedProblem p(c.config.problem);
    const Complex z = parse_z(f.z);
    const Complex m = m_function(p, z);
    Output o = start("mfunction", "solution-ratio", c);
    o.header = {"z_re", "z_im", "m_re", "m_im"};
    o.rows.push_back({num(z.real()), num(z.imag()), num(m.real()), num(m.imag())});
    o.result = {{"z", {z.real(), z.imag()}}, {"m", {m.real(), m.imag()}}};
    return o;
}

Json fit_json(const std::string& check, const AsymptoticFit& fit) {
    Json samples = Json::array();
    for (std::size_t i = 0; i < fit.samples.size(); ++i) {
        Json s = {{"abscissa", fit.samples[i].first}, {"value", fit.samples[i].second}};
        if (i < fit.ratios.size()) s["ratio"] = {fit.ratios[i].real(), fit.ratios[i].imag()};
        samples.push_back(s);
    }
    const auto opt_num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    return {{"check", check},
            {"model", fit.model},
            {"fitted_coefficient", opt_num(fit.fitted_coefficient)},
            {"max_rel_dev", opt_num(fit.max_rel_dev)},
            {"dropped", fit.dropped},
            {"trend_to_zero", fit.trend_to_zero},
            {"samples", samples}};
}

Output cmd_asymptotics(const Flags& f) {
    const Context c = load(f);
    const RealizedProblem p(c.config.problem);
    const EigenOptions eo = eigen_options(c.config.tolerances);
    std::vector<std::pair<std::string, AsymptoticFit>> fits;
    const AsymptoticsConfig ac = c.config.asymptotics.value_or(AsymptoticsConfig{});
    if (!ac.r_grid.empty()) fits.emplace_back("m", m_asymptotics_check(p, ac.alpha, ac.r_grid, ac.mu));
    if (!ac.t_grid.empty()) fits.emplace_back("rho", rho_asymptotics_check(p, ac.t_grid, ac.alpha, eo));
    if (fits.empty()) {
        const long count = f.count.value_or(100);
        if (count < 1) throw InputError("--count must be positive");
        const SpectralData d = eigenvalues(p, static_cast<std::size_t>(count), -INFINITY, INFINITY, eo);
        fits.emplace_back("weyl", weyl_fit(d, p.a(), p.b()));
    }

    Output o = start("asymptotics", "ratio-window", c);
    o.note = "alpha=" + num(ac.alpha);
    o.header = {"check", "abscissa", "value", "ratio_re", "ratio_im"};
    Json list = Json::array();
    for (const auto& [name, fit] : fits) {
        for (std::size_t i = 0; i < fit.samples.size(); ++i) {
            const bool has_ratio = i < fit.ratios.size();
            o.rows.push_back({name, num(fit.samples[i].first), num(fit.samples[i].second),
                              num(has_ratio ? fit.ratios[i].real() : NAN), num(has_ratio ? fit.ratios[i].imag() : NAN)});
        }
        list.push_back(fit_json(name, fit));
    }
    o.result = {{"alpha", ac.alpha}, {"checks", list}};
    return o;
}

EndpointDescriptor derived_endpoint(double x) {
    EndpointDescriptor d;
    d.finite = std::isfinite(x);
    return d;
}

Output cmd_classify(const Flags& f) {
    const Context c = load(f);
    const ProblemSpec& s = c.config.problem;
    const EndpointDescriptor ld = c.config.left_endpoint.value_or(derived_endpoint(s.a));
    const EndpointDescriptor rd = c.config.right_endpoint.value_or(derived_endpoint(s.b));
    const EndpointVerdict lv = classify_endpoint(ld, EndpointSide::Left);
    const EndpointVerdict rv = classify_endpoint(rd, EndpointSide::Right);
    const DeficiencyIndices di = deficiency_indices(lv, rv);

    Output o = start("classify", "endpoint-descriptors", c);
    o.header = {"side", "kind", "deficiency_index"};
    o.rows.push_back({"left", to_string(lv.kind), std::to_string(di.n)});
    o.rows.push_back({"right", to_string(rv.kind), std::to_string(di.n)});
    o.result = {{"left", {{"kind", to_string(lv.kind)}, {"reason", lv.reason}}},
                {"right", {{"kind", to_string(rv.kind)}, {"reason", rv.reason}}},
                {"deficiency_indices", {di.n, di.n}},
                {"self_adjoint", di.self_adjoint()}};
    return o;
}

Output cmd_criteria(const Flags& f) {
    const Context c = load(f);
    if (!c.config.criteria) throw SchemaError("/criteria", "required key missing for the criteria command");
    const CriteriaConfig& cc = *c.config.criteria;
    CriteriaOptions opt;
    opt.lower_semibounded = cc.lower_semibounded;
    opt.epsilon_grid = cc.epsilon_grid;
    const CriteriaReport r = evaluate_criteria(realize_gaps(cc), c.config.problem.potential, opt);

    Output o = start("criteria", "windowed-trend", c);
    o.note = std::string("verdict=") + to_string(r.verdict);
    o.header = {"series", "parameter", "abscissa", "value"};
    Json mol = Json::array();
    for (const MolchanovSeries& m : r.molchanov) {
        Json vals = Json::array();
        for (const auto& [x, v] : m.values) {
            o.rows.push_back({"molchanov", num(m.epsilon), num(x), num(v)});
            vals.push_back({x, v});
        }
        mol.push_back({{"epsilon", m.epsilon}, {"increasing", m.increasing}, {"values", vals}});
    }
    Json means = Json::array(), necessary = Json::array();
    for (const auto& [k, v] : r.gap_means) {
        o.rows.push_back({"gap_mean", "0", std::to_string(k), num(v)});
        means.push_back({k, v});
    }
    for (const auto& [k, v] : r.necessary_seq) {
        o.rows.push_back({"necessary", "0", std::to_string(k), num(v)});
        necessary.push_back({k, v});
    }
    o.result = {{"verdict", to_string(r.verdict)},
                {"brinck_sup", r.brinck_sup},
                {"molchanov_increasing", r.molchanov_increasing},
                {"gap_means_increasing", r.gap_means_increasing},
                {"necessary_increasing", r.necessary_increasing},
                {"molchanov", mol},
                {"gap_means", means},
                {"necessary_sequence", necessary}};
    return o;
}

void write(const Flags& f, const std::string& text) {
    if (f.out.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw InputError("failed writing to stdout");
        return;
    }
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw InputError("cannot open output file " + f.out);
    out << text;
    out.close();
    if (!out) throw InputError("failed writing " + f.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral computations for Schroedinger operators with singular measure interactions"};
    app.set_version_flag("--version", std::string(library_version()));
    app.require_subcommand(1, 1);

    Flags flags;
    struct Command {
        const char* name;
        const char* help;
        Output (*run)(const Flags&);
        const char* default_format;
    };
    const std::vector<Command> commands{
        {"spectrum", "eigenvalues and norming constants", cmd_spectrum, "csv"},
        {"classify", "limit point / limit circle verdicts and deficiency indices", cmd_classify, "json"},
        {"kappa", "number of negative eigenvalues, or a seeded random sweep", cmd_kappa, "json"},
        {"resolvent-study", "Hilbert-Schmidt distance of Cantor levels to the finest level", cmd_resolvent_study,
         "csv"},
        {"mfunction", "Weyl m-function at one spectral parameter", cmd_mfunction, "json"},
        {"asymptotics", "Weyl law, m-function and spectral-function ratio checks", cmd_asymptotics, "csv"},
        {"criteria", "discreteness criteria on a gap structure", cmd_criteria, "csv"},
    };
    for (const Command& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", flags.config, "problem config (JSON)");
        sub->add_option("--out", flags.out, "output path (default stdout)");
        sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--count", flags.count, "number of eigenvalues or sweep instances");
        sub->add_option("--window", flags.window, "spectral window LO,HI");
        sub->add_option("--levels", flags.levels, "level range A..B")->capture_default_str();
        sub->add_option("--z", flags.z, "spectral parameter RE[,IM]")->capture_default_str();
        sub->add_option("--seed", flags.seed, "seed for randomized sweeps");
        sub->add_option("--tol", flags.tol, "override relative and quadrature tolerances");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (const Command& c : commands) {
            if (!app.got_subcommand(c.name)) continue;
            const Output o = c.run(flags);
            const std::string format = flags.format.empty() ? c.default_format : flags.format;
            write(flags, format == "csv" ? o.csv() : o.json());
        }
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << '\n';
        return 1;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
