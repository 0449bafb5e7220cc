#include "elliptic/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "elliptic/errors.hpp"
#include "elliptic/report.hpp"

namespace elliptic {

namespace {

struct Settings {
    std::string command;

    // semilinear model (or h for dual solves)
    std::string family = "power";
    double lambda = 1.0;
    double p = 3.0;
    double c = 0.0;
    double sign = 1.0;
    std::string g_expr, gp_expr, G_expr;
    int N = 3;

    // diffusion
    bool mnls = false;
    std::string diffusion;
    double kappa = 1.0;
    double ell = 2.0;
    double l1 = 1.0;
    double l2 = 2.0;
    double a_c = 1.0;

    // numerical knobs
    double d_tol = 0.0;
    double ode_tol = 1e-12;
    double r_max_factor = 1.0;
    int mesh_n = kDefaultMesh;
    double R_max = 0.0;
    int per_decade = 10000;

    // command specific
    double d = 0.0;
    bool spectrum = false;
    std::string parameter;
    std::string values_text;
    std::vector<double> values;
    int jobs = 0;

    // output
    std::string out_path;
    std::string profile_path;
    std::string format = "json";

    std::set<std::string> given;  // model/diffusion keys set explicitly
    bool has(const std::string& k) const { return given.count(k) > 0; }
    bool dual() const { return mnls || !diffusion.empty(); }
};

const std::set<std::string> kModelKeys = {"lambda", "p", "c", "sign", "kappa", "ell", "l1", "l2", "a-c"};
const std::set<std::string> kSweepKeys = {"lambda", "p", "c", "kappa", "N"};

std::string fmt17(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

// ---------------------------------------------------------------- options

void add_model_options(CLI::App* app, Settings& s) {
    app->add_option("--family", s.family, "Builtin nonlinearity family")
        ->check(CLI::IsMember({"power", "cubic_quintic_defocusing", "cubic_quintic_focusing", "nagumo",
                               "quadratic_cubic"}));
    app->add_option("--lambda", s.lambda, "Linear coefficient (power)")->check(CLI::PositiveNumber);
    app->add_option("--p", s.p, "Exponent (power)")->check(CLI::Range(1.0 + 1e-12, 1e3));
    app->add_option("--c", s.c, "Family parameter c");
    app->add_option("--sign", s.sign, "Sign for quadratic_cubic (+1 or -1)");
    app->add_option("--g", s.g_expr, "Expression for g(s)");
    app->add_option("--g-prime", s.gp_expr, "Expression for g'(s)");
    app->add_option("--G", s.G_expr, "Expression for the primitive G(s)");
    app->add_option("--N", s.N, "Dimension")->check(CLI::Range(2, 10));
    app->add_flag("--mnls", s.mnls, "Diffusion a = 1 + 2 kappa t^2");
    app->add_option("--diffusion", s.diffusion, "Builtin diffusion family")
        ->check(CLI::IsMember({"mnls", "constant", "two_power", "gaussian"}));
    app->add_option("--kappa", s.kappa, "mNLS coefficient")->check(CLI::Range(0.0, 1e6));
    app->add_option("--ell", s.ell, "Growth exponent (constant diffusion)")->check(CLI::Range(0.0, 100.0));
    app->add_option("--l1", s.l1, "Lower exponent (two_power)");
    app->add_option("--l2", s.l2, "Upper exponent (two_power)");
    app->add_option("--a-c", s.a_c, "Gaussian diffusion width");
}

void add_knobs(CLI::App* app, Settings& s) {
    app->add_option("--d-tol", s.d_tol, "Bisection tolerance on d (0: to representability)")
        ->check(CLI::Range(0.0, 1e-2));
    app->add_option("--ode-tol", s.ode_tol, "Integrator tolerance")->check(CLI::Range(1e-14, 1e-4));
    app->add_option("--r-max-factor", s.r_max_factor, "Multiplier on the default shooting radius")
        ->check(CLI::Range(0.25, 64.0));
    app->add_option("--mesh-n", s.mesh_n, "Spectral mesh size")->check(CLI::Range(100, 1000000));
    app->add_option("--R-max", s.R_max, "Spectral domain radius (0: 1.5 r_max)")->check(CLI::Range(0.0, 1e4));
    app->add_option("--per-decade", s.per_decade, "Hypothesis grid density")->check(CLI::Range(10, 100000));
}

void add_output(CLI::App* app, Settings& s) {
    app->add_option("--out", s.out_path, "Report path (default: stdout)");
    app->add_option("--format", s.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

// ------------------------------------------------------------------ models

SemilinearModel make_model(const Settings& s) {
    if (!s.g_expr.empty() || !s.gp_expr.empty() || !s.G_expr.empty()) {
        if (s.g_expr.empty() || s.gp_expr.empty() || s.G_expr.empty())
            throw ConfigError("--g, --g-prime and --G must be given together");
        return expression_model(s.g_expr, s.gp_expr, s.G_expr);
    }
    std::map<std::string, double> params;
    if (s.family == "power") {
        params["lambda"] = s.lambda;
        params["p"] = s.p;
    } else {
        if (s.has("lambda")) params["lambda"] = s.lambda;
        if (s.has("p")) params["p"] = s.p;
    }
    if (s.has("c")) params["c"] = s.c;
    if (s.has("sign")) params["sign"] = s.sign;
    return builtin_model(s.family, params);
}

DiffusionModel make_diffusion(const Settings& s) {
    const std::string fam = s.mnls ? "mnls" : s.diffusion;
    if (s.mnls && !s.diffusion.empty() && s.diffusion != "mnls")
        throw ConfigError("--mnls conflicts with --diffusion " + s.diffusion);
    std::map<std::string, double> params;
    if (fam == "mnls") params["kappa"] = s.kappa;
    if (s.has("ell")) params["ell"] = s.ell;
    if (s.has("l1")) params["l1"] = s.l1;
    if (s.has("l2")) params["l2"] = s.l2;
    if (s.has("a-c")) params["c"] = s.a_c;
    if (fam != "mnls" && s.has("kappa")) params["kappa"] = s.kappa;
    return builtin_diffusion(fam, params);
}

ShootingOptions shooting(const Settings& s) {
    ShootingOptions o;
    o.ode_tol = s.ode_tol;
    o.r_max_factor = s.r_max_factor;
    return o;
}

Json config_json(const Settings& s) {
    Json j;
    j["command"] = s.command;
    if (!s.g_expr.empty()) {
        j["g"] = s.g_expr;
        j["g_prime"] = s.gp_expr;
        j["G"] = s.G_expr;
    } else {
        j["family"] = s.family;
        Json params = Json::object();
        if (s.family == "power" || s.has("lambda")) params["lambda"] = s.lambda;
        if (s.family == "power" || s.has("p")) params["p"] = s.p;
        if (s.has("c")) params["c"] = s.c;
        if (s.has("sign")) params["sign"] = s.sign;
        j["params"] = params;
    }
    j["N"] = s.N;
    if (s.dual()) {
        j["diffusion"] = s.mnls ? "mnls" : s.diffusion;
        Json params = Json::object();
        if (s.mnls || s.diffusion == "mnls") params["kappa"] = s.kappa;
        const std::pair<const char*, double> extra[] = {{"ell", s.ell}, {"l1", s.l1}, {"l2", s.l2}, {"a-c", s.a_c}};
        for (const auto& [k, v] : extra)
            if (s.has(k)) params[k] = v;
        j["diffusion_params"] = params;
    }
    j["d_tol"] = s.d_tol;
    j["ode_tol"] = s.ode_tol;
    j["r_max_factor"] = s.r_max_factor;
    if (s.command == "spectrum" || s.spectrum) {
        j["mesh_n"] = s.mesh_n;
        j["R_max"] = s.R_max;
    }
    if (s.command == "check") j["per_decade"] = s.per_decade;
    if (s.command == "classify") j["d"] = s.d;
    if (s.command == "sweep") {
        j["parameter"] = s.parameter;
        Json v = Json::array();
        for (double x : s.values) v.push_back(x);
        j["values"] = v;
    }
    return j;
}

Json envelope(const Settings& s) {
    const Json cfg = config_json(s);
    Json j;
    j["schema"] = kSchemaVersion;
    j["version"] = kVersion;
    j["command"] = s.command;
    j["config"] = cfg;
    j["config_hash"] = config_hash(cfg);
    j["tolerances"] = Json{{"d_tol", s.d_tol},
                           {"ode_tol", s.ode_tol},
                           {"zero_tolerance", kZeroTolerance},
                           {"monotone_slack", kMonotoneSlack},
                           {"growth_band", kGrowthBand}};
    return j;
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
    if (s.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(s.out_path);
    if (!f) throw ConfigError("cannot write " + s.out_path);
    f << text;
}

void write_profile(const std::string& path, const Trajectory& t) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path);
    f << "r,u,u_prime,delta\n";
    for (std::size_t i = 0; i < t.size(); ++i)
        f << fmt17(t.r(i)) << ',' << fmt17(t.u(i)) << ',' << fmt17(t.u_prime(i)) << ',' << fmt17(t.delta(i)) << '\n';
}

std::string fmt_short(double x) {
    std::ostringstream os;
    os << std::setprecision(8) << x;
    return os.str();
}

// ---------------------------------------------------------------- commands

int cmd_check(const Settings& s, std::ostream& out, std::ostream& err) {
    const SemilinearModel h = make_model(s);
    GridSpec grid;
    grid.per_decade = s.per_decade;
    const HypothesisReport rep =
        s.dual() ? check_quasilinear(make_diffusion(s), h, grid, s.N) : check_semilinear(h, grid, s.N);
    Json j = envelope(s);
    j["model"] = h.name();
    j["report"] = to_json(rep);
    emit(s, j.dump(2) + "\n", out);

    std::string line = "check " + h.name() + " N=" + std::to_string(s.N) + ": ";
    bool first = true;
    for (const auto& c : rep.conditions) {
        if (c.verdict == Verdict::Pass) continue;
        line += std::string(first ? "" : "; ") + to_string(c.verdict) + " " + c.label;
        if (c.label[0] == 'G') line += " (" + quasilinear_alias(c.label) + ")";
        if (c.witness)
            line += " witness s=" + fmt_short(c.witness->abscissa) + " value=" + fmt_short(c.witness->value);
        first = false;
    }
    if (first) line += "all conditions pass";
    err << line << "\n";
    return rep.exit_code();
}

int cmd_classify(const Settings& s, std::ostream& out, std::ostream& err) {
    RadialProblem prob(s.N, make_model(s));
    const auto consts = structural_constants(*prob.model);
    const auto c = classify(prob, consts, s.d, prob.default_r_max() * s.r_max_factor, s.ode_tol);
    Json j = envelope(s);
    j["constants"] = to_json(consts);
    j["classification"] = to_json(c);
    emit(s, j.dump(2) + "\n", out);
    err << "classify d=" << fmt_short(s.d) << ": " << to_string(c.kind) << " at r=" << fmt_short(c.radius) << "\n";
    return c.kind == ClassKind::Undetermined ? kExitUndetermined : kExitOk;
}

std::string ground_line(const std::string& label, const GroundState& g) {
    const auto nd = nondegeneracy_check(g);
    std::string line = label + ": d0=" + fmt17(g.d0);
    line += " decay=" + (g.decay ? fmt_short(g.decay->rate) : std::string("n/a"));
    line += " r_delta=" + (g.r_delta ? fmt_short(*g.r_delta) : std::string("n/a"));
    line += " strict=" + std::string(to_string(nd.strict));
    return line;
}

int strict_exit(const GroundState& g) {
    return nondegeneracy_check(g).strict == Strictness::Strict ? kExitOk : kExitUndetermined;
}

int cmd_ground(const Settings& s, std::ostream& out, std::ostream& err) {
    RadialProblem prob(s.N, make_model(s));
    const auto consts = structural_constants(*prob.model);
    const auto g = find_ground_state(prob, consts, s.d_tol, shooting(s));
    Json j = envelope(s);
    j["ground"] = to_json(g);
    emit(s, j.dump(2) + "\n", out);
    if (!s.profile_path.empty()) write_profile(s.profile_path, g.trajectory);
    err << ground_line("ground " + prob.model->name() + " N=" + std::to_string(s.N), g) << "\n";
    return strict_exit(g);
}

QuasilinearSolution solve_dual(const Settings& s) {
    QuasilinearOptions o;
    o.shooting = shooting(s);
    return solve_quasilinear(make_diffusion(s), make_model(s), s.N, s.d_tol, o);
}

int cmd_diagnose(const Settings& s, std::ostream& out, std::ostream& err) {
    Json j = envelope(s);
    KeyLemmaReport rep;
    std::string label;
    if (s.dual()) {
        const auto q = solve_dual(s);
        rep = key_lemma_report(q.ground, q.dual_consts);
        j["dual"] = to_json(q);
        label = "diagnose dual " + q.dual_model->name();
    } else {
        RadialProblem prob(s.N, make_model(s));
        const auto consts = structural_constants(*prob.model);
        const auto g = find_ground_state(prob, consts, s.d_tol, shooting(s));
        rep = key_lemma_report(g, consts);
        j["ground"] = to_json(g);
        label = "diagnose " + prob.model->name();
    }
    j["key_lemma"] = to_json(rep);
    emit(s, j.dump(2) + "\n", out);
    std::size_t failed = 0;
    std::string names;
    for (const auto& c : rep.checks)
        if (!c.pass) {
            ++failed;
            names += (names.empty() ? "" : ", ") + c.name;
        }
    err << label << " N=" << s.N << ": " << rep.checks.size() - failed << "/" << rep.checks.size() << " clauses pass"
        << (failed ? " (failed: " + names + ")" : std::string()) << "\n";
    return rep.all_pass() ? kExitOk : kExitHypothesis;
}

int cmd_dual(const Settings& s, std::ostream& out, std::ostream& err) {
    if (!s.dual()) throw ConfigError("dual needs --mnls or --diffusion");
    const auto q = solve_dual(s);
    Json j = envelope(s);
    j["dual"] = to_json(q);
    int code = strict_exit(q.ground);
    std::string extra;
    if (s.spectrum) {
        const bool mnls = s.mnls || s.diffusion == "mnls";
        if (!mnls || s.family != "power" || !s.g_expr.empty())
            throw ConfigError("--spectrum needs the mNLS diffusion with a power nonlinearity");
        const auto rep = mnls_kernel_report(q, s.lambda, s.kappa, s.p, s.mesh_n, s.R_max);
        j["spectrum"] = to_json(rep);
        if (!rep.all_pass()) code = kExitHypothesis;
        extra = rep.all_pass() ? " kernels=pass" : " kernels=FAIL";
    }
    emit(s, j.dump(2) + "\n", out);
    if (!s.profile_path.empty()) write_profile(s.profile_path, q.ground.trajectory);
    err << ground_line("dual " + q.dual_model->name() + " N=" + std::to_string(s.N), q.ground)
        << " u0=" << fmt17(q.u0) << " K_inf=" << fmt_short(q.dual_consts.K_infty) << extra << "\n";
    return code;
}

int cmd_spectrum(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.dual()) throw ConfigError("spectrum works on semilinear ground states; use dual --mnls --spectrum");
    RadialProblem prob(s.N, make_model(s));
    const auto consts = structural_constants(*prob.model);
    const auto g = find_ground_state(prob, consts, s.d_tol, shooting(s));
    const auto rep = corollary24_report(g, s.mesh_n, s.R_max);
    Json j = envelope(s);
    j["ground"] = to_json(g);
    j["spectrum"] = to_json(rep);
    emit(s, j.dump(2) + "\n", out);
    std::string failed;
    for (const auto& v : rep.verdicts)
        if (!v.pass) failed += (failed.empty() ? "" : ", ") + v.name;
    err << "spectrum " << prob.model->name() << " N=" << s.N << ": mu1=" << fmt_short(rep.sectors[0].eigenvalues[0])
        << " l1 top=" << fmt_short(rep.sectors[1].eigenvalues[0])
        << (failed.empty() ? " all verdicts pass" : " failed: " + failed) << "\n";
    return rep.all_pass() ? kExitOk : kExitHypothesis;
}

// ------------------------------------------------------------------- sweep

struct SweepRow {
    double value = 0.0;
    bool ok = false;
    std::string error;
    int error_code = kExitOk;
    double d0 = 0.0, u0 = 0.0, decay = 0.0, r_delta = 0.0, K_inf = 0.0;
    std::string strict;
};

Settings with_parameter(Settings s, const std::string& key, double v) {
    if (key == "lambda") s.lambda = v;
    if (key == "p") s.p = v;
    if (key == "c") s.c = v;
    if (key == "kappa") s.kappa = v;
    if (key == "N") {
        if (v != std::floor(v) || v < 2 || v > 10) throw ConfigError("N must be an integer in [2, 10]");
        s.N = static_cast<int>(v);
    }
    s.given.insert(key);
    return s;
}

int error_code(const std::exception& e);

SweepRow sweep_row(const Settings& base, double v) {
    SweepRow row;
    row.value = v;
    try {
        const Settings s = with_parameter(base, base.parameter, v);
        const GroundState* g = nullptr;
        std::optional<QuasilinearSolution> q;
        std::optional<GroundState> gs;
        if (s.dual()) {
            q = solve_dual(s);
            g = &q->ground;
            row.u0 = q->u0;
            row.K_inf = q->dual_consts.K_infty;
        } else {
            RadialProblem prob(s.N, make_model(s));
            const auto consts = structural_constants(*prob.model);
            gs = find_ground_state(prob, consts, s.d_tol, shooting(s));
            g = &*gs;
            row.u0 = g->d0;
            row.K_inf = consts.K_infty;
        }
        row.d0 = g->d0;
        row.decay = g->decay ? g->decay->rate : std::nan("");
        row.r_delta = g->r_delta ? *g->r_delta : std::nan("");
        row.strict = to_string(nondegeneracy_check(*g).strict);
        row.ok = row.strict == std::string(to_string(Strictness::Strict));
        if (!row.ok) {
            row.error = "not strictly admissible";
            row.error_code = kExitUndetermined;
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.error_code = error_code(e);
    }
    return row;
}

int job_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ELLIPTIC_SHOOTER_JOBS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
        throw ConfigError("ELLIPTIC_SHOOTER_JOBS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_sweep(const Settings& s, std::ostream& out, std::ostream& err) {
    if (s.values.empty()) throw ConfigError("sweep needs a non-empty --values list");
    if (!kSweepKeys.count(s.parameter)) throw ConfigError("unknown sweep parameter '" + s.parameter + "'");
    const int jobs = std::min<int>(job_count(s.jobs), static_cast<int>(s.values.size()));

    std::vector<SweepRow> rows(s.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) rows[i] = sweep_row(s, s.values[i]);
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    int code = kExitOk;
    for (const auto& r : rows) {
        err << "sweep " << s.parameter << "=" << fmt_short(r.value) << ": "
            << (r.error.empty() || r.error_code == kExitUndetermined
                    ? "d0=" + fmt17(r.d0) + " decay=" + fmt_short(r.decay) + " strict=" + r.strict
                    : "error: " + r.error)
            << "\n";
        code = std::max(code, r.error_code);
    }

    if (s.format == "csv") {
        std::ostringstream os;
        os << "# schema=" << kSchemaVersion << " config_hash=" << config_hash(config_json(s)) << "\n";
        os << s.parameter << ",status,d0,u0,decay_rate,r_delta,K_infty,strict,error\n";
        for (const auto& r : rows) {
            os << fmt17(r.value) << ',' << (r.ok ? "ok" : "failed") << ',';
            if (r.error_code == kExitOk || r.error_code == kExitUndetermined)
                os << fmt17(r.d0) << ',' << fmt17(r.u0) << ',' << fmt17(r.decay) << ',' << fmt17(r.r_delta) << ','
                   << fmt17(r.K_inf) << ',' << r.strict;
            else
                os << ",,,,,";
            std::string e = r.error;
            std::replace(e.begin(), e.end(), '"', '\'');
            os << ",\"" << e << "\"\n";
        }
        emit(s, os.str(), out);
    } else {
        Json j = envelope(s);
        Json arr = Json::array();
        for (const auto& r : rows) {
            Json row{{"value", number(r.value)}, {"status", r.ok ? "ok" : "failed"}};
            if (r.error_code == kExitOk || r.error_code == kExitUndetermined) {
                row["d0"] = number(r.d0);
                row["u0"] = number(r.u0);
                row["decay_rate"] = number(r.decay);
                row["r_delta"] = number(r.r_delta);
                row["K_infty"] = number(r.K_inf);
                row["strict"] = r.strict;
            }
            row["error"] = r.error.empty() ? Json(nullptr) : Json(r.error);
            arr.push_back(std::move(row));
        }
        j["rows"] = arr;
        emit(s, j.dump(2) + "\n", out);
    }
    return code == kExitOk ? kExitOk : std::max<int>(code, kExitHypothesis);
}

int error_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const DomainError*>(&e)) return kExitUsage;
    if (dynamic_cast<const StructureError*>(&e)) return kExitHypothesis;
    return kExitNumerical;
}

// ----------------------------------------------------------------- config

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos)
            throw ConfigError("bad value '" + item + "' in --values");
        out.push_back(v);
    }
    return out;
}

Json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config " + path);
    Json cfg;
    try {
        cfg = Json::parse(f);
    } catch (const std::exception& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    return cfg;
}

std::string config_command(const std::string& path) {
    const Json cfg = load_config(path);
    if (!cfg.contains("command")) return "";
    if (!cfg["command"].is_string()) throw ConfigError("config key 'command' must be a string");
    return cfg["command"].get<std::string>();
}

// JSON config keys are long option names without the leading dashes; they
// become arguments placed before the command line, so flags win.
std::vector<std::string> config_arguments(const std::string& path, CLI::App* sub) {
    const Json cfg = load_config(path);
    std::vector<std::string> args;
    for (const auto& [key, value] : cfg.items()) {
        if (key == "command") continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt || key == "config") throw ConfigError("unknown config key '" + key + "'");
        if (value.is_boolean()) {
            if (opt->get_expected_max() != 0) throw ConfigError("config key '" + key + "' takes a value");
            if (value.get<bool>()) args.push_back("--" + key);
        } else if (value.is_number()) {
            args.push_back("--" + key);
            args.push_back(value.is_number_float() ? fmt17(value.get<double>()) : value.dump());
        } else if (value.is_string()) {
            args.push_back("--" + key);
            args.push_back(value.get<std::string>());
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) {
                if (!v.is_number()) throw ConfigError("config key '" + key + "' needs numbers");
                joined += (joined.empty() ? "" : ",") + fmt17(v.get<double>());
            }
            args.push_back("--" + key);
            args.push_back(joined);
        } else {
            throw ConfigError("config key '" + key + "' has an unsupported type");
        }
    }
    return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
    Settings s;
    std::string config_path;
    CLI::App app{"Radial ground states of semilinear and quasilinear elliptic equations"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    std::map<std::string, CLI::App*> subs;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"check", "Check the structural hypotheses on a sampled grid"},
        {"classify", "Classify one initial height as N, G or P"},
        {"ground", "Compute the ground state and its non-degeneracy verdict"},
        {"diagnose", "Verify the comparison-function lemmas on the ground state"},
        {"dual", "Solve a quasilinear problem through the dual transform"},
        {"spectrum", "Sector spectra of the linearised operator"},
        {"sweep", "Independent solves over a list of parameter values"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_model_options(sub, s);
        add_knobs(sub, s);
        add_output(sub, s);
        sub->add_option("--config", config_path, "JSON config with option names as keys");
        subs[name] = sub;
    }
    subs["classify"]->add_option("--d", s.d, "Initial height")->required();
    for (const char* name : {"ground", "dual"})
        subs[name]->add_option("--profile", s.profile_path, "CSV profile output (17 significant digits)");
    subs["dual"]->add_flag("--spectrum", s.spectrum, "Add the mNLS kernel report");
    subs["sweep"]->add_option("--parameter", s.parameter, "Model knob to vary")->required();
    subs["sweep"]->add_option("--values", s.values_text, "Comma-separated values");
    subs["sweep"]->add_option("--jobs", s.jobs, "Parallel rows (default: ELLIPTIC_SHOOTER_JOBS or cores)")
        ->check(CLI::Range(1, 256));

    try {
        std::vector<std::string> args = args_in;
        // Splice config arguments in right after the subcommand name.
        for (std::size_t i = 0; i + 1 < args.size(); ++i) {
            if (args[i] != "--config") continue;
            const std::string path = args[i + 1];
            auto pos = std::find_if(args.begin(), args.end(), [&](const std::string& a) { return subs.count(a); });
            const std::string named = config_command(path);
            if (pos == args.end()) {
                if (!subs.count(named)) throw ConfigError("--config needs a command");
                args.insert(args.begin(), named);
                pos = args.begin();
            } else if (!named.empty() && named != *pos) {
                throw ConfigError("config command '" + named + "' differs from '" + *pos + "'");
            }
            const auto extra = config_arguments(path, subs[*pos]);
            args.insert(pos + 1, extra.begin(), extra.end());
            break;
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        s.values = parse_values(s.values_text);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    for (auto& [name, sub] : subs) {
        if (!sub->parsed()) continue;
        s.command = name;
        for (const auto& key : kModelKeys)
            if (sub->count("--" + key) > 0) s.given.insert(key);
    }

    try {
        if (s.command == "check") return cmd_check(s, out, err);
        if (s.command == "classify") return cmd_classify(s, out, err);
        if (s.command == "ground") return cmd_ground(s, out, err);
        if (s.command == "diagnose") return cmd_diagnose(s, out, err);
        if (s.command == "dual") return cmd_dual(s, out, err);
        if (s.command == "spectrum") return cmd_spectrum(s, out, err);
        return cmd_sweep(s, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return error_code(e);
    }
}

}  // namespace elliptic
