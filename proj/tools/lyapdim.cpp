// lyapdim: dimension bounds, characteristic roots, simulation and Lyapunov
// spectra for scalar delay equations.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lyapdim/bounds.hpp"
#include "lyapdim/charroots.hpp"
#include "lyapdim/dde.hpp"
#include "lyapdim/errors.hpp"
#include "lyapdim/verify.hpp"

using namespace lyapdim;

namespace {

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;

struct Options {
    std::string model = "mackey_glass";
    std::optional<double> beta, gamma, k, alpha, A, a, b;
    std::string tau;  // a number, or lo:hi[:log|lin[:points]] for sweeps
    bool scaled = false;
    std::string lambda_mode = "rough";
    std::string equilibrium = "symmetric";
    int count = 40;
    std::optional<double> dt, T, x0, burn_in, horizon;
    int m = 6;
    int nodes = 64;
    std::string dump;
    std::string suite = "all";
    std::string quantity = "local_dim";
    std::string format = "csv";
    std::string output;
    std::uint64_t seed = 1;
    int jobs = 0;
    int points = 12;
};

// Output: a table plus ordered summary entries.
struct Report {
    std::string command;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::string>> summary;
};

std::string num(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void write_csv(std::ostream& os, const Report& r)
{
    os << "# lyapdim v1\n# command " << r.command << "\n";
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << "\n";
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    for (const auto& [k, v] : r.summary) os << "# summary," << k << "," << v << "\n";
}

void write_json(std::ostream& os, const Report& r)
{
    nlohmann::ordered_json j;
    j["version"] = "lyapdim v1";
    j["command"] = r.command;
    j["columns"] = r.columns;
    j["rows"] = r.rows;
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.summary) s[k] = v;
    j["summary"] = s;
    os << j.dump(2) << "\n";
}

void emit(const Options& o, const Report& r)
{
    std::ofstream file;
    std::ostream* os = &std::cout;
    if (!o.output.empty()) {
        file.open(o.output);
        if (!file) throw InputError("cannot open output file " + o.output);
        os = &file;
    }
    if (o.format == "json") write_json(*os, r);
    else write_csv(*os, r);
}

double require(const std::optional<double>& v, const char* flag)
{
    if (!v) throw InputError(std::string("missing required parameter --") + flag);
    return *v;
}

double tau_value(const Options& o)
{
    if (o.tau.empty()) throw InputError("missing required parameter --tau");
    if (o.tau.find(':') != std::string::npos) throw InputError("--tau range is only accepted by sweep");
    std::size_t used = 0;
    double t = 0;
    try {
        t = std::stod(o.tau, &used);
    } catch (const std::exception&) {
        throw InputError("--tau: not a number: " + o.tau);
    }
    if (used != o.tau.size() || !(t > 0)) throw InputError("--tau must be a positive number");
    return t;
}

std::vector<double> tau_range(const Options& o)
{
    std::vector<std::string> parts;
    std::stringstream ss(o.tau);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 2 || parts.size() > 4) throw InputError("--tau range must look like lo:hi[:log|lin[:points]]");
    double lo = 0, hi = 0;
    try {
        lo = std::stod(parts[0]);
        hi = std::stod(parts[1]);
    } catch (const std::exception&) {
        throw InputError("--tau range: bad bounds in " + o.tau);
    }
    const std::string kind = parts.size() > 2 ? parts[2] : "log";
    int points = o.points;
    if (parts.size() > 3) points = std::atoi(parts[3].c_str());
    if (!(lo > 0) || !(hi > lo) || points < 2) throw InputError("--tau range needs 0 < lo < hi and >= 2 points");
    if (kind == "log") return log_grid(lo, hi, points);
    if (kind != "lin") throw InputError("--tau range spacing must be log or lin");
    std::vector<double> g;
    for (int i = 0; i < points; ++i) g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

// Model parameters with their usual defaults.
struct Params {
    double beta = 0.2, gamma = 0.1, k = 10, alpha = 0.75, A = 0;
};

Params params(const Options& o)
{
    Params p;
    if (o.model == "suarez_schopf") p.gamma = 1;
    if (o.beta) p.beta = *o.beta;
    if (o.gamma) p.gamma = *o.gamma;
    if (o.k) p.k = *o.k;
    if (o.alpha) p.alpha = *o.alpha;
    if (o.A) p.A = *o.A;
    if (o.model == "mackey_glass" && (!(p.beta > 0) || !(p.gamma >= 0) || !(p.k > 1)))
        throw InputError("Mackey-Glass needs beta > 0, gamma >= 0, k > 1");
    if (o.model == "suarez_schopf" && (!(p.alpha > 0) || !(p.gamma > 0) || !(p.beta > 0)))
        throw InputError("Suarez-Schopf needs alpha, gamma, beta > 0");
    return p;
}

DelayModel make_model(const Options& o, double tau)
{
    const Params p = params(o);
    if (o.model == "mackey_glass") return mackey_glass_model(p.beta, p.gamma, p.k, tau);
    if (o.model == "suarez_schopf") return suarez_schopf_model(p.alpha, tau, p.A, p.gamma, p.beta);
    if (o.model == "custom")
        return linear_model(Mat::Constant(1, 1, require(o.a, "a")), {{tau, Mat::Constant(1, 1, require(o.b, "b"))}});
    throw InputError("unknown model " + o.model);
}

// Linearization at the selected equilibrium as a family in tau.
CharFamily char_family(const Options& o)
{
    const Params p = params(o);
    double a = 0, b = 0;
    if (o.model == "mackey_glass") {
        if (o.equilibrium == "zero") {
            a = -p.gamma;
            b = p.beta * mg_Fprime(0, p.k);
        } else if (o.equilibrium == "symmetric") {
            if (p.beta <= p.gamma) throw InputError("no nonzero Mackey-Glass equilibrium for beta <= gamma");
            a = -p.gamma;
            b = p.beta * mg_Fprime(mg_equilibrium(p.beta, p.gamma, p.k), p.k);
        } else {
            throw InputError("--equilibrium must be symmetric or zero");
        }
    } else if (o.model == "suarez_schopf") {
        if (p.A != 0) throw InputError("equilibria exist only for the unforced Suarez-Schopf model (A = 0)");
        const double beta = o.beta ? *o.beta : 1.0;
        if (o.equilibrium == "zero") {
            a = p.gamma;
        } else if (o.equilibrium == "symmetric") {
            const auto eq = suarez_schopf_equilibria(p.alpha, p.gamma, beta);
            if (eq.size() < 3) throw InputError("no nonzero Suarez-Schopf equilibrium for alpha >= gamma");
            a = p.gamma - 3 * beta * eq[0] * eq[0];
        } else {
            throw InputError("--equilibrium must be symmetric or zero");
        }
        b = -p.alpha;
    } else if (o.model == "custom") {
        a = require(o.a, "a");
        b = require(o.b, "b");
    } else {
        throw InputError("unknown model " + o.model);
    }
    return [a, b](double tau) { return CharProblem{a, b, tau}; };
}

DimensionBound model_bound(const Options& o, double tau, bool scaled)
{
    const Params p = params(o);
    const LambdaMode mode = o.lambda_mode == "tight" ? LambdaMode::Tight : LambdaMode::Rough;
    if (o.lambda_mode != "tight" && o.lambda_mode != "rough") throw InputError("--lambda must be rough or tight");
    if (o.model == "mackey_glass") {
        if (scaled && p.beta > p.gamma) return scaled_bound(mackey_glass_family(p.beta, p.gamma, p.k, tau, mode));
        return mackey_glass_bound(p.beta, p.gamma, p.k, tau, mode);
    }
    if (o.model == "suarez_schopf") {
        if (scaled) return scaled_bound(suarez_schopf_family(p.alpha, p.gamma, tau));
        return suarez_schopf_bound(p.alpha, p.gamma, tau);
    }
    if (o.model == "custom") {
        const BoundProblem pr{tau, require(o.a, "a"), require(o.b, "b")};
        if (scaled) throw InputError("--scaled needs a model family (mackey_glass or suarez_schopf)");
        return scalar_bound(pr);
    }
    throw InputError("unknown model " + o.model);
}

bool near(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); }

Report cmd_bound(const Options& o)
{
    const double tau = tau_value(o);
    const auto b = model_bound(o, tau, o.scaled);
    Report r{"bound", {"model", "tau", "d_star", "p_star", "kappa_opt", "slope", "scale_opt", "lambda", "provenance"}, {}, {}};
    r.rows.push_back({o.model, num(tau), num(b.d_star), num(b.p_star), num(b.kappa_opt), num(b.slope),
                      b.scale_opt ? num(*b.scale_opt) : "", num(b.lambda), b.provenance});
    if (o.model == "mackey_glass") r.summary.push_back({"lambda_mode", o.lambda_mode});
    if (b.trivial_attractor) r.summary.push_back({"trivial_attractor", "true"});
    // reference values for the classical parameter sets
    const Params p = params(o);
    if (o.model == "mackey_glass" && near(p.beta, 0.2) && near(p.gamma, 0.1) && near(p.k, 10) && !o.scaled)
        r.summary.push_back({"reference", "0.9958*tau+1 = " + num(0.9958 * tau + 1)});
    if (o.model == "suarez_schopf" && near(p.alpha, 0.75) && near(p.gamma, 1) && near(tau, 1.596))
        r.summary.push_back({"reference", o.scaled ? "5.603" : "6.675"});
    return r;
}

Report cmd_roots(const Options& o)
{
    const double tau = tau_value(o);
    if (o.count < 1) throw InputError("--count must be >= 1");
    const CharProblem pr = char_family(o)(tau);
    const auto rs = char_roots(pr, o.count);
    Report r{"roots", {"index", "re", "im", "residual", "multiplicity"}, {}, {}};
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
        r.rows.push_back({std::to_string(i + 1), num(rs.roots[i].real()), num(rs.roots[i].imag()), num(rs.residuals[i]),
                          std::to_string(rs.multiplicity[i])});
    r.summary.push_back({"a", num(pr.a)});
    r.summary.push_back({"b", num(pr.b)});
    if (rs.partial) r.summary.push_back({"partial", "true"});
    for (const auto& w : rs.warnings) r.summary.push_back({"warning", w});
    const double dl = local_dimension(rs);
    r.summary.push_back({"N_L", std::to_string(static_cast<int>(std::floor(dl)))});
    r.summary.push_back({"N_u", std::to_string(unstable_count(rs))});
    r.summary.push_back({"local_dimension", num(dl)});
    return r;
}

HistorySegment initial_history(const Options& o, double tau, double dt)
{
    const double x0 = o.x0 ? *o.x0 : (o.model == "mackey_glass" ? 0.5 : 0.1);
    return HistorySegment::constant(tau, dt, Vec::Constant(1, x0));
}

Report cmd_simulate(const Options& o)
{
    const double tau = tau_value(o);
    const double dt = o.dt ? *o.dt : tau / 100;
    const double T = o.T ? *o.T : 10 * tau;
    const auto model = make_model(o, tau);
    const auto tr = integrate(model, initial_history(o, tau, dt), T, dt);
    Report r{"simulate", {"t"}, {}, {}};
    for (int i = 0; i < model.n; ++i) r.columns.push_back("x_" + std::to_string(i + 1));
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        std::vector<std::string> row{num(tr.t[i])};
        for (int c = 0; c < model.n; ++c) row.push_back(num(tr.x[i](c)));
        r.rows.push_back(std::move(row));
    }
    if (!o.dump.empty()) {
        if (o.nodes < 10) throw InputError("--nodes must be >= 10");
        const auto window = tr.segment_at(tr.t.back()).resampled(tau / o.nodes);
        const auto mono = linearized_monodromy(model, window.values(), tr.t.back());
        write_monodromy(o.dump, mono.matrix, model.n, o.nodes);
        r.summary.push_back({"monodromy", o.dump});
    }
    return r;
}

Report cmd_lyap(const Options& o)
{
    const double tau = tau_value(o);
    SpectrumOptions so;
    if (o.dt) so.dt = *o.dt;
    if (o.burn_in) so.burn_in = *o.burn_in;
    if (o.horizon) so.horizon = *o.horizon;
    so.seed = o.seed;
    const auto model = make_model(o, tau);
    const double dt = so.dt > 0 ? so.dt : tau / 100;
    const auto rep = numerical_lyapunov_spectrum(model, initial_history(o, tau, dt), o.m, so);
    Report r{"lyap", {"j", "lambda", "lambda_half_horizon"}, {}, {}};
    for (std::size_t j = 0; j < rep.lambdas.size(); ++j)
        r.rows.push_back({std::to_string(j + 1), num(rep.lambdas[j]), num(rep.lambdas_half[j])});
    r.summary.push_back({"kaplan_yorke", num(rep.kaplan_yorke)});
    r.summary.push_back({"ky_resolved", rep.ky_resolved ? "true" : "false"});
    r.summary.push_back({"convergence_gap", num(rep.convergence_gap)});
    r.summary.push_back({"horizon", num(rep.horizon)});
    if (o.model != "custom") r.summary.push_back({"bound", num(model_bound(o, tau, false).d_star)});
    return r;
}

int job_count(const Options& o)
{
    if (o.jobs > 0) return o.jobs;
    if (const char* env = std::getenv("LYAPDIM_JOBS")) {
        const int j = std::atoi(env);
        if (j > 0) return j;
    }
    return 1;
}

Report cmd_sweep(const Options& o)
{
    const auto taus = tau_range(o);
    std::function<double(double)> cell;
    const std::string& q = o.quantity;
    if (q == "local_dim" || q == "unstable") {
        const auto fam = char_family(o);
        const Quantity qq = q == "local_dim" ? Quantity::LocalDimension : Quantity::UnstableCount;
        cell = [fam, qq](double t) { return quantity_at(fam(t), qq); };
    } else if (q == "bound" || q == "scaled_bound") {
        const bool scaled = q == "scaled_bound";
        cell = [&o, scaled](double t) { return model_bound(o, t, scaled).d_star; };
    } else if (q == "ky") {
        cell = [&o](double t) {
            SpectrumOptions so;
            if (o.dt) so.dt = *o.dt;
            if (o.burn_in) so.burn_in = *o.burn_in;
            if (o.horizon) so.horizon = *o.horizon;
            so.seed = o.seed;
            const double dt = so.dt > 0 ? so.dt : t / 100;
            return numerical_lyapunov_spectrum(make_model(o, t), initial_history(o, t, dt), o.m, so).kaplan_yorke;
        };
    } else {
        throw InputError("--quantity must be local_dim, unstable, bound, scaled_bound or ky");
    }

    // cells are independent; results land in input order
    std::vector<double> values(taus.size());
    std::vector<std::string> errors(taus.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < taus.size(); i = next++) {
            try {
                values[i] = cell(taus[i]);
            } catch (const std::exception& e) {
                values[i] = std::nan("");
                errors[i] = e.what();
            }
        }
    };
    const int jobs = std::min<int>(job_count(o), static_cast<int>(taus.size()));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (std::size_t i = 0; i < taus.size(); ++i)
        if (!errors[i].empty()) throw NumericalError("sweep cell tau = " + num(taus[i]) + ": " + errors[i]);

    Report r{"sweep", {"tau", q}, {}, {}};
    for (std::size_t i = 0; i < taus.size(); ++i) r.rows.push_back({num(taus[i]), num(values[i])});
    const auto fit = fit_slope(taus, values);
    r.summary.push_back({"slope", num(fit.slope)});
    r.summary.push_back({"intercept", num(fit.intercept)});
    r.summary.push_back({"r2", num(fit.r2)});
    r.summary.push_back({"low_confidence", fit.low_confidence ? "true" : "false"});
    r.summary.push_back({"slope_upper_half_decades", num(fit.slope_upper_lower_half) + ";" + num(fit.slope_upper_upper_half)});
    return r;
}

Report cmd_verify(const Options& o, bool& all_pass)
{
    std::vector<std::string> suites;
    if (o.suite == "all") suites = suite_names();
    else suites.push_back(o.suite);
    Report r{"verify", {"suite", "check", "status", "detail"}, {}, {}};
    int failed = 0, total = 0;
    for (const auto& s : suites)
        for (const auto& c : run_suite(s, o.seed)) {
            r.rows.push_back({c.suite, c.name, c.pass ? "PASS" : "FAIL", c.detail});
            ++total;
            failed += !c.pass;
        }
    r.summary.push_back({"checks", std::to_string(total)});
    r.summary.push_back({"failed", std::to_string(failed)});
    all_pass = failed == 0;
    return r;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Lyapunov dimension bounds and spectra for delay equations"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "flat key=value configuration file; flags override it");

    Options o;
    app.add_option("--model", o.model, "mackey_glass, suarez_schopf or custom")
        ->check(CLI::IsMember({"mackey_glass", "suarez_schopf", "custom"}));
    app.add_option("--beta", o.beta, "feedback strength (Mackey-Glass) or cubic coefficient");
    app.add_option("--gamma", o.gamma, "decay rate (Mackey-Glass) or linear growth (Suarez-Schopf)");
    app.add_option("--k", o.k, "Mackey-Glass exponent");
    app.add_option("--alpha", o.alpha, "Suarez-Schopf delayed feedback");
    app.add_option("--A", o.A, "Suarez-Schopf forcing amplitude");
    app.add_option("--a", o.a, "custom: instantaneous coefficient");
    app.add_option("--b", o.b, "custom: delayed coefficient");
    app.add_option("--tau", o.tau, "delay, or lo:hi[:log|lin[:points]] for sweep");
    app.add_flag("--scaled", o.scaled, "optimize the time rescaling as well");
    app.add_option("--lambda", o.lambda_mode, "derivative bound for Mackey-Glass: rough or tight");
    app.add_option("--equilibrium", o.equilibrium, "symmetric or zero");
    app.add_option("--count", o.count, "number of characteristic roots");
    app.add_option("--dt", o.dt, "integration step (must divide tau)");
    app.add_option("--T", o.T, "integration horizon");
    app.add_option("--x0", o.x0, "constant initial history");
    app.add_option("--burn-in", o.burn_in, "transient discarded before the spectrum");
    app.add_option("--horizon", o.horizon, "averaging time for the spectrum");
    app.add_option("--m", o.m, "number of Lyapunov exponents");
    app.add_option("--nodes", o.nodes, "history grid size for the monodromy dump");
    app.add_option("--dump-monodromy", o.dump, "write the final monodromy matrix to this file");
    app.add_option("--suite", o.suite, "verification suite or all");
    app.add_option("--quantity", o.quantity, "sweep quantity: local_dim, unstable, bound, scaled_bound, ky");
    app.add_option("--points", o.points, "sweep grid size when the range omits it");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", o.output, "output file (default stdout)");
    app.add_option("--seed", o.seed, "random seed");
    app.add_option("--jobs", o.jobs, "sweep worker threads (default $LYAPDIM_JOBS or 1)");

    auto* bound = app.add_subcommand("bound", "analytic dimension bound");
    auto* roots = app.add_subcommand("roots", "characteristic roots at an equilibrium");
    auto* simulate = app.add_subcommand("simulate", "integrate the delay equation");
    auto* lyap = app.add_subcommand("lyap", "numerical Lyapunov spectrum and Kaplan-Yorke dimension");
    auto* verify = app.add_subcommand("verify", "run invariant suites");
    auto* sweep = app.add_subcommand("sweep", "quantity over a range of delays");
    for (auto* s : {bound, roots, simulate, lyap, verify, sweep}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        bool ok = true;
        Report r;
        if (*bound) r = cmd_bound(o);
        else if (*roots) r = cmd_roots(o);
        else if (*simulate) r = cmd_simulate(o);
        else if (*lyap) r = cmd_lyap(o);
        else if (*verify) r = cmd_verify(o, ok);
        else r = cmd_sweep(o);
        emit(o, r);
        return ok ? 0 : kExitNumerical;
    } catch (const InputError& e) {
        std::cerr << "lyapdim: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "lyapdim: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}
