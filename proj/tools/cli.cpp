#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbb/angular_momentum.hpp"
#include "dbb/arrival.hpp"
#include "dbb/dynamics.hpp"
#include "dbb/goldens.hpp"
#include "dbb/observables.hpp"
#include "dbb/packet.hpp"
#include "dbb/parallel.hpp"
#include "dbb/quadrature.hpp"
#include "dbb/stationary.hpp"

namespace dbb::cli {

using nlohmann::json;

namespace {

const std::map<std::string, Command>& command_table() {
    static const std::map<std::string, Command> t{
        {"stationary", Command::Stationary}, {"field", Command::Field},       {"observables", Command::Observables},
        {"trajectory", Command::Trajectory}, {"ensemble", Command::Ensemble}, {"arrival", Command::Arrival},
        {"tables", Command::Tables},
    };
    return t;
}

struct HelpRequested {
    std::string text;
};

int parse_twice_j(const std::string& text) {
    try {
        return AngularMomentum::parse(text).twice();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
}

std::string j_string(int twice) { return AngularMomentum(twice).str(); }

}  // namespace

std::string command_name(Command c) {
    for (const auto& [name, cmd] : command_table()) {
        if (cmd == c) {
            return name;
        }
    }
    return "?";
}

Command command_from_name(const std::string& name) {
    const auto it = command_table().find(name);
    if (it == command_table().end()) {
        throw UsageError("unknown command '" + name +
                         "' (stationary, field, observables, trajectory, ensemble, arrival, tables)");
    }
    return it->second;
}

// ---------------------------------------------------------------- JSON

std::string to_json(const RunConfig& c) {
    json j;
    j["command"] = command_name(c.command);
    if (c.twice_j) j["j"] = j_string(*c.twice_j);
    if (c.p0) j["p0"] = *c.p0;
    if (c.sigma) j["sigma"] = *c.sigma;
    j["m"] = c.m;
    j["r0_list"] = c.r0_list;
    if (c.R) j["R"] = *c.R;
    if (c.t_end) j["t_end"] = *c.t_end;
    j["tol"] = c.tol;
    j["nodes"] = c.nodes;
    j["out"] = c.out;
    if (c.threads) j["threads"] = *c.threads;
    if (c.r_max) j["r_max"] = *c.r_max;
    j["n_r"] = c.n_r;
    j["times"] = c.times;
    j["n_samples"] = c.n_samples;
    j["l_times"] = c.l_times;
    if (c.n_r0) j["n_r0"] = *c.n_r0;
    j["n_tau"] = c.n_tau;
    if (c.table) j["table"] = *c.table;
    j["row"] = c.row;
    j["goldens"] = c.goldens;
    j["include_slow"] = c.include_slow;
    return j.dump(2);
}

namespace {

void merge_json(RunConfig& c, const json& j) {
    if (!j.is_object()) {
        throw UsageError("config must be a JSON object");
    }
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "command") c.command = command_from_name(v.get<std::string>());
            else if (key == "j") c.twice_j = parse_twice_j(v.is_string() ? v.get<std::string>() : v.dump());
            else if (key == "p0") c.p0 = v.get<double>();
            else if (key == "sigma") c.sigma = v.get<double>();
            else if (key == "m") c.m = v.get<double>();
            else if (key == "r0_list") c.r0_list = v.get<std::vector<double>>();
            else if (key == "r0") c.r0_list = {v.get<double>()};
            else if (key == "R") c.R = v.get<double>();
            else if (key == "t_end") c.t_end = v.get<double>();
            else if (key == "tol") c.tol = v.get<double>();
            else if (key == "nodes") c.nodes = v.get<int>();
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "threads") c.threads = v.get<int>();
            else if (key == "r_max") c.r_max = v.get<double>();
            else if (key == "n_r") c.n_r = v.get<int>();
            else if (key == "times") c.times = v.get<std::vector<double>>();
            else if (key == "n_samples") c.n_samples = v.get<int>();
            else if (key == "l_times") c.l_times = v.get<std::vector<double>>();
            else if (key == "n_r0") c.n_r0 = v.get<int>();
            else if (key == "n_tau") c.n_tau = v.get<int>();
            else if (key == "table") c.table = v.get<int>();
            else if (key == "row") c.row = v.get<std::string>();
            else if (key == "goldens") c.goldens = v.get<std::string>();
            else if (key == "include_slow") c.include_slow = v.get<bool>();
            else throw UsageError("unknown config key '" + key + "'");
        } catch (const json::exception& e) {
            throw UsageError("config key '" + key + "': " + e.what());
        }
    }
}

json parse_json_text(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
}

}  // namespace

RunConfig from_json(const std::string& text) {
    RunConfig c;
    merge_json(c, parse_json_text(text));
    return c;
}

// ---------------------------------------------------------------- parsing

void validate(const RunConfig& c) {
    const auto need = [&](bool ok, const char* what) {
        if (!ok) {
            throw UsageError(command_name(c.command) + ": " + what);
        }
    };
    const auto positive = [](std::optional<double> v) { return !v || (std::isfinite(*v) && *v > 0.0); };

    need(positive(c.p0), "p0 must be positive");
    need(positive(c.sigma), "sigma must be positive");
    need(std::isfinite(c.m) && c.m >= 0.0, "m must be non-negative");
    need(positive(c.R), "R must be positive");
    need(positive(c.t_end), "t-end must be positive");
    need(positive(c.r_max), "r-max must be positive");
    need(std::isfinite(c.tol) && c.tol > 0.0, "tol must be positive");
    need(c.nodes >= 8, "nodes must be at least 8");
    need(!c.threads || *c.threads >= 1, "threads must be at least 1");
    need(c.n_r >= 2 && c.n_samples >= 2 && c.n_tau >= 2, "grid sizes must be at least 2");
    need(!c.n_r0 || *c.n_r0 >= 1, "n-r0 must be positive");
    for (double r : c.r0_list) {
        need(std::isfinite(r) && r >= 0.0, "r0 must be non-negative");
    }
    for (double t : c.times) {
        need(std::isfinite(t) && t >= 0.0, "times must be non-negative");
    }
    for (double t : c.l_times) {
        need(std::isfinite(t) && t >= 0.0, "l-times must be non-negative");
    }

    const bool packet = c.twice_j && c.p0 && c.sigma;
    switch (c.command) {
        case Command::Stationary:
            need(c.twice_j && c.p0, "needs --j and --p0");
            break;
        case Command::Field:
        case Command::Observables:
            need(packet, "needs --j, --p0 and --sigma");
            break;
        case Command::Trajectory:
        case Command::Ensemble:
            need(packet, "needs --j, --p0 and --sigma");
            need(c.t_end.has_value(), "needs --t-end");
            for (double t : c.l_times) {
                need(t <= *c.t_end, "l-times must lie within [0, t-end]");
            }
            break;
        case Command::Arrival:
            need(packet, "needs --j, --p0 and --sigma");
            need(c.R.has_value(), "needs --R");
            for (double r : c.r0_list) {
                need(r < *c.R, "every r0 must lie inside the detector (r0 < R)");
            }
            need(c.r0_list.empty() || c.r0_list.size() >= 4, "r0-list needs at least 4 radii for the Jacobian");
            break;
        case Command::Tables:
            need(c.table && (*c.table == 1 || *c.table == 2), "needs --table 1 or --table 2");
            break;
    }
}

namespace {

std::vector<std::pair<std::string, double>> parse_row_filter(const std::string& row) {
    std::vector<std::pair<std::string, double>> out;
    std::stringstream ss(row);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--row expects key=value pairs, got '" + item + "'");
        }
        const std::string key = item.substr(0, eq);
        if (key != "p0" && key != "sigma") {
            throw UsageError("--row keys are p0 and sigma, got '" + key + "'");
        }
        try {
            out.emplace_back(key, std::stod(item.substr(eq + 1)));
        } catch (const std::exception&) {
            throw UsageError("--row value for " + key + " is not a number");
        }
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

RunConfig parse_args(int argc, const char* const* argv) {
    CLI::App app{"de Broglie-Bohm trajectories of 2+1D Dirac wave packets", "dbb"};
    app.set_version_flag("--version", "0.1.0");

    std::string cmd, j, out, row, goldens, config;
    double p0 = 0, sigma = 0, m = 0, r0 = 0, R = 0, t_end = 0, tol = 0, r_max = 0;
    int nodes = 0, threads = 0, n_r = 0, n_samples = 0, n_r0 = 0, n_tau = 0, table = 0;
    std::vector<double> r0_list, times, l_times;
    bool slow = false;

    app.add_option("command", cmd, "stationary | field | observables | trajectory | ensemble | arrival | tables")
        ->required();
    auto* o_j = app.add_option("--j", j, "total angular momentum, half-integer (5/2 or 2.5)");
    auto* o_p0 = app.add_option("--p0", p0, "peak momentum, meV ns/nm (1e-4 is 100 meV)");
    auto* o_sigma = app.add_option("--sigma", sigma, "momentum width Sigma");
    auto* o_m = app.add_option("--m", m, "mass, meV ns^2/nm^2 (m c^2 = m * 1e12 meV; default 0)");
    auto* o_r0 = app.add_option("--r0", r0, "initial radius, nm (default: most probable)");
    auto* o_r0_list = app.add_option("--r0-list", r0_list, "comma-separated initial radii")->delimiter(',');
    auto* o_R = app.add_option("--R", R, "detector radius, nm");
    auto* o_t_end = app.add_option("--t-end", t_end, "final time (trajectory) or search bound (arrival), ns");
    auto* o_tol = app.add_option("--tol", tol, "integrator tolerance (default 1e-9)");
    auto* o_nodes = app.add_option("--nodes", nodes, "Gauss-Legendre nodes (default 256)");
    auto* o_out = app.add_option("--out", out, "output directory (default .)");
    auto* o_threads = app.add_option("--threads", threads, "worker threads (default DBB_THREADS or all cores)");
    auto* o_config = app.add_option("--config", config, "JSON config file; flags override it");
    auto* o_r_max = app.add_option("--r-max", r_max, "outer radius of the field grid, nm");
    auto* o_n_r = app.add_option("--n-r", n_r, "field grid points");
    auto* o_times = app.add_option("--times", times, "field snapshot times, ns")->delimiter(',');
    auto* o_n_samples = app.add_option("--samples", n_samples, "trajectory output samples (default 2000)");
    auto* o_l_times = app.add_option("--l-times", l_times, "times for L_class probes, ns")->delimiter(',');
    auto* o_n_r0 = app.add_option("--n-r0", n_r0, "r0 grid size (ensemble 16, arrival 64)");
    auto* o_n_tau = app.add_option("--n-tau", n_tau, "arrival tau grid size (default 512)");
    auto* o_table = app.add_option("--table", table, "1 or 2");
    auto* o_row = app.add_option("--row", row, "table 2 block, e.g. p0=1e-4,sigma=1e-7");
    auto* o_goldens = app.add_option("--goldens", goldens, "golden asset (default: bundled)");
    auto* o_slow = app.add_flag("--slow", slow, "include rows marked slow");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::CallForVersion&) {
        throw HelpRequested{"0.1.0\n"};
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    RunConfig c;
    if (o_config->count()) {
        merge_json(c, parse_json_text(read_file(config)));
    }
    c.command = command_from_name(cmd);
    if (o_j->count()) c.twice_j = parse_twice_j(j);
    if (o_p0->count()) c.p0 = p0;
    if (o_sigma->count()) c.sigma = sigma;
    if (o_m->count()) c.m = m;
    if (o_r0->count() && o_r0_list->count()) {
        throw UsageError("give either --r0 or --r0-list");
    }
    if (o_r0->count()) c.r0_list = {r0};
    if (o_r0_list->count()) c.r0_list = r0_list;
    if (o_R->count()) c.R = R;
    if (o_t_end->count()) c.t_end = t_end;
    if (o_tol->count()) c.tol = tol;
    if (o_nodes->count()) c.nodes = nodes;
    if (o_out->count()) c.out = out;
    if (o_threads->count()) c.threads = threads;
    if (o_r_max->count()) c.r_max = r_max;
    if (o_n_r->count()) c.n_r = n_r;
    if (o_times->count()) c.times = times;
    if (o_n_samples->count()) c.n_samples = n_samples;
    if (o_l_times->count()) c.l_times = l_times;
    if (o_n_r0->count()) c.n_r0 = n_r0;
    if (o_n_tau->count()) c.n_tau = n_tau;
    if (o_table->count()) c.table = table;
    if (o_row->count()) c.row = row;
    if (o_goldens->count()) c.goldens = goldens;
    if (o_slow->count()) c.include_slow = slow;
    if (!c.row.empty()) {
        parse_row_filter(c.row);
    }
    validate(c);
    return c;
}

RunConfig parse_args(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    return parse_args(static_cast<int>(argv.size()), argv.data());
}

// ---------------------------------------------------------------- output

namespace {

class Csv {
public:
    Csv(const std::filesystem::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) {
            throw Error("cannot write " + path.string());
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            out_ << (i ? "," : "") << header[i];
        }
        out_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        char buf[32];
        for (double v : values) {
            std::snprintf(buf, sizeof buf, "%.17g", v);
            out_ << (first ? "" : ",") << buf;
            first = false;
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

json nullable(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

PacketSpec packet_spec(const RunConfig& c) {
    PacketSpec s{AngularMomentum(*c.twice_j), *c.p0, *c.sigma, c.m};
    s.quad.n_nodes = c.nodes;
    s.validate();
    return s;
}

json spec_json(const PacketSpec& s) {
    return {{"j", s.j.str()}, {"p0", s.p0}, {"sigma", s.sigma_p}, {"m", s.m}, {"nodes", s.quad.n_nodes}};
}

int threads_of(const RunConfig& c) { return resolve_threads(c.threads); }

void run_stationary(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const StationaryState s(AngularMomentum(*c.twice_j), *c.p0, c.m);
    const double hbar_p = s.constants().hbar() / s.p();
    const double r_hat = most_probable_radius(s);
    const double r_max = c.r_max.value_or(4.0 * (r_hat + 2.0 * hbar_p));
    Csv csv(dir / "stationary.csv", {"r", "rho", "v_r", "v_phi"});
    for (int i = 1; i <= c.n_r; ++i) {
        const double r = r_max * i / c.n_r;
        const double rho = density_stat(s, r);
        const auto v = rho > 0.0 ? velocity_stat(s, r) : PolarVelocity{NAN, NAN};
        csv.row({r, rho, v.r, v.phi});
    }
    json rep{{"command", "stationary"},
             {"j", s.j().str()},
             {"p", s.p()},
             {"m", s.m()},
             {"energy_mev", s.omega() * s.constants().hbar()},
             {"r_hat", r_hat},
             {"alpha_j", r_hat / hbar_p}};
    write_json(dir / "report.json", rep);
    out << "j = " << s.j().str() << "  E = " << s.omega() * s.constants().hbar() << " meV  r_hat = " << r_hat
        << " nm  alpha = " << r_hat / hbar_p << '\n';
}

void run_field(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto spec = packet_spec(c);
    const GaussianPacket packet(spec);
    const auto times = c.times.empty() ? std::vector<double>{0.0} : c.times;
    const double scale = spec.constants.hbar() / spec.p0;
    const double t_last = *std::max_element(times.begin(), times.end());
    const double r_max =
        c.r_max.value_or(std::max(4.0 * packet.initial_peak_radius(), 10.0 * scale) + spec.constants.c() * t_last);

    struct Row {
        double t, r;
        FieldSample f;
    };
    std::vector<Row> rows(times.size() * static_cast<std::size_t>(c.n_r));
    parallel_for(rows.size(), threads_of(c), [&](std::size_t k) {
        const double t = times[k / static_cast<std::size_t>(c.n_r)];
        const double r = r_max * static_cast<double>(k % static_cast<std::size_t>(c.n_r) + 1) / c.n_r;
        rows[k] = {t, r, packet.field_sample(r, t)};
    });

    Csv csv(dir / "field.csv", {"t", "r", "rho", "j_r", "j_phi", "v_r", "v_phi"});
    for (const auto& row : rows) {
        const bool ok = row.f.rho > packet.density_floor();
        csv.row({row.t, row.r, row.f.rho, row.f.j_r, row.f.j_phi, ok ? row.f.j_r / row.f.rho : NAN,
                 ok ? row.f.j_phi / row.f.rho : NAN});
    }
    write_json(dir / "report.json", {{"command", "field"},
                                     {"spec", spec_json(spec)},
                                     {"r_max", r_max},
                                     {"n_r", c.n_r},
                                     {"times", times},
                                     {"density_floor", packet.density_floor()}});
    out << "wrote " << rows.size() << " field samples to " << (dir / "field.csv").string() << '\n';
}

void run_observables(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto spec = packet_spec(c);
    const auto mv = mean_values(spec);
    const GaussianPacket packet(spec);
    const double r0_hat = packet.initial_peak_radius();
    json rep{{"command", "observables"},
             {"spec", spec_json(spec)},
             {"norm_sq", mv.norm_sq},
             {"mean_e", mv.mean_e},
             {"delta_e", mv.delta_e},
             {"mean_s", mv.mean_s},
             {"tau_min", mv.tau_min},
             {"r_l", std::isfinite(mv.r_l) ? json(mv.r_l) : json(nullptr)},
             {"r0_hat", r0_hat},
             {"z", mv.z}};
    write_json(dir / "report.json", rep);
    out << std::setprecision(6) << "<E>     = " << mv.mean_e << " meV\n"
        << "dE      = " << mv.delta_e << " meV\n"
        << "tau_min = " << mv.tau_min << " ns\n";
    if (std::isfinite(mv.r_l)) {
        out << "r_L     = " << mv.r_l << " nm\n";
    }
    out << "r0_hat  = " << r0_hat << " nm\n"
        << "<S>     = " << mv.mean_s << " hbar\n";
}

json trajectory_json(const Trajectory& tr, const TrajectoryDiagnostics& d, double hbar_j) {
    json l = json::object();
    for (const auto& [t, v] : d.l_class_at) {
        char key[32];
        std::snprintf(key, sizeof key, "%.17g", t);
        l[key] = {{"l_class", v}, {"over_hbar_j", v / hbar_j}};
    }
    return {{"r0", tr.r0},
            {"r_start", tr.r_start},
            {"status", tr.status == TrajectoryStatus::Completed ? "completed" : "stalled"},
            {"stall_reason", tr.stall_reason},
            {"t_end", tr.t_end()},
            {"n_loops", d.n_loops},
            {"tau_obs", nullable(d.tau_obs)},
            {"final_speed", d.final_speed},
            {"l_class", l},
            {"steps", tr.steps},
            {"evaluations", tr.evaluations}};
}

std::vector<Trajectory> integrate_all(const GaussianPacket& packet, const std::vector<double>& r0s, const RunConfig& c) {
    IntegrateOptions o;
    o.tol = c.tol;
    o.n_samples = c.n_samples;
    std::vector<std::optional<Trajectory>> slots(r0s.size());
    parallel_for(r0s.size(), threads_of(c), [&](std::size_t i) { slots[i] = integrate(packet, r0s[i], *c.t_end, o); });
    std::vector<Trajectory> out;
    out.reserve(slots.size());
    for (auto& s : slots) {
        out.push_back(std::move(*s));
    }
    return out;
}

void run_trajectory(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto spec = packet_spec(c);
    const GaussianPacket packet(spec);
    const auto r0s = c.r0_list.empty() ? std::vector<double>{packet.initial_peak_radius()} : c.r0_list;
    const auto trajs = integrate_all(packet, r0s, c);
    const double mean_e = mean_energy(spec).mean;
    const double hbar_j = spec.constants.hbar() * spec.j.value();
    const auto l_times = c.l_times.empty() ? std::vector<double>{*c.t_end} : c.l_times;

    Csv csv(dir / "trajectory.csv", {"r0", "t", "r", "phi", "x", "y", "v_r", "v_phi", "speed"});
    json list = json::array();
    bool stalled = false;
    for (const auto& tr : trajs) {
        for (const auto& s : tr.samples) {
            csv.row({tr.r0, s.t, s.r, s.phi, s.r * std::cos(s.phi), s.r * std::sin(s.phi), s.v_r, s.v_phi,
                     std::hypot(s.v_r, s.v_phi)});
        }
        std::vector<double> probes;
        for (double t : l_times) {
            if (t <= tr.t_end()) {
                probes.push_back(t);
            }
        }
        const auto d = diagnose(tr, mean_e, probes);
        list.push_back(trajectory_json(tr, d, hbar_j));
        out << "r0 = " << tr.r0 << " nm: " << d.n_loops << " loops, tau_obs = "
            << (d.tau_obs ? std::to_string(*d.tau_obs) + " ns" : std::string("none"));
        if (tr.status != TrajectoryStatus::Completed) {
            stalled = true;
            out << "  [stalled at t = " << tr.t_end() << ": " << tr.stall_reason << "]";
        }
        out << '\n';
    }
    write_json(dir / "report.json",
               {{"command", "trajectory"}, {"spec", spec_json(spec)}, {"tol", c.tol}, {"trajectories", list}});
    if (stalled) {
        throw StallError("integration stalled before t_end; partial output written");
    }
}

void run_ensemble(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto spec = packet_spec(c);
    const GaussianPacket packet(spec);
    std::vector<double> r0s = c.r0_list;
    std::vector<double> weights;
    if (r0s.empty()) {
        // Midpoint grid on (0, r_hi]; weight = probability of the cell.
        const int n = c.n_r0.value_or(16);
        const double r_hat = packet.initial_peak_radius();
        const double r_hi = r_hat > 0.0 ? 2.0 * r_hat : 10.0 * spec.constants.hbar() / spec.p0;
        for (int i = 0; i < n; ++i) {
            r0s.push_back(r_hi * (i + 0.5) / n);
        }
        for (double r : r0s) {
            weights.push_back(2.0 * std::numbers::pi * r * packet.density(r, 0.0) * r_hi / n);
        }
    } else {
        for (double r : r0s) {
            weights.push_back(2.0 * std::numbers::pi * r * packet.density(r, 0.0));
        }
    }
    double wsum = 0.0;
    for (double w : weights) {
        wsum += w;
    }
    for (double& w : weights) {
        w /= wsum;
    }

    const auto trajs = integrate_all(packet, r0s, c);
    Csv csv(dir / "ensemble.csv", {"r0", "weight", "n_loops", "tau_obs", "r_end", "phi_end", "stalled"});
    double mean_loops = 0.0;
    int stalled = 0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        const auto& tr = trajs[i];
        const int loops = count_loops(tr);
        const auto tau = decay_time(tr);
        const bool st = tr.status != TrajectoryStatus::Completed;
        stalled += st;
        mean_loops += weights[i] * loops;
        csv.row({tr.r0, weights[i], static_cast<double>(loops), tau.value_or(NAN), tr.samples.back().r,
                 tr.samples.back().phi, st ? 1.0 : 0.0});
    }
    write_json(dir / "report.json", {{"command", "ensemble"},
                                     {"spec", spec_json(spec)},
                                     {"n", trajs.size()},
                                     {"weighted_mean_loops", mean_loops},
                                     {"stalled", stalled}});
    out << trajs.size() << " trajectories, weighted mean loops " << mean_loops << ", stalled " << stalled << '\n';
    if (stalled) {
        throw StallError(std::to_string(stalled) + " trajectories stalled; partial output written");
    }
}

void run_arrival(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto spec = packet_spec(c);
    const GaussianPacket packet(spec);
    const DetectorSpec det{*c.R};
    FlightOptions fo;
    fo.tol = c.tol;

    ArrivalRecord rec;
    rec.detector = det;
    rec.r0_grid = c.r0_list.empty()
                      ? default_r0_grid(det, c.n_r0.value_or(64), density_period(packet) / ArrivalOptions{}.r0_per_period)
                      : c.r0_list;
    std::sort(rec.r0_grid.begin(), rec.r0_grid.end());
    rec.t_flight = flight_times(packet, det, rec.r0_grid, c.t_end.value_or(0.1), threads_of(c), fo);
    rec.tau_grid = default_tau_grid(rec.t_flight, c.n_tau);
    {
        Csv csv(dir / "tflight.csv", {"r0", "t_flight"});
        for (std::size_t i = 0; i < rec.r0_grid.size(); ++i) {
            csv.row({rec.r0_grid[i], rec.t_flight[i]});
        }
    }
    auto traj = arrival_density_traj(packet, det, rec.r0_grid, rec.t_flight, rec.tau_grid);
    auto flux = arrival_density_flux(packet, det, rec.tau_grid);
    rec.pi_traj = std::move(traj.values);
    rec.pi_flux = std::move(flux.values);
    rec.normalization_traj = traj.normalization;
    rec.normalization_flux = flux.normalization;

    Csv csv(dir / "arrival.csv", {"tau", "pi_traj", "pi_flux"});
    for (std::size_t i = 0; i < rec.tau_grid.size(); ++i) {
        csv.row({rec.tau_grid[i], rec.pi_traj[i], rec.pi_flux[i]});
    }
    const double res_traj = quad::trapezoid(rec.tau_grid, rec.pi_traj) - 1.0;
    const double res_flux = quad::trapezoid(rec.tau_grid, rec.pi_flux) - 1.0;
    write_json(dir / "report.json", {{"command", "arrival"},
                                     {"spec", spec_json(spec)},
                                     {"R", det.radius},
                                     {"n_r0", rec.r0_grid.size()},
                                     {"n_tau", rec.tau_grid.size()},
                                     {"peak_tau", rec.peak_tau()},
                                     {"discrepancy", rec.discrepancy()},
                                     {"normalization_traj", rec.normalization_traj},
                                     {"normalization_flux", rec.normalization_flux},
                                     {"normalization_residual_traj", res_traj},
                                     {"normalization_residual_flux", res_flux},
                                     {"flux_positive", true}});
    out << "R = " << det.radius << " nm: peak tau = " << rec.peak_tau() << " ns, sup |pi_traj - pi_flux| / peak = "
        << rec.discrepancy() << '\n';
}

bool row_matches(const GoldenRow& row, const std::vector<std::pair<std::string, double>>& filter) {
    for (const auto& [key, value] : filter) {
        const auto it = row.inputs.find(key);
        if (it == row.inputs.end() || std::abs(std::stod(it->second) - value) > 1e-12 * std::abs(value)) {
            return false;
        }
    }
    return true;
}

void run_tables(const RunConfig& c, const std::filesystem::path& dir, std::ostream& out) {
    const auto suite = load_goldens(c.goldens.empty() ? default_goldens_path() : c.goldens);
    const auto filter = parse_row_filter(c.row);
    std::vector<GoldenRow> picked;
    for (const auto& row : suite) {
        const bool t1 = row.kind == "alpha";
        const bool t2 = row.source.rfind("table 2", 0) == 0;
        if ((*c.table == 1 && t1) || (*c.table == 2 && t2 && row_matches(row, filter))) {
            picked.push_back(row);
        }
    }
    CheckOptions opt;
    opt.include_slow = c.include_slow;
    opt.threads = threads_of(c);
    const auto report = check_all(picked, opt);

    std::ostringstream txt;
    if (*c.table == 1) {
        txt << "j      alpha_j     expected  delta\n";
        for (std::size_t i = 0; i < picked.size(); ++i) {
            const auto& r = report.rows[i];
            const auto& chk = r.checks.at(0);
            char line[128];
            std::snprintf(line, sizeof line, "%-6s %-11.4f %-9.2f %+.4f  %s\n", picked[i].inputs.at("j").c_str(),
                          chk.computed, chk.expected, chk.computed - chk.expected, r.pass() ? "ok" : "FAIL");
            txt << line;
        }
    } else {
        for (const auto& r : report.rows) {
            if (r.skipped) {
                txt << r.id << ": skipped (slow; pass --slow)\n";
                continue;
            }
            if (!r.error.empty()) {
                txt << r.id << ": ERROR " << r.error << '\n';
                continue;
            }
            txt << r.id << ":";
            for (const auto& chk : r.checks) {
                txt << "  " << chk.key << " = " << std::setprecision(6) << chk.computed << " (" << chk.expected << " "
                    << chk.tolerance.str() << ")" << (chk.pass ? "" : " FAIL");
            }
            if (!r.known_deviation.empty() && !r.pass()) {
                txt << "  [known deviation]";
            }
            txt << '\n';
        }
    }
    txt << report.failures() << " of " << report.rows.size() << " rows outside tolerance\n";
    std::ofstream(dir / (*c.table == 1 ? "table1.txt" : "table2.txt")) << txt.str();
    out << txt.str();
}

}  // namespace

void run(const RunConfig& c, std::ostream& out) {
    validate(c);
    const std::filesystem::path dir(c.out);
    std::filesystem::create_directories(dir);
    switch (c.command) {
        case Command::Stationary:
            return run_stationary(c, dir, out);
        case Command::Field:
            return run_field(c, dir, out);
        case Command::Observables:
            return run_observables(c, dir, out);
        case Command::Trajectory:
            return run_trajectory(c, dir, out);
        case Command::Ensemble:
            return run_ensemble(c, dir, out);
        case Command::Arrival:
            return run_arrival(c, dir, out);
        case Command::Tables:
            return run_tables(c, dir, out);
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const UsageError*>(&e)) return 2;
    if (dynamic_cast<const DomainError*>(&e)) return 3;
    if (dynamic_cast<const ConvergenceError*>(&e) || dynamic_cast<const StallError*>(&e)) return 4;
    return 1;
}

namespace {

const char* error_kind(int code) {
    switch (code) {
        case 2:
            return "usage";
        case 3:
            return "domain";
        case 4:
            return "convergence";
        default:
            return "error";
    }
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    try {
        run(parse_args(argc, argv), out);
        return 0;
    } catch (const HelpRequested& h) {
        out << h.text;
        return 0;
    } catch (const std::exception& e) {
        const int code = exit_code_for(e);
        err << json{{"error", error_kind(code)}, {"message", e.what()}, {"exit_code", code}}.dump() << '\n';
        return code;
    }
}

}  // namespace dbb::cli
