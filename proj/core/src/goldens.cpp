#include "dbb/goldens.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "dbb/angular_momentum.hpp"
#include "dbb/dynamics.hpp"
#include "dbb/errors.hpp"
#include "dbb/observables.hpp"
#include "dbb/packet.hpp"
#include "dbb/parallel.hpp"
#include "dbb/stationary.hpp"

#ifndef DBB_GOLDENS_FILE
#define DBB_GOLDENS_FILE "data/goldens.json"
#endif

namespace dbb {

using nlohmann::json;

bool Tolerance::accepts(double computed, double expected) const {
    if (!std::isfinite(computed)) {
        return false;
    }
    switch (kind) {
        case Kind::Abs:
            return std::abs(computed - expected) <= value;
        case Kind::Rel:
            return std::abs(computed - expected) <= value * std::abs(expected);
        case Kind::Factor:
            return computed > 0.0 && expected > 0.0 && computed <= expected * value && computed >= expected / value;
        case Kind::Range:
            return computed >= min && computed <= max;
    }
    return false;
}

std::string Tolerance::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Abs:
            os << "+-" << value;
            break;
        case Kind::Rel:
            os << "+-" << value * 100 << "%";
            break;
        case Kind::Factor:
            os << "x/" << value;
            break;
        case Kind::Range:
            os << "in [" << min << ", " << max << "]";
            break;
    }
    return os.str();
}

bool RowResult::pass() const {
    if (skipped) {
        return true;
    }
    if (!error.empty()) {
        return false;
    }
    for (const auto& c : checks) {
        if (!c.pass) {
            return false;
        }
    }
    return true;
}

int GoldenReport::failures(bool count_known) const {
    int n = 0;
    for (const auto& r : rows) {
        if (!r.pass() && (count_known || r.known_deviation.empty())) {
            ++n;
        }
    }
    return n;
}

bool GoldenReport::pass() const { return failures(false) == 0; }

namespace {

Tolerance parse_tolerance(const json& t) {
    Tolerance tol;
    if (t.contains("abs")) {
        tol.kind = Tolerance::Kind::Abs;
        tol.value = t.at("abs").get<double>();
    } else if (t.contains("rel")) {
        tol.kind = Tolerance::Kind::Rel;
        tol.value = t.at("rel").get<double>();
    } else if (t.contains("factor")) {
        tol.kind = Tolerance::Kind::Factor;
        tol.value = t.at("factor").get<double>();
    } else if (t.contains("min") || t.contains("max")) {
        tol.kind = Tolerance::Kind::Range;
        tol.min = t.value("min", -HUGE_VAL);
        tol.max = t.value("max", HUGE_VAL);
    } else {
        throw Error("tolerance needs one of abs, rel, factor, min/max: " + t.dump());
    }
    return tol;
}

std::string input_string(const json& v) {
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number()) {
        return v.dump();
    }
    throw Error("golden inputs must be strings or numbers: " + v.dump());
}

}  // namespace

std::vector<GoldenRow> parse_goldens(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(std::string("goldens: ") + e.what());
    }
    std::vector<GoldenRow> rows;
    try {
        for (const auto& r : doc.at("rows")) {
            GoldenRow row;
            row.id = r.at("id").get<std::string>();
            row.source = r.value("source", "");
            if (row.source.empty()) {
                throw Error("golden row '" + row.id + "' has no source");
            }
            row.kind = r.at("kind").get<std::string>();
            for (const auto& [k, v] : r.at("inputs").items()) {
                row.inputs[k] = input_string(v);
            }
            for (const auto& [k, v] : r.at("expected").items()) {
                row.expected[k] = v.get<double>();
            }
            for (const auto& [k, v] : r.at("tolerance").items()) {
                row.tolerance[k] = parse_tolerance(v);
            }
            for (const auto& [k, v] : row.expected) {
                if (!row.tolerance.count(k)) {
                    throw Error("golden row '" + row.id + "': no tolerance for '" + k + "'");
                }
            }
            row.slow = r.value("slow", false);
            row.known_deviation = r.value("known_deviation", "");
            rows.push_back(std::move(row));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("goldens: ") + e.what());
    }
    return rows;
}

std::vector<GoldenRow> load_goldens(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open goldens file " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_goldens(ss.str());
}

std::string default_goldens_path() { return DBB_GOLDENS_FILE; }

namespace {

double number(const GoldenRow& row, const std::string& key) {
    const auto it = row.inputs.find(key);
    if (it == row.inputs.end()) {
        throw Error("golden row '" + row.id + "' lacks input '" + key + "'");
    }
    return std::stod(it->second);
}

std::optional<double> maybe_number(const GoldenRow& row, const std::string& key) {
    const auto it = row.inputs.find(key);
    return it == row.inputs.end() ? std::nullopt : std::optional<double>(std::stod(it->second));
}

PacketSpec packet_of(const GoldenRow& row) {
    PacketSpec s{AngularMomentum::parse(row.inputs.at("j")), number(row, "p0"), number(row, "sigma")};
    if (auto m = maybe_number(row, "m")) {
        s.m = *m;
    }
    s.validate();
    return s;
}

Trajectory trajectory_of(const GoldenRow& row, const GaussianPacket& packet) {
    const double r0 = maybe_number(row, "r0").value_or(packet.initial_peak_radius());
    return integrate(packet, r0, number(row, "t_end"));
}

std::map<std::string, double> compute(const GoldenRow& row) {
    if (row.kind == "alpha") {
        return {{"alpha", alpha_coefficient(AngularMomentum::parse(row.inputs.at("j")))}};
    }
    const auto spec = packet_of(row);
    if (row.kind == "mean_values") {
        const auto mv = mean_values(spec);
        return {{"mean_e", mv.mean_e}, {"delta_e", mv.delta_e}, {"tau_min", mv.tau_min}};
    }
    const GaussianPacket packet(spec);
    if (row.kind == "radii") {
        return {{"r_l", l_radius(spec)}, {"r0_hat", packet.initial_peak_radius()}};
    }
    const auto traj = trajectory_of(row, packet);
    if (traj.status != TrajectoryStatus::Completed) {
        throw Error("trajectory stalled: " + traj.stall_reason);
    }
    if (row.kind == "loops") {
        return {{"n_loops", count_loops(traj, maybe_number(row, "count_up_to"))}};
    }
    if (row.kind == "decay") {
        return {{"tau_obs", decay_time(traj).value_or(NAN)}};
    }
    if (row.kind == "no_cycle") {
        // "Immediate" decay: within one circular period 2 pi r0 / c.
        const double period = 2.0 * std::numbers::pi * std::max(traj.r_start, 1e-300) / spec.constants.c();
        const auto tau = decay_time(traj);
        return {{"n_loops", count_loops(traj)}, {"tau_obs_periods", tau ? *tau / period : 0.0}};
    }
    throw Error("unknown golden kind '" + row.kind + "'");
}

}  // namespace

RowResult check_row(const GoldenRow& row) {
    RowResult res;
    res.id = row.id;
    res.source = row.source;
    res.known_deviation = row.known_deviation;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        const auto got = compute(row);
        for (const auto& [key, want] : row.expected) {
            const auto it = got.find(key);
            const double v = it == got.end() ? NAN : it->second;
            const auto& tol = row.tolerance.at(key);
            res.checks.push_back({key, want, v, tol, tol.accepts(v, want)});
        }
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

GoldenReport check_all(const std::vector<GoldenRow>& suite, const CheckOptions& opt) {
    GoldenReport report;
    report.rows.resize(suite.size());
    parallel_for(suite.size(), opt.threads, [&](std::size_t i) {
        const auto& row = suite[i];
        if ((row.slow && !opt.include_slow) || (opt.kind && row.kind != *opt.kind)) {
            report.rows[i].id = row.id;
            report.rows[i].source = row.source;
            report.rows[i].skipped = true;
            return;
        }
        report.rows[i] = check_row(row);
    });
    return report;
}

}  // namespace dbb
