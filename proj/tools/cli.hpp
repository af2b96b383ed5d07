#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dbb/errors.hpp"

namespace dbb::cli {

enum class Command { Stationary, Field, Observables, Trajectory, Ensemble, Arrival, Tables };

std::string command_name(Command c);
Command command_from_name(const std::string& name);

/// Bad flag, missing parameter or out-of-domain value. Exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    Command command = Command::Observables;

    std::optional<int> twice_j;  // 2j, odd
    std::optional<double> p0;
    std::optional<double> sigma;
    double m = 0.0;
    std::vector<double> r0_list;  // empty: most probable radius
    std::optional<double> R;
    std::optional<double> t_end;
    double tol = 1e-9;
    int nodes = 256;
    std::string out = ".";
    std::optional<int> threads;

    // field / stationary grid
    std::optional<double> r_max;
    int n_r = 400;
    std::vector<double> times;  // field snapshots; default {0}

    // trajectory / ensemble
    int n_samples = 2000;
    std::vector<double> l_times;  // classical_l probes; default {t_end}
    std::optional<int> n_r0;  // r0 grid size when r0_list is empty (ensemble 16, arrival 64)

    // arrival
    int n_tau = 512;

    // tables
    std::optional<int> table;
    std::string row;  // "p0=1e-4,sigma=1e-7"
    std::string goldens;
    bool include_slow = false;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// argv[0] is the program name, argv[1] the subcommand. A --config JSON file
/// is read first; flags given on the command line override it.
RunConfig parse_args(int argc, const char* const* argv);
RunConfig parse_args(const std::vector<std::string>& args);

std::string to_json(const RunConfig& cfg);
RunConfig from_json(const std::string& text);

/// Throws UsageError naming the violated precondition.
void validate(const RunConfig& cfg);

/// Executes the command, writing files under cfg.out and a summary to out.
/// Throws on failure; see exit_code_for.
void run(const RunConfig& cfg, std::ostream& out);

/// 2 usage, 3 numeric domain, 4 convergence or stall, 1 anything else.
int exit_code_for(const std::exception& e);

/// parse + run with errors reported as one JSON line on err.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Integration stalled before t_end. Exit code 4.
class StallError : public Error {
public:
    using Error::Error;
};

}  // namespace dbb::cli
