#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dbb {

/// Acceptance band for one expected value. Exactly one of abs / rel /
/// factor / [min, max] is active.
struct Tolerance {
    enum class Kind { Abs, Rel, Factor, Range };
    Kind kind = Kind::Abs;
    double value = 0.0;  // abs, rel or factor
    double min = 0.0;
    double max = 0.0;

    bool accepts(double computed, double expected) const;
    std::string str() const;
};

struct GoldenRow {
    std::string id;
    /// Where the expected numbers were read from.
    std::string source;
    /// alpha | mean_values | radii | loops | decay | no_cycle
    std::string kind;
    std::map<std::string, std::string> inputs;
    std::map<std::string, double> expected;
    std::map<std::string, Tolerance> tolerance;
    bool slow = false;
    /// Non-empty when the row is expected to fail; the note says why.
    std::string known_deviation;
};

struct GoldenCheck {
    std::string key;
    double expected;
    double computed;
    Tolerance tolerance;
    bool pass;
};

struct RowResult {
    std::string id;
    std::string source;
    std::vector<GoldenCheck> checks;
    std::string error;  // set if the computation threw
    std::string known_deviation;
    double seconds = 0.0;
    bool skipped = false;

    bool pass() const;
};

struct GoldenReport {
    std::vector<RowResult> rows;

    /// All non-skipped rows pass, known deviations excepted.
    bool pass() const;
    int failures(bool count_known = true) const;
};

std::vector<GoldenRow> parse_goldens(const std::string& json_text);
std::vector<GoldenRow> load_goldens(const std::string& path);

/// Location of the asset in the source tree (or install prefix).
std::string default_goldens_path();

struct CheckOptions {
    bool include_slow = false;
    int threads = 1;
    /// Only rows of this kind, if set.
    std::optional<std::string> kind;
};

/// Evaluates every row. Rows run in parallel; report order follows the
/// asset order.
GoldenReport check_all(const std::vector<GoldenRow>& suite, const CheckOptions& opt = {});

RowResult check_row(const GoldenRow& row);

}  // namespace dbb
