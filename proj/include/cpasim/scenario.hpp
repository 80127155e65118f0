#ifndef CPASIM_SCENARIO_HPP
#define CPASIM_SCENARIO_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cpasim/analysis.hpp"
#include "cpasim/network.hpp"

namespace cpasim {

/// Sweep of one phase parameter over [start, stop), `steps` evenly spaced
/// points. `parameter` is "phi" (input phase) or a phase-stage label.
struct SweepConfig {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int steps = 1;

    bool operator==(const SweepConfig&) const = default;
};

/// Complete description of a runnable scenario. Serializes to/from the JSON
/// config format (schema_version 1); see parse_config.
struct ScenarioConfig {
    int schema_version = 1;
    std::vector<std::string> modes;
    std::vector<StageSpec> stages;
    InputSpec input;
    std::optional<SweepConfig> sweep;
    std::optional<std::string> output;

    bool operator==(const ScenarioConfig&) const = default;
};

struct BsCoefficients {
    double t, r, l;
};

/// One lossy beam splitter on modes (1,2), input (|1> + e^{i phi}|2>)/sqrt(2),
/// phi swept over [0, 2pi).
ScenarioConfig scenario_single_bs(double t, double r, double l);

/// Four-element interferometer: elements a on modes (1,2), b on (4,3),
/// phase shifters theta3/theta4 on modes 3/4, then c on (2,3) and d on
/// (4,1). Port order fixes which input feeds each absorber vector. Input
/// (|1> + e^{i phi}|3>)/sqrt(2), phi swept over [0, 2pi).
ScenarioConfig scenario_interferometer(const std::array<BsCoefficients, 4>& coeffs_abcd,
                                       double theta3, double theta4);

/// Canonical coefficients t = -r = 1/2, l = 1/sqrt(2) for all four elements.
ScenarioConfig scenario_interferometer(double theta3 = 0.0, double theta4 = 0.0);

/// Strict parse: unknown keys, bad types and bad values are ConfigError with
/// a JSON-pointer path; element physicality violations surface as the
/// corresponding PhysicalityError naming the element.
ScenarioConfig parse_config(const std::string& json_text);

std::string serialize_config(const ScenarioConfig& config);

/// Accepts a plain number or a "pi" literal ("pi", "-pi/2", "3*pi/4", "2pi");
/// used for every angle field in configs and CLI flags.
double parse_angle_text(const std::string& text);

/// Network for the config's stages (sweep not applied).
Network build_scenario_network(const ScenarioConfig& config, int photon_cap = 4);

struct RunOptions {
    int photon_cap = 4;
    /// Conservation residual above this aborts the run (InvariantError).
    double residual_tolerance = 1e-9;
};

/// Result rows. Wide format (single-photon inputs): one row per sweep point
/// with detector probabilities, per-element absorption probabilities and the
/// conservation residual. Long format (N >= 2): one row per (point, outcome
/// pattern) with its probability.
struct ResultTable {
    struct Row {
        double param = 0.0;
        std::string pattern; // long format only
        std::vector<double> values;
    };

    std::vector<std::string> header;
    std::vector<Row> rows;
    bool long_format = false;
};

ResultTable run(const ScenarioConfig& config, const RunOptions& options = {});

enum class CpaObjective { total_absorption, total_transparency };

struct CpaResult {
    double phase;
    double value;
};

/// Finds the phase extremizing total absorption over the config's sweep
/// parameter: 256-point coarse grid, then golden-section refinement to a
/// bracket below 1e-7. Requires exactly one free phase parameter (a sweep
/// block).
CpaResult cpa_find(const ScenarioConfig& config, CpaObjective objective,
                   const RunOptions& options = {});

/// CSV with header row, RFC-4180 quoting, values at 12 significant digits.
/// Byte-identical for identical configs.
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv(const ResultTable& table, const std::string& path);

/// Canonical pattern text, e.g. "d:1=1;a:c=1" (one photon at detector 1, one
/// excitation absorbed at element c); "vac" for the empty pattern.
std::string format_pattern(const OutcomePattern& pattern, const ModeRegistry& registry);

} // namespace cpasim

#endif
