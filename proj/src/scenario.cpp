#include "cpasim/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cpasim/errors.hpp"
#include "cpasim/golden.hpp"

namespace cpasim {

namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Angle parsing

double parse_plain_number(const std::string& text, bool& ok) {
    std::size_t consumed = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &consumed);
    } catch (const std::exception&) {
        ok = false;
        return 0.0;
    }
    ok = consumed == text.size() && std::isfinite(value);
    return ok ? value : 0.0;
}

} // namespace

double parse_angle_text(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw ConfigError("angle: empty text");

    bool ok = false;
    const double plain = parse_plain_number(s, ok);
    if (ok) return plain;

    double sign = 1.0;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        if (s[pos] == '-') sign = -1.0;
        ++pos;
    }

    const std::size_t pi_pos = s.find("pi", pos);
    if (pi_pos == std::string::npos)
        throw ConfigError("angle: cannot parse '" + text + "'");

    double factor = 1.0;
    if (pi_pos > pos) {
        std::string head = s.substr(pos, pi_pos - pos);
        if (!head.empty() && head.back() == '*') head.pop_back();
        factor = parse_plain_number(head, ok);
        if (!ok) throw ConfigError("angle: cannot parse '" + text + "'");
    }

    double divisor = 1.0;
    const std::size_t tail_pos = pi_pos + 2;
    if (tail_pos < s.size()) {
        if (s[tail_pos] != '/')
            throw ConfigError("angle: cannot parse '" + text + "'");
        divisor = parse_plain_number(s.substr(tail_pos + 1), ok);
        if (!ok || divisor == 0.0)
            throw ConfigError("angle: cannot parse '" + text + "'");
    }

    return sign * factor * std::numbers::pi / divisor;
}

namespace {

// ---------------------------------------------------------------------------
// Strict JSON helpers. Every error carries the JSON-pointer path of the
// offending value.

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError("config " + (path.empty() ? std::string("/") : path) + ": " + what);
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            fail(path, "unknown key '" + key + "'");
    }
}

const json& get_required(const json& obj, const std::string& path, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key '") + key + "'");
    return *it;
}

const json* get_optional(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

/// Angle field: plain JSON number, or a "pi"-literal string.
double as_angle(const json& j, const std::string& path) {
    if (j.is_number()) return as_number(j, path);
    if (j.is_string()) {
        try {
            return parse_angle_text(j.get<std::string>());
        } catch (const ConfigError& e) {
            fail(path, e.what());
        }
    }
    fail(path, "expected a number or an angle string");
}

Amplitude as_amplitude(const json& j, const std::string& path) {
    if (j.is_number()) return Amplitude{as_number(j, path), 0.0};
    if (j.is_array()) {
        if (j.size() != 2) fail(path, "expected [re, im]");
        return Amplitude{as_number(j[0], path + "/0"), as_number(j[1], path + "/1")};
    }
    fail(path, "expected a number or [re, im]");
}

StageSpec parse_stage(const json& j, const std::string& path) {
    require_object(j, path);
    const std::string kind = as_string(get_required(j, path, "kind"), path + "/kind");
    if (kind == "bs") {
        check_keys(j, path, {"kind", "label", "t", "r", "l", "port1", "port2"});
        const std::string label = as_string(get_required(j, path, "label"), path + "/label");
        const double t = as_number(get_required(j, path, "t"), path + "/t");
        const double r = as_number(get_required(j, path, "r"), path + "/r");
        const double l = as_number(get_required(j, path, "l"), path + "/l");
        return BeamSplitterStageSpec{
            LossyBeamSplitter(t, r, l, label),
            as_string(get_required(j, path, "port1"), path + "/port1"),
            as_string(get_required(j, path, "port2"), path + "/port2")};
    }
    if (kind == "phase") {
        check_keys(j, path, {"kind", "label", "mode", "theta"});
        return PhaseStageSpec{as_string(get_required(j, path, "label"), path + "/label"),
                              as_string(get_required(j, path, "mode"), path + "/mode"),
                              as_angle(get_required(j, path, "theta"), path + "/theta")};
    }
    fail(path + "/kind", "expected 'bs' or 'phase'");
}

InputSpec parse_input(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"kind", "modes", "phi", "photons", "amplitudes"});
    InputSpec spec;
    const std::string kind = as_string(get_required(j, path, "kind"), path + "/kind");
    if (kind == "superposition")
        spec.kind = InputSpec::Kind::superposition;
    else if (kind == "noon")
        spec.kind = InputSpec::Kind::noon;
    else if (kind == "custom")
        spec.kind = InputSpec::Kind::custom;
    else
        fail(path + "/kind", "expected 'superposition', 'noon' or 'custom'");

    const json& modes = get_required(j, path, "modes");
    if (!modes.is_array()) fail(path + "/modes", "expected an array");
    for (std::size_t i = 0; i < modes.size(); ++i)
        spec.modes.push_back(as_string(modes[i], path + "/modes/" + std::to_string(i)));

    if (const json* phi = get_optional(j, "phi")) spec.phi = as_angle(*phi, path + "/phi");

    if (const json* photons = get_optional(j, "photons")) {
        spec.photons = as_int(*photons, path + "/photons");
        if (spec.photons < 1) fail(path + "/photons", "expected a positive integer");
        if (spec.kind != InputSpec::Kind::noon && spec.photons != 1)
            fail(path + "/photons", "only 'noon' inputs may carry more than one photon");
    }

    if (const json* amps = get_optional(j, "amplitudes")) {
        if (spec.kind != InputSpec::Kind::custom)
            fail(path + "/amplitudes", "only allowed for 'custom' inputs");
        if (!amps->is_array()) fail(path + "/amplitudes", "expected an array");
        for (std::size_t i = 0; i < amps->size(); ++i)
            spec.amplitudes.push_back(
                as_amplitude((*amps)[i], path + "/amplitudes/" + std::to_string(i)));
    } else if (spec.kind == InputSpec::Kind::custom) {
        fail(path, "missing key 'amplitudes'");
    }
    return spec;
}

SweepConfig parse_sweep(const json& j, const std::string& path) {
    require_object(j, path);
    check_keys(j, path, {"parameter", "start", "stop", "steps"});
    SweepConfig sweep;
    sweep.parameter = as_string(get_required(j, path, "parameter"), path + "/parameter");
    sweep.start = as_angle(get_required(j, path, "start"), path + "/start");
    sweep.stop = as_angle(get_required(j, path, "stop"), path + "/stop");
    sweep.steps = as_int(get_required(j, path, "steps"), path + "/steps");
    if (sweep.steps < 1) fail(path + "/steps", "expected at least 1 step");
    return sweep;
}

json input_to_json(const InputSpec& spec) {
    json j = json::object();
    switch (spec.kind) {
    case InputSpec::Kind::superposition: j["kind"] = "superposition"; break;
    case InputSpec::Kind::noon: j["kind"] = "noon"; break;
    case InputSpec::Kind::custom: j["kind"] = "custom"; break;
    }
    j["modes"] = spec.modes;
    j["phi"] = spec.phi;
    if (spec.kind == InputSpec::Kind::noon) j["photons"] = spec.photons;
    if (spec.kind == InputSpec::Kind::custom) {
        json amps = json::array();
        for (const Amplitude& a : spec.amplitudes) amps.push_back({a.real(), a.imag()});
        j["amplitudes"] = std::move(amps);
    }
    return j;
}

} // namespace

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    require_object(root, "");
    check_keys(root, "", {"schema_version", "modes", "stages", "input", "sweep", "output"});

    ScenarioConfig config;
    config.schema_version = as_int(get_required(root, "", "schema_version"), "/schema_version");
    if (config.schema_version != 1)
        fail("/schema_version", "unsupported version " + std::to_string(config.schema_version));

    const json& modes = get_required(root, "", "modes");
    if (!modes.is_array() || modes.empty())
        fail("/modes", "expected a nonempty array");
    for (std::size_t i = 0; i < modes.size(); ++i)
        config.modes.push_back(as_string(modes[i], "/modes/" + std::to_string(i)));

    const json& stages = get_required(root, "", "stages");
    if (!stages.is_array()) fail("/stages", "expected an array");
    for (std::size_t i = 0; i < stages.size(); ++i)
        config.stages.push_back(parse_stage(stages[i], "/stages/" + std::to_string(i)));

    config.input = parse_input(get_required(root, "", "input"), "/input");

    if (const json* sweep = get_optional(root, "sweep"))
        config.sweep = parse_sweep(*sweep, "/sweep");
    if (const json* output = get_optional(root, "output"))
        config.output = as_string(*output, "/output");
    return config;
}

std::string serialize_config(const ScenarioConfig& config) {
    json root = json::object();
    root["schema_version"] = config.schema_version;
    root["modes"] = config.modes;

    json stages = json::array();
    for (const StageSpec& spec : config.stages) {
        json j = json::object();
        if (const auto* bs = std::get_if<BeamSplitterStageSpec>(&spec)) {
            j["kind"] = "bs";
            j["label"] = bs->element.label();
            j["t"] = bs->element.t();
            j["r"] = bs->element.r();
            j["l"] = bs->element.l();
            j["port1"] = bs->port1;
            j["port2"] = bs->port2;
        } else {
            const auto& ph = std::get<PhaseStageSpec>(spec);
            j["kind"] = "phase";
            j["label"] = ph.label;
            j["mode"] = ph.mode;
            j["theta"] = ph.theta;
        }
        stages.push_back(std::move(j));
    }
    root["stages"] = std::move(stages);
    root["input"] = input_to_json(config.input);

    if (config.sweep) {
        json j = json::object();
        j["parameter"] = config.sweep->parameter;
        j["start"] = config.sweep->start;
        j["stop"] = config.sweep->stop;
        j["steps"] = config.sweep->steps;
        root["sweep"] = std::move(j);
    }
    if (config.output) root["output"] = *config.output;
    return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Canned scenarios

ScenarioConfig scenario_single_bs(double t, double r, double l) {
    ScenarioConfig config;
    config.modes = {"1", "2"};
    config.stages.push_back(
        BeamSplitterStageSpec{LossyBeamSplitter(t, r, l, "bs"), "1", "2"});
    config.input.kind = InputSpec::Kind::superposition;
    config.input.modes = {"1", "2"};
    config.sweep = SweepConfig{"phi", 0.0, 2.0 * std::numbers::pi, 100};
    return config;
}

ScenarioConfig scenario_interferometer(const std::array<BsCoefficients, 4>& coeffs_abcd,
                                       double theta3, double theta4) {
    const auto& [a, b, c, d] = coeffs_abcd;
    ScenarioConfig config;
    config.modes = {"1", "2", "3", "4"};
    config.stages.push_back(
        BeamSplitterStageSpec{LossyBeamSplitter(a.t, a.r, a.l, "a"), "1", "2"});
    config.stages.push_back(
        BeamSplitterStageSpec{LossyBeamSplitter(b.t, b.r, b.l, "b"), "4", "3"});
    config.stages.push_back(PhaseStageSpec{"theta3", "3", theta3});
    config.stages.push_back(PhaseStageSpec{"theta4", "4", theta4});
    config.stages.push_back(
        BeamSplitterStageSpec{LossyBeamSplitter(c.t, c.r, c.l, "c"), "2", "3"});
    config.stages.push_back(
        BeamSplitterStageSpec{LossyBeamSplitter(d.t, d.r, d.l, "d"), "4", "1"});
    config.input.kind = InputSpec::Kind::superposition;
    config.input.modes = {"1", "3"};
    config.sweep = SweepConfig{"phi", 0.0, 2.0 * std::numbers::pi, 100};
    return config;
}

ScenarioConfig scenario_interferometer(double theta3, double theta4) {
    const double l = 1.0 / std::sqrt(2.0);
    const BsCoefficients bs{0.5, -0.5, l};
    return scenario_interferometer({bs, bs, bs, bs}, theta3, theta4);
}

Network build_scenario_network(const ScenarioConfig& config, int photon_cap) {
    return Network::build(config.modes, config.stages, NetworkOptions{photon_cap});
}

// ---------------------------------------------------------------------------
// Runs and sweeps

std::string format_pattern(const OutcomePattern& pattern, const ModeRegistry& registry) {
    if (pattern.detections.empty() && pattern.absorptions.empty()) return "vac";
    std::string out;
    for (const auto& [mode, count] : pattern.detections) {
        if (!out.empty()) out += ';';
        out += "d:" + registry.label(mode) + "=" + std::to_string(count);
    }
    for (const auto& [element, count] : pattern.absorptions) {
        if (!out.empty()) out += ';';
        out += "a:" + element + "=" + std::to_string(count);
    }
    return out;
}

namespace {

int effective_photons(const InputSpec& input) {
    return input.kind == InputSpec::Kind::noon ? input.photons : 1;
}

/// Applies one value of the sweep parameter. "phi" targets the input phase;
/// anything else must name a phase stage.
void set_parameter(ScenarioConfig& config, const std::string& parameter, double value) {
    if (parameter == "phi") {
        config.input.phi = value;
        return;
    }
    for (StageSpec& spec : config.stages) {
        if (auto* ph = std::get_if<PhaseStageSpec>(&spec)) {
            if (ph->label == parameter) {
                ph->theta = value;
                return;
            }
        }
    }
    throw ConfigError("sweep parameter '" + parameter +
                      "' is neither 'phi' nor a phase stage label");
}

OutcomeDistribution distribution_at(const Network& net, const ScenarioConfig& config) {
    const FockState input = make_input(config.input, net.registry());
    const FockState evolved = evolve(net, input);
    return joint_distribution(evolved, net);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

} // namespace

ResultTable run(const ScenarioConfig& config, const RunOptions& options) {
    ResultTable table;
    table.long_format = effective_photons(config.input) >= 2;

    std::vector<double> points;
    std::string parameter = "phi";
    if (config.sweep) {
        parameter = config.sweep->parameter;
        const double step =
            (config.sweep->stop - config.sweep->start) / config.sweep->steps;
        for (int k = 0; k < config.sweep->steps; ++k)
            points.push_back(config.sweep->start + k * step);
    } else {
        points.push_back(config.input.phi);
    }

    ScenarioConfig working = config;
    working.sweep.reset();
    // The first set_parameter call also validates the parameter name.
    set_parameter(working, parameter, points.front());
    Network net = build_scenario_network(working, options.photon_cap);
    const bool rebuild_per_point = parameter != "phi";

    if (!table.long_format) {
        table.header.push_back("param");
        for (ModeId m : net.detector_modes())
            table.header.push_back("P_" + net.registry()->label(m));
        for (const std::string& element : net.element_labels())
            table.header.push_back("A_" + element);
        table.header.push_back("residual");
    } else {
        table.header = {"param", "pattern", "probability"};
    }

    for (double value : points) {
        set_parameter(working, parameter, value);
        if (rebuild_per_point) net = build_scenario_network(working, options.photon_cap);
        const OutcomeDistribution dist = distribution_at(net, working);
        const double residual = conservation_residual(dist);
        if (residual > options.residual_tolerance)
            throw InvariantError("run: conservation residual " + format_value(residual) +
                                 " exceeds tolerance at parameter " + format_value(value));
        if (!table.long_format) {
            ResultTable::Row row;
            row.param = value;
            for (ModeId m : net.detector_modes())
                row.values.push_back(detection_probability(dist, m));
            for (const std::string& element : net.element_labels())
                row.values.push_back(absorption_probability(dist, element));
            row.values.push_back(residual);
            table.rows.push_back(std::move(row));
        } else {
            for (const auto& [pattern, p] : dist.entries()) {
                ResultTable::Row row;
                row.param = value;
                row.pattern = format_pattern(pattern, *net.registry());
                row.values.push_back(p);
                table.rows.push_back(std::move(row));
            }
        }
    }
    return table;
}

CpaResult cpa_find(const ScenarioConfig& config, CpaObjective objective,
                   const RunOptions& options) {
    if (!config.sweep)
        throw ConfigError("cpa search needs a sweep block naming the free phase parameter");
    const SweepConfig sweep = *config.sweep;
    if (sweep.stop <= sweep.start)
        throw ConfigError("cpa search needs a nonempty phase interval");

    ScenarioConfig working = config;
    working.sweep.reset();
    set_parameter(working, sweep.parameter, sweep.start);
    Network net = build_scenario_network(working, options.photon_cap);
    const bool rebuild_per_point = sweep.parameter != "phi";

    auto absorption_at = [&](double value) {
        set_parameter(working, sweep.parameter, value);
        if (rebuild_per_point) net = build_scenario_network(working, options.photon_cap);
        return total_absorption_probability(distribution_at(net, working));
    };
    const double sign = objective == CpaObjective::total_absorption ? -1.0 : 1.0;
    auto loss = [&](double value) { return sign * absorption_at(value); };

    constexpr int kCoarsePoints = 256;
    const double step = (sweep.stop - sweep.start) / kCoarsePoints;
    double best_x = sweep.start;
    double best_loss = loss(best_x);
    for (int k = 1; k < kCoarsePoints; ++k) {
        const double x = sweep.start + k * step;
        const double v = loss(x);
        if (v < best_loss) {
            best_loss = v;
            best_x = x;
        }
    }

    const double lo = std::max(sweep.start, best_x - step);
    const double hi = std::min(sweep.stop, best_x + step);
    const GoldenResult refined = golden_section_minimize(loss, lo, hi, 1e-7);
    return CpaResult{refined.x, absorption_at(refined.x)};
}

void emit_csv(const ResultTable& table, std::ostream& out) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i > 0) out << ',';
        out << csv_field(table.header[i]);
    }
    out << '\n';
    for (const ResultTable::Row& row : table.rows) {
        out << csv_field(format_value(row.param));
        if (table.long_format) out << ',' << csv_field(row.pattern);
        for (double v : row.values) out << ',' << csv_field(format_value(v));
        out << '\n';
    }
}

void emit_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    emit_csv(table, out);
    if (!out) throw Error("write to '" + path + "' failed");
}

} // namespace cpasim
