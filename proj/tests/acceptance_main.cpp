// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cpasim/analysis.hpp"
#include "cpasim/elements.hpp"
#include "cpasim/fock.hpp"
#include "cpasim/network.hpp"
#include "cpasim/oracle.hpp"
#include "cpasim/scenario.hpp"

#include "testutil.hpp"

using namespace cpasim;

namespace {

const double kPi = std::numbers::pi;
const double kRoot2Inv = 1.0 / std::sqrt(2.0);

int failures = 0;

void report(int number, const std::string& name, bool ok, double metric, double bound) {
    std::printf("%s criterion %d: %s (worst %.3g, bound %.3g)\n", ok ? "PASS" : "FAIL",
                number, name.c_str(), metric, bound);
    if (!ok) ++failures;
}

OutcomeDistribution distribution_at(const Network& net, InputSpec input, double phi) {
    input.phi = phi;
    return joint_distribution(evolve(net, make_input(input, net.registry())), net);
}

// 1: detection and absorption law of a single element over random coefficients.
double single_element_law() {
    std::mt19937 rng(101);
    double worst = 0.0;
    for (int e = 0; e < 50; ++e) {
        const LossyBeamSplitter bs = testutil::random_element(rng, "bs");
        const Network net = Network::build({"1", "2"}, {BeamSplitterStageSpec{bs, "1", "2"}});
        InputSpec input;
        input.modes = {"1", "2"};
        const ModeId m1 = *net.registry()->find("1");
        const ModeId m2 = *net.registry()->find("2");
        for (int k = 0; k < 100; ++k) {
            const double phi = 2.0 * kPi * k / 100.0;
            const OutcomeDistribution dist = distribution_at(net, input, phi);
            const double p = (bs.t() * bs.t() + bs.r() * bs.r()) / 2.0 +
                             bs.r() * bs.t() * std::cos(phi);
            const double a = bs.l() * bs.l() - 2.0 * bs.r() * bs.t() * std::cos(phi);
            worst = std::max(worst, std::abs(detection_probability(dist, m1) - p));
            worst = std::max(worst, std::abs(detection_probability(dist, m2) - p));
            worst = std::max(worst, std::abs(absorption_probability(dist, "bs") - a));
        }
    }

    // balanced element: full absorption at phi = pi, full transparency at 0
    const Network net = Network::build(
        {"1", "2"}, {BeamSplitterStageSpec{LossyBeamSplitter(0.5, 0.5, kRoot2Inv, "bs"), "1", "2"}});
    InputSpec input;
    input.modes = {"1", "2"};
    worst = std::max(worst,
                     std::abs(absorption_probability(distribution_at(net, input, kPi), "bs") - 1.0));
    worst = std::max(worst, std::abs(absorption_probability(distribution_at(net, input, 0.0), "bs")));
    return worst;
}

// 2: four-detector interferometer law at equal downstream phases.
double interferometer_law() {
    const double theta = 0.3;
    const ScenarioConfig config = scenario_interferometer(theta, theta);
    const Network net = build_scenario_network(config);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const double phi = 2.0 * kPi * k / 100.0;
        const OutcomeDistribution dist = distribution_at(net, config.input, phi);
        const double cosv = std::cos(phi + theta);
        for (const char* label : {"1", "2", "3", "4"})
            worst = std::max(worst, std::abs(detection_probability(dist, *net.registry()->find(label)) -
                                             (1.0 + cosv) / 16.0));
        worst = std::max(worst, std::abs(absorption_probability(dist, "a") - 0.25));
        worst = std::max(worst, std::abs(absorption_probability(dist, "b") - 0.25));
        worst = std::max(worst, std::abs(absorption_probability(dist, "c") - (1.0 - cosv) / 8.0));
        worst = std::max(worst, std::abs(absorption_probability(dist, "d") - (1.0 - cosv) / 8.0));
    }
    const OutcomeDistribution dark = distribution_at(net, config.input, kPi - theta);
    worst = std::max(worst, std::abs(total_absorption_probability(dark) - 1.0));
    return worst;
}

double dilated_absorber_overlap(const LossyBeamSplitter& bs, std::size_t* env_count) {
    auto reg = std::make_shared<ModeRegistry>();
    const ModeId m1 = reg->add_optical("1");
    const ModeId m2 = reg->add_optical("2");
    const DilationIsometry dil = dilate(bs, m1, m2, *reg);
    if (env_count) *env_count = dil.environment_modes().size();
    const std::shared_ptr<const ModeRegistry> creg = reg;
    auto absorber = [&](ModeId port) {
        FockState state(creg);
        for (const auto& [mode, coeff] : *dil.map().column(port))
            if (!creg->is_optical(mode))
                state.add_term(OccupationVector::from_entries({{mode, 1}}), coeff);
        return scale(state, 1.0 / state.norm());
    };
    return inner_product(absorber(m1), absorber(m2)).real();
}

// 3: overlap of the two dilated absorber vectors equals -2tr/l^2.
double absorber_overlap_identity(bool* structure_ok) {
    std::mt19937 rng(103);
    double worst = 0.0;
    for (int e = 0; e < 1000; ++e) {
        const LossyBeamSplitter bs = testutil::random_element(rng, "e");
        const double expected = -2.0 * bs.t() * bs.r() / (bs.l() * bs.l());
        worst = std::max(worst, std::abs(dilated_absorber_overlap(bs, nullptr) - expected));
    }
    std::size_t env_count = 0;
    const double aligned =
        dilated_absorber_overlap(LossyBeamSplitter(0.5, -0.5, kRoot2Inv, "e"), &env_count);
    worst = std::max(worst, std::abs(aligned - 1.0));
    *structure_ok = env_count == 1;
    return worst;
}

// 4: first-layer pair absorption is one constant across inputs and phases.
double first_layer_constancy() {
    std::mt19937 rng(104);
    std::vector<std::array<Amplitude, 2>> random_inputs;
    for (int i = 0; i < 20; ++i) {
        std::array<Amplitude, 2> amps = {testutil::random_amplitude(rng),
                                         testutil::random_amplitude(rng)};
        const double norm = std::sqrt(std::norm(amps[0]) + std::norm(amps[1]));
        amps[0] /= norm;
        amps[1] /= norm;
        random_inputs.push_back(amps);
    }

    double lo = 1e300, hi = -1e300;
    auto record = [&](double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };

    for (int i3 = 0; i3 < 16; ++i3) {
        for (int i4 = 0; i4 < 16; ++i4) {
            const ScenarioConfig config = scenario_interferometer(2.0 * kPi * i3 / 16.0,
                                                                  2.0 * kPi * i4 / 16.0);
            const Network net = build_scenario_network(config);
            for (int k = 0; k < 64; ++k)
                record(pair_absorption_probability(
                    distribution_at(net, config.input, 2.0 * kPi * k / 64.0), "a", "b"));
            for (const auto& amps : random_inputs) {
                InputSpec custom;
                custom.kind = InputSpec::Kind::custom;
                custom.modes = {"1", "3"};
                custom.amplitudes = {amps[0], amps[1]};
                const auto dist =
                    joint_distribution(evolve(net, make_input(custom, net.registry())), net);
                record(pair_absorption_probability(dist, "a", "b"));
            }
        }
    }
    const double spread_single = hi - lo;

    // two-photon entangled input over its own phase grid, both evolution routes
    const ScenarioConfig config = scenario_interferometer();
    const Network net = build_scenario_network(config);
    InputSpec noon;
    noon.kind = InputSpec::Kind::noon;
    noon.modes = {"1", "3"};
    noon.photons = 2;
    lo = 1e300;
    hi = -1e300;
    double route_gap = 0.0;
    for (int k = 0; k < 64; ++k) {
        noon.phi = 2.0 * kPi * k / 64.0;
        const FockState input = make_input(noon, net.registry());
        const double sparse =
            pair_absorption_probability(joint_distribution(evolve(net, input), net), "a", "b");
        const double dense = pair_absorption_probability(
            joint_distribution(oracle_evolve_dense(net, input), net), "a", "b");
        record(sparse);
        record(dense);
        route_gap = std::max(route_gap, std::abs(sparse - dense));
    }
    return std::max({spread_single, hi - lo, route_gap});
}

// 5: outcome probabilities sum to 1 on random networks.
double conservation() {
    std::mt19937 rng(105);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Network net = testutil::random_network(rng);
        const int photons = testutil::uniform_int(rng, 1, 2);
        const FockState input = testutil::random_input(rng, net, photons);
        worst = std::max(worst, joint_distribution(evolve(net, input), net).residual());
    }
    return worst;
}

// 6: sparse substitution evolution matches the dense lifted-matrix route.
double oracle_equivalence() {
    std::mt19937 rng(106);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Network net = testutil::random_network(rng);
        const int photons = testutil::uniform_int(rng, 1, 2);
        const FockState input = testutil::random_input(rng, net, photons);
        worst = std::max(worst,
                         testutil::max_amplitude_diff(evolve(net, input),
                                                      oracle_evolve_dense(net, input)));
    }
    return worst;
}

// 7: phase search recovers full absorption and full transparency.
bool cpa_search(double* worst_phase, double* worst_value) {
    const CpaResult absorb =
        cpa_find(scenario_interferometer(), CpaObjective::total_absorption);
    const CpaResult transparent = cpa_find(scenario_single_bs(0.5, 0.5, kRoot2Inv),
                                           CpaObjective::total_transparency);
    *worst_phase = std::max(std::abs(absorb.phase - kPi), std::abs(transparent.phase));
    *worst_value = std::max(std::abs(absorb.value - 1.0), std::abs(transparent.value));
    return *worst_phase < 1e-6 && *worst_value < 1e-9;
}

// 8: state after the first element layer and the two phase shifters.
double first_layer_snapshot() {
    std::mt19937 rng(108);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        std::array<BsCoefficients, 4> coeffs;
        const LossyBeamSplitter ea = testutil::random_element(rng, "a");
        const LossyBeamSplitter eb = testutil::random_element(rng, "b");
        const LossyBeamSplitter ec = testutil::random_element(rng, "c");
        const LossyBeamSplitter ed = testutil::random_element(rng, "d");
        coeffs[0] = {ea.t(), ea.r(), ea.l()};
        coeffs[1] = {eb.t(), eb.r(), eb.l()};
        coeffs[2] = {ec.t(), ec.r(), ec.l()};
        coeffs[3] = {ed.t(), ed.r(), ed.l()};
        const double theta3 = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double theta4 = testutil::uniform(rng, 0.0, 2.0 * kPi);
        const double phi = testutil::uniform(rng, 0.0, 2.0 * kPi);

        ScenarioConfig config = scenario_interferometer(coeffs, theta3, theta4);
        config.input.phi = phi;
        const Network net = build_scenario_network(config);
        const FockState mid = evolve(net, make_input(config.input, net.registry()), 4);

        auto amp_at = [&](const std::string& label) {
            return mid.amplitude(
                OccupationVector::from_entries({{*net.registry()->find(label), 1}}));
        };
        auto check = [&](const std::string& label, Amplitude expected) {
            worst = std::max(worst, std::abs(amp_at(label) - expected));
        };

        const Amplitude arm1 = kRoot2Inv;
        const Amplitude arm3 = kRoot2Inv * std::polar(1.0, phi);
        check("1", ea.t() * arm1);
        check("2", ea.r() * arm1);
        check("env:a:1", ea.l() * arm1);
        check("3", eb.t() * std::polar(1.0, theta3) * arm3);
        check("4", eb.r() * std::polar(1.0, theta4) * arm3);
        const double gb = gram_overlap(eb);
        check("env:b:1", eb.l() * gb * arm3);
        if (net.env_modes("b").size() == 2)
            check("env:b:2", eb.l() * std::sqrt(1.0 - gb * gb) * arm3);
    }
    return worst;
}

} // namespace

int main() {
    try {
        double worst = single_element_law();
        report(1, "single-element detection and absorption law", worst < 1e-9, worst, 1e-9);

        worst = interferometer_law();
        report(2, "interferometer law and perfect absorption", worst < 1e-9, worst, 1e-9);

        bool structure_ok = false;
        worst = absorber_overlap_identity(&structure_ok);
        report(3, "dilated absorber overlap identity", structure_ok && worst < 1e-12, worst,
               1e-12);

        worst = first_layer_constancy();
        report(4, "first-layer pair absorption constancy", worst < 1e-10, worst, 1e-10);

        worst = conservation();
        report(5, "probability conservation on random networks", worst < 1e-10, worst, 1e-10);

        worst = oracle_equivalence();
        report(6, "sparse evolution matches the dense oracle", worst < 1e-10, worst, 1e-10);

        double worst_phase = 0.0, worst_value = 0.0;
        const bool cpa_ok = cpa_search(&worst_phase, &worst_value);
        report(7, "phase search finds absorption and transparency", cpa_ok,
               std::max(worst_phase, worst_value), 1e-6);

        worst = first_layer_snapshot();
        report(8, "first-layer state snapshot", worst < 1e-12, worst, 1e-12);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return failures == 0 ? 0 : 1;
}
