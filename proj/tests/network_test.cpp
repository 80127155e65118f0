#include <doctest.h>

#include <numbers>

#include "cpasim/network.hpp"
#include "cpasim/scenario.hpp"

#include "testutil.hpp"

using namespace cpasim;

namespace {

const double kRoot2Inv = 1.0 / std::sqrt(2.0);

Amplitude amp_at(const FockState& state, const std::string& label) {
    const ModeId m = *state.registry()->find(label);
    return state.amplitude(OccupationVector::from_entries({{m, 1}}));
}

} // namespace

TEST_CASE("network build validation") {
    const LossyBeamSplitter bs(0.5, 0.5, kRoot2Inv, "a");

    CHECK_THROWS_AS(Network::build({}, {}), ConfigError);
    CHECK_THROWS_AS(Network::build({"1", "2"}, {BeamSplitterStageSpec{bs, "1", "9"}}),
                    ConfigError);
    CHECK_THROWS_AS(Network::build({"1", "2"}, {BeamSplitterStageSpec{bs, "1", "1"}}),
                    ConfigError);
    CHECK_THROWS_AS(Network::build({"1", "2"},
                                   {BeamSplitterStageSpec{bs, "1", "2"},
                                    BeamSplitterStageSpec{bs, "2", "1"}}),
                    ConfigError); // duplicate stage label
    CHECK_THROWS_AS(Network::build({"1", "2"}, {PhaseStageSpec{"p", "env:a:1", 0.1}}),
                    ConfigError);
    CHECK_THROWS_AS(Network::build({"1", "2"}, {}, NetworkOptions{0}), ConfigError);

    const Network net = Network::build({"1", "2"}, {BeamSplitterStageSpec{bs, "1", "2"}});
    CHECK(net.registry()->size() == 3);
    CHECK(net.detector_modes().size() == 2);
    CHECK(net.element_labels() == std::vector<std::string>{"a"});
    CHECK(net.env_modes("a").size() == 1);
    CHECK(net.element_of(net.env_modes("a")[0]) == "a");
    CHECK(!net.element_of(net.detector_modes()[0]).has_value());
    CHECK_THROWS_AS(net.env_modes("zz"), Error);
}

TEST_CASE("interferometer dilates to eight modes") {
    const Network net = build_scenario_network(scenario_interferometer());
    CHECK(net.registry()->size() == 8);
    CHECK(net.detector_modes().size() == 4);
    CHECK(net.element_labels() == std::vector<std::string>{"a", "b", "c", "d"});
    for (const char* e : {"a", "b", "c", "d"}) CHECK(net.env_modes(e).size() == 1);
}

TEST_CASE("make_input variants") {
    const Network net = build_scenario_network(scenario_interferometer());
    auto reg = net.registry();

    InputSpec sup;
    sup.kind = InputSpec::Kind::superposition;
    sup.modes = {"1", "3"};
    sup.phi = 0.4;
    const FockState s = make_input(sup, reg);
    CHECK(std::abs(s.norm() - 1.0) < 1e-14);
    CHECK(std::abs(amp_at(s, "1") - kRoot2Inv) < 1e-14);
    CHECK(std::abs(amp_at(s, "3") - kRoot2Inv * std::polar(1.0, 0.4)) < 1e-14);

    InputSpec noon;
    noon.kind = InputSpec::Kind::noon;
    noon.modes = {"1", "3"};
    noon.photons = 2;
    noon.phi = 0.9;
    const FockState n = make_input(noon, reg);
    CHECK(std::abs(n.norm() - 1.0) < 1e-14);
    const ModeId m1 = *reg->find("1");
    CHECK(std::abs(n.amplitude(OccupationVector::from_entries({{m1, 2}})) - kRoot2Inv) < 1e-14);

    InputSpec custom;
    custom.kind = InputSpec::Kind::custom;
    custom.modes = {"1", "3"};
    custom.amplitudes = {Amplitude{0.6, 0.0}, Amplitude{0.0, 0.8}};
    CHECK(std::abs(make_input(custom, reg).norm() - 1.0) < 1e-14);

    custom.amplitudes = {Amplitude{0.6, 0.0}, Amplitude{0.0, 0.7}};
    CHECK_THROWS_AS(make_input(custom, reg), NormalizationError);

    sup.modes = {"1", "1"};
    CHECK_THROWS_AS(make_input(sup, reg), ConfigError);
    sup.modes = {"1", "nope"};
    CHECK_THROWS_AS(make_input(sup, reg), ConfigError);
    sup.modes = {"1", "2", "3"};
    CHECK_THROWS_AS(make_input(sup, reg), ConfigError);
}

TEST_CASE("evolve guards") {
    const Network net = build_scenario_network(scenario_interferometer(), 2);
    auto reg = net.registry();

    CHECK(evolve(net, vacuum(reg)) == vacuum(reg));

    InputSpec noon;
    noon.kind = InputSpec::Kind::noon;
    noon.modes = {"1", "3"};
    noon.photons = 3;
    CHECK_THROWS_AS(evolve(net, make_input(noon, reg)), ConfigError);

    FockState env_occupied(reg);
    env_occupied.add_term(OccupationVector::from_entries({{*reg->find("env:a:1"), 1}}), 1.0);
    CHECK_THROWS_AS(evolve(net, env_occupied), Error);

    const Network other = build_scenario_network(scenario_interferometer());
    CHECK_THROWS_AS(evolve(net, vacuum(other.registry())), Error);
}

TEST_CASE("intermediate state matches the first-layer analytic amplitudes") {
    std::mt19937 rng(431);
    for (int trial = 0; trial < 20; ++trial) {
        const LossyBeamSplitter ea = testutil::random_element(rng, "a");
        const LossyBeamSplitter eb = testutil::random_element(rng, "b");
        const double l = kRoot2Inv;
        const std::array<BsCoefficients, 4> coeffs = {
            BsCoefficients{ea.t(), ea.r(), ea.l()},
            BsCoefficients{eb.t(), eb.r(), eb.l()},
            BsCoefficients{0.5, -0.5, l},
            BsCoefficients{0.5, -0.5, l},
        };
        const double theta3 = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double theta4 = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double phi = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);

        ScenarioConfig config = scenario_interferometer(coeffs, theta3, theta4);
        config.input.phi = phi;
        const Network net = build_scenario_network(config);
        const FockState input = make_input(config.input, net.registry());

        // stages a, b, theta3, theta4 = the first four
        const FockState mid = evolve(net, input, 4);

        const Amplitude arm1 = kRoot2Inv;
        const Amplitude arm3 = kRoot2Inv * std::polar(1.0, phi);
        CHECK(std::abs(amp_at(mid, "1") - ea.t() * arm1) < 1e-12);
        CHECK(std::abs(amp_at(mid, "2") - ea.r() * arm1) < 1e-12);
        CHECK(std::abs(amp_at(mid, "env:a:1") - ea.l() * arm1) < 1e-12);
        CHECK(std::abs(amp_at(mid, "3") - eb.t() * std::polar(1.0, theta3) * arm3) < 1e-12);
        CHECK(std::abs(amp_at(mid, "4") - eb.r() * std::polar(1.0, theta4) * arm3) < 1e-12);
        const double gb = gram_overlap(eb);
        CHECK(std::abs(amp_at(mid, "env:b:1") - eb.l() * gb * arm3) < 1e-12);
        if (net.env_modes("b").size() == 2)
            CHECK(std::abs(amp_at(mid, "env:b:2") -
                           eb.l() * std::sqrt(1.0 - gb * gb) * arm3) < 1e-12);
    }
}

TEST_CASE("full evolution reproduces the output-mode amplitude structure") {
    std::mt19937 rng(432);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<BsCoefficients, 4> coeffs;
        std::array<LossyBeamSplitter, 4> elems = {
            testutil::random_element(rng, "a"), testutil::random_element(rng, "b"),
            testutil::random_element(rng, "c"), testutil::random_element(rng, "d")};
        for (int i = 0; i < 4; ++i)
            coeffs[i] = BsCoefficients{elems[i].t(), elems[i].r(), elems[i].l()};
        const double theta3 = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double theta4 = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);
        const double phi = testutil::uniform(rng, 0.0, 2.0 * std::numbers::pi);

        ScenarioConfig config = scenario_interferometer(coeffs, theta3, theta4);
        config.input.phi = phi;
        const Network net = build_scenario_network(config);
        const FockState out = evolve(net, make_input(config.input, net.registry()));

        const Amplitude e3 = std::polar(1.0, phi + theta3);
        const Amplitude e4 = std::polar(1.0, phi + theta4);
        const double ta = elems[0].t(), ra = elems[0].r();
        const double tb = elems[1].t(), rb = elems[1].r();
        const double tc = elems[2].t(), rc = elems[2].r();
        const double td = elems[3].t(), rd = elems[3].r();
        // c couples (2,3) with port1 = 2; d couples (4,1) with port1 = 4.
        CHECK(std::abs(amp_at(out, "1") - (ta * td + rb * rd * e4) * kRoot2Inv) < 1e-12);
        CHECK(std::abs(amp_at(out, "2") - (ra * tc + tb * rc * e3) * kRoot2Inv) < 1e-12);
        CHECK(std::abs(amp_at(out, "3") - (ra * rc + tb * tc * e3) * kRoot2Inv) < 1e-12);
        CHECK(std::abs(amp_at(out, "4") - (ta * rd + rb * td * e4) * kRoot2Inv) < 1e-12);
    }
}

TEST_CASE("disjoint stages commute") {
    std::mt19937 rng(433);
    for (int trial = 0; trial < 20; ++trial) {
        const LossyBeamSplitter ea = testutil::random_element(rng, "A");
        const LossyBeamSplitter eb = testutil::random_element(rng, "B");
        const std::vector<std::string> modes = {"w", "x", "y", "z"};
        const Network ab = Network::build(modes, {BeamSplitterStageSpec{ea, "w", "x"},
                                                  BeamSplitterStageSpec{eb, "y", "z"}});
        const Network ba = Network::build(modes, {BeamSplitterStageSpec{eb, "y", "z"},
                                                  BeamSplitterStageSpec{ea, "w", "x"}});

        const FockState in_ab = testutil::random_input(rng, ab, 2);
        // rebuild the same input in ba's registry by label
        FockState in_ba(ba.registry());
        for (const auto& [occ, amp] : in_ab.terms()) {
            std::vector<OccupationVector::Entry> entries;
            for (const auto& [mode, count] : occ.entries())
                entries.emplace_back(*ba.registry()->find(ab.registry()->label(mode)), count);
            in_ba.add_term(OccupationVector::from_entries(std::move(entries)), amp);
        }

        const FockState out_ab = evolve(ab, in_ab);
        const FockState out_ba = evolve(ba, in_ba);
        double worst = 0.0;
        for (const auto& [occ, amp] : out_ab.terms()) {
            std::vector<OccupationVector::Entry> entries;
            for (const auto& [mode, count] : occ.entries())
                entries.emplace_back(*ba.registry()->find(ab.registry()->label(mode)), count);
            worst = std::max(worst,
                             std::abs(amp - out_ba.amplitude(OccupationVector::from_entries(
                                                std::move(entries)))));
        }
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("random networks preserve the norm end to end") {
    std::mt19937 rng(434);
    for (int trial = 0; trial < 100; ++trial) {
        const Network net = testutil::random_network(rng);
        const int photons = 1 + (trial % 2);
        const FockState out = evolve(net, testutil::random_input(rng, net, photons));
        CHECK(std::abs(out.norm() - 1.0) < 1e-11);
    }
}
