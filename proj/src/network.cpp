#include "cpasim/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cpasim/errors.hpp"

namespace cpasim {

namespace {

/// Composes the single-photon action of `stages` and checks column
/// orthonormality over all modes allocated in `registry`.
void verify_composite_isometry(const std::vector<Network::Stage>& stages,
                               const ModeRegistry& registry,
                               std::span<const ModeId> optical_modes) {
    const std::size_t n = registry.size();
    // column-major: composite[input][mode index]
    std::vector<std::vector<Amplitude>> composite;
    for (ModeId m : optical_modes) {
        std::vector<Amplitude> col(n, Amplitude{0.0, 0.0});
        col[m.index()] = 1.0;
        composite.push_back(std::move(col));
    }
    for (const auto& stage : stages) {
        for (auto& col : composite) {
            std::vector<Amplitude> next(n, Amplitude{0.0, 0.0});
            for (std::size_t i = 0; i < n; ++i) {
                if (col[i] == Amplitude{0.0, 0.0}) continue;
                const ModeMap::Column* image = stage.map.column(ModeId(static_cast<std::uint32_t>(i)));
                if (image == nullptr) {
                    next[i] += col[i];
                    continue;
                }
                for (const auto& [out, c] : *image) next[out.index()] += col[i] * c;
            }
            col = std::move(next);
        }
    }
    constexpr double tol = 1e-11;
    for (std::size_t p = 0; p < composite.size(); ++p) {
        for (std::size_t q = p; q < composite.size(); ++q) {
            Amplitude dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += std::conj(composite[p][i]) * composite[q][i];
            const Amplitude expected = (p == q) ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            if (std::abs(dot - expected) > tol)
                throw InvariantError("network: composed single-photon map is not an isometry");
        }
    }
}

} // namespace

Network Network::build(std::vector<std::string> optical_mode_labels,
                       std::vector<StageSpec> stage_specs, NetworkOptions options) {
    if (optical_mode_labels.empty())
        throw ConfigError("network: at least one optical mode is required");
    if (options.photon_cap < 1)
        throw ConfigError("network: photon cap must be at least 1");

    Network net;
    net.photon_cap_ = options.photon_cap;
    net.registry_ = std::make_shared<ModeRegistry>();
    for (auto& label : optical_mode_labels)
        net.detector_modes_.push_back(net.registry_->add_optical(std::move(label)));

    auto resolve_optical = [&](const std::string& label, const char* role) {
        auto mode = net.registry_->find(label);
        if (!mode || !net.registry_->is_optical(*mode))
            throw ConfigError(std::string("network: ") + role + " '" + label +
                              "' is not a declared optical mode");
        return *mode;
    };

    // Label validation precedes dilation: a duplicate element label would
    // otherwise surface as an env-mode registry collision.
    std::set<std::string> stage_labels;
    for (const auto& spec : stage_specs) {
        const std::string& label = std::holds_alternative<BeamSplitterStageSpec>(spec)
                                       ? std::get<BeamSplitterStageSpec>(spec).element.label()
                                       : std::get<PhaseStageSpec>(spec).label;
        if (label.empty()) throw ConfigError("network: stage labels must be nonempty");
        if (!stage_labels.insert(label).second)
            throw ConfigError("network: duplicate stage label '" + label + "'");
    }

    for (auto& spec : stage_specs) {
        Stage stage;
        if (auto* bs = std::get_if<BeamSplitterStageSpec>(&spec)) {
            const ModeId p1 = resolve_optical(bs->port1, "port");
            const ModeId p2 = resolve_optical(bs->port2, "port");
            if (p1 == p2)
                throw ConfigError("network: element '" + bs->element.label() +
                                  "' binds the same mode to both ports");
            DilationIsometry dil = dilate(bs->element, p1, p2, *net.registry_);
            stage.kind = Stage::Kind::beam_splitter;
            stage.label = bs->element.label();
            stage.map = dil.map();
            stage.env_modes.assign(dil.environment_modes().begin(),
                                   dil.environment_modes().end());
            net.element_labels_.push_back(stage.label);
            net.env_by_element_.emplace_back(stage.label, stage.env_modes);
        } else {
            auto& ph = std::get<PhaseStageSpec>(spec);
            const ModeId m = resolve_optical(ph.mode, "phase mode");
            if (!std::isfinite(ph.theta))
                throw ConfigError("network: phase '" + ph.label + "' has a non-finite angle");
            stage.kind = Stage::Kind::phase;
            stage.label = ph.label;
            stage.map = phase_map(PhaseShifter{m, ph.theta});
        }
        net.stages_.push_back(std::move(stage));
    }

    net.env_owner_by_index_.assign(net.registry_->size(), std::string{});
    for (const auto& [element, modes] : net.env_by_element_)
        for (ModeId m : modes) net.env_owner_by_index_[m.index()] = element;

    verify_composite_isometry(net.stages_, *net.registry_, net.detector_modes_);
    return net;
}

bool Network::is_detector(ModeId m) const {
    return registry_->contains(m) && registry_->is_optical(m);
}

bool Network::has_element(std::string_view label) const {
    return std::find(element_labels_.begin(), element_labels_.end(), label) !=
           element_labels_.end();
}

std::span<const ModeId> Network::env_modes(std::string_view element) const {
    for (const auto& [label, modes] : env_by_element_)
        if (label == element) return modes;
    throw Error("network: unknown element '" + std::string(element) + "'");
}

std::optional<std::string> Network::element_of(ModeId mode) const {
    if (!registry_->contains(mode) || mode.index() >= env_owner_by_index_.size())
        return std::nullopt;
    const std::string& owner = env_owner_by_index_[mode.index()];
    if (owner.empty()) return std::nullopt;
    return owner;
}

FockState evolve(const Network& net, const FockState& input, std::size_t num_stages) {
    if (input.registry().get() != net.registry().get())
        throw Error("evolve: input state does not live in the network's registry");
    for (const auto& [occ, amp] : input.terms())
        for (const auto& [mode, count] : occ.entries())
            if (!net.registry()->is_optical(mode))
                throw Error("evolve: input occupies a non-optical mode");
    if (input.max_total_count() > static_cast<std::uint32_t>(net.photon_cap()))
        throw ConfigError("evolve: input exceeds the photon cap of " +
                          std::to_string(net.photon_cap()));

    const std::size_t limit = std::min(num_stages, net.stages().size());
    FockState state = input;
    for (std::size_t i = 0; i < limit; ++i)
        state = apply_mode_map(state, net.stages()[i].map);
    return prune(state);
}

FockState make_input(const InputSpec& spec,
                     const std::shared_ptr<const ModeRegistry>& registry) {
    auto resolve = [&](const std::string& label) {
        auto mode = registry->find(label);
        if (!mode || !registry->is_optical(*mode))
            throw ConfigError("input: '" + label + "' is not a declared optical mode");
        return *mode;
    };

    switch (spec.kind) {
    case InputSpec::Kind::superposition: {
        if (spec.modes.size() != 2)
            throw ConfigError("input: superposition requires exactly 2 modes");
        const ModeId m0 = resolve(spec.modes[0]);
        const ModeId m1 = resolve(spec.modes[1]);
        if (m0 == m1) throw ConfigError("input: superposition modes must be distinct");
        FockState state(registry);
        const double w = 1.0 / std::sqrt(2.0);
        state.add_term(OccupationVector::from_entries({{m0, 1}}), w);
        state.add_term(OccupationVector::from_entries({{m1, 1}}), w * std::polar(1.0, spec.phi));
        return state;
    }
    case InputSpec::Kind::noon: {
        if (spec.modes.size() != 2)
            throw ConfigError("input: noon requires exactly 2 modes");
        if (spec.photons < 1)
            throw ConfigError("input: noon requires at least 1 photon");
        const ModeId m0 = resolve(spec.modes[0]);
        const ModeId m1 = resolve(spec.modes[1]);
        if (m0 == m1) throw ConfigError("input: noon modes must be distinct");
        const auto n = static_cast<std::uint32_t>(spec.photons);
        FockState state(registry);
        const double w = 1.0 / std::sqrt(2.0);
        state.add_term(OccupationVector::from_entries({{m0, n}}), w);
        state.add_term(OccupationVector::from_entries({{m1, n}}), w * std::polar(1.0, spec.phi));
        return state;
    }
    case InputSpec::Kind::custom: {
        if (spec.modes.empty())
            throw ConfigError("input: custom requires at least 1 mode");
        if (spec.amplitudes.size() != spec.modes.size())
            throw ConfigError("input: custom amplitude count must match mode count");
        FockState state(registry);
        std::set<std::uint32_t> seen;
        for (std::size_t i = 0; i < spec.modes.size(); ++i) {
            const ModeId m = resolve(spec.modes[i]);
            if (!seen.insert(m.index()).second)
                throw ConfigError("input: custom modes must be distinct");
            state.add_term(OccupationVector::from_entries({{m, 1}}), spec.amplitudes[i]);
        }
        if (std::abs(state.squared_norm() - 1.0) > 1e-12)
            throw NormalizationError("input: custom amplitudes are not normalized");
        return state;
    }
    }
    throw ConfigError("input: unknown kind");
}

} // namespace cpasim
