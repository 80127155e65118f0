#ifndef CPASIM_NETWORK_HPP
#define CPASIM_NETWORK_HPP

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cpasim/elements.hpp"

namespace cpasim {

/// A lossy beam splitter bound to two optical modes by label. port1/port2
/// fix which input feeds absorber f1 vs f2; the binding is explicit because
/// the element layer makes absorber labels port-conditional.
struct BeamSplitterStageSpec {
    LossyBeamSplitter element;
    std::string port1;
    std::string port2;

    bool operator==(const BeamSplitterStageSpec&) const = default;
};

struct PhaseStageSpec {
    std::string label;
    std::string mode;
    double theta = 0.0;

    bool operator==(const PhaseStageSpec&) const = default;
};

using StageSpec = std::variant<BeamSplitterStageSpec, PhaseStageSpec>;

struct NetworkOptions {
    /// Largest total photon number evolve() accepts.
    int photon_cap = 4;
};

/**
 * Ordered sequence of dilated elements and phase shifters over a shared mode
 * registry. Building a network validates every binding, allocates each
 * element's environment modes in stage order (write-once by construction:
 * stages may only bind optical modes), and verifies that the composed
 * single-photon map is an isometry. A built Network is immutable and safe to
 * share across threads.
 */
class Network {
public:
    struct Stage {
        enum class Kind { beam_splitter, phase };
        Kind kind;
        std::string label;
        ModeMap map;
        std::vector<ModeId> env_modes; // empty for phase stages and lossless elements
    };

    static Network build(std::vector<std::string> optical_mode_labels,
                         std::vector<StageSpec> stages, NetworkOptions options = {});

    std::shared_ptr<const ModeRegistry> registry() const { return registry_; }
    std::span<const Stage> stages() const { return stages_; }

    /// Every optical mode is a detector mode, in declaration order.
    std::span<const ModeId> detector_modes() const { return detector_modes_; }
    bool is_detector(ModeId m) const;

    /// Beam-splitter stage labels in stage order (lossless ones included;
    /// their absorption probability is identically 0).
    const std::vector<std::string>& element_labels() const { return element_labels_; }
    bool has_element(std::string_view label) const;
    std::span<const ModeId> env_modes(std::string_view element) const;

    /// Owning element of an environment mode.
    std::optional<std::string> element_of(ModeId mode) const;

    int photon_cap() const { return photon_cap_; }

private:
    Network() = default;

    std::shared_ptr<ModeRegistry> registry_;
    std::vector<Stage> stages_;
    std::vector<ModeId> detector_modes_;
    std::vector<std::string> element_labels_;
    std::vector<std::pair<std::string, std::vector<ModeId>>> env_by_element_;
    std::vector<std::string> env_owner_by_index_; // mode index -> element label ("" for optical)
    int photon_cap_ = 4;
};

inline constexpr std::size_t kAllStages = std::numeric_limits<std::size_t>::max();

/// Evolves `input` through the first `num_stages` stages (all by default):
/// sequential creation-operator substitution, then default pruning. Input
/// must live in the network's registry, occupy optical modes only, and stay
/// within the photon cap.
FockState evolve(const Network& net, const FockState& input,
                 std::size_t num_stages = kAllStages);

/**
 * Input state builder.
 *   superposition: (|1 at m0> + e^{i phi} |1 at m1>)/sqrt(2), exactly 2 modes.
 *   noon:          (|N,0> + e^{i phi} |0,N>)/sqrt(2) on 2 modes, N = photons.
 *   custom:        single photon with explicit complex amplitudes over the
 *                  listed modes; must already be normalized within 1e-12.
 */
struct InputSpec {
    enum class Kind { superposition, noon, custom };

    Kind kind = Kind::superposition;
    std::vector<std::string> modes;
    double phi = 0.0;
    int photons = 1;
    std::vector<Amplitude> amplitudes; // custom only

    bool operator==(const InputSpec&) const = default;
};

FockState make_input(const InputSpec& spec, const std::shared_ptr<const ModeRegistry>& registry);

} // namespace cpasim

#endif
