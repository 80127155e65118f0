#ifndef CPASIM_ANALYSIS_HPP
#define CPASIM_ANALYSIS_HPP

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cpasim/network.hpp"

namespace cpasim {

/// Default absolute tolerance for probability comparisons.
inline constexpr double kAnalysisTolerance = 1e-11;

/**
 * One joint measurement outcome: photon counts at detector modes plus
 * absorbed counts per element. An element's internal environment modes are
 * summed together; the element, not its bookkeeping modes, is the absorber.
 * Zero counts are omitted, so the all-vacuum outcome is the empty pattern.
 */
struct OutcomePattern {
    std::vector<std::pair<ModeId, std::uint32_t>> detections;        // sorted by mode
    std::vector<std::pair<std::string, std::uint32_t>> absorptions;  // sorted by label

    bool operator==(const OutcomePattern&) const = default;
    auto operator<=>(const OutcomePattern&) const = default;
};

/// Joint outcome probabilities for one evolved state, with the completeness
/// residual |1 - sum|. Carries the detector modes and element labels of the
/// network it came from so lookups can be validated.
class OutcomeDistribution {
public:
    OutcomeDistribution(std::vector<std::pair<OutcomePattern, double>> entries,
                        std::vector<ModeId> detector_modes,
                        std::vector<std::string> element_labels);

    std::span<const std::pair<OutcomePattern, double>> entries() const { return entries_; }
    double residual() const { return residual_; }
    double probability(const OutcomePattern& pattern) const; // 0 if absent

    std::span<const ModeId> detector_modes() const { return detector_modes_; }
    const std::vector<std::string>& element_labels() const { return element_labels_; }

private:
    std::vector<std::pair<OutcomePattern, double>> entries_; // sorted by pattern
    std::vector<ModeId> detector_modes_;
    std::vector<std::string> element_labels_;
    double residual_ = 0.0;
};

/// Bins each squared amplitude of `state` by (detector counts, per-element
/// absorbed counts). `state` must live in the network's registry.
OutcomeDistribution joint_distribution(const FockState& state, const Network& net);

/// Probability of the exclusive event "exactly one photon at `mode`, nothing
/// anywhere else". Equals P_j for single-photon inputs. Throws on a
/// non-detector mode.
double detection_probability(const OutcomeDistribution& dist, ModeId mode);

/// Probability that `element` holds at least one excitation, any pattern
/// elsewhere.
double absorption_probability(const OutcomeDistribution& dist, std::string_view element);

/// Probability of at least one excitation at either element.
double pair_absorption_probability(const OutcomeDistribution& dist,
                                   std::string_view elem1, std::string_view elem2);

/// |1 - sum of all joint probabilities|.
double conservation_residual(const OutcomeDistribution& dist);

struct ScanResult {
    double max_value;
    double min_value;
    double spread; // max - min
};

/// Evaluates P(absorption at elem1 or elem2) over `num_points` grid points
/// (the callback maps point index to a distribution) and reports the extrema.
/// Deterministic sequential reduction.
ScanResult pair_absorption_scan(std::size_t num_points,
                                const std::function<OutcomeDistribution(std::size_t)>& distribution_at,
                                std::string_view elem1, std::string_view elem2);

/// Probability that every photon is absorbed (no detector holds a photon and
/// at least one element does). The CPA objective.
double total_absorption_probability(const OutcomeDistribution& dist);

} // namespace cpasim

#endif
