#include "cpasim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "cpasim/errors.hpp"

namespace cpasim {

OutcomeDistribution::OutcomeDistribution(std::vector<std::pair<OutcomePattern, double>> entries,
                                         std::vector<ModeId> detector_modes,
                                         std::vector<std::string> element_labels)
    : entries_(std::move(entries)), detector_modes_(std::move(detector_modes)),
      element_labels_(std::move(element_labels)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double total = 0.0;
    for (const auto& [pattern, p] : entries_) {
        if (p < 0.0) throw InvariantError("distribution: negative probability");
        total += p;
    }
    residual_ = std::abs(1.0 - total);
}

double OutcomeDistribution::probability(const OutcomePattern& pattern) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), pattern,
                               [](const auto& e, const OutcomePattern& p) { return e.first < p; });
    return (it != entries_.end() && it->first == pattern) ? it->second : 0.0;
}

OutcomeDistribution joint_distribution(const FockState& state, const Network& net) {
    if (state.registry().get() != net.registry().get())
        throw Error("joint_distribution: state does not live in the network's registry");

    std::map<OutcomePattern, double> probs;
    for (const auto& [occ, amp] : state.terms()) {
        OutcomePattern pattern;
        std::map<std::string, std::uint32_t> absorbed;
        for (const auto& [mode, count] : occ.entries()) {
            if (net.registry()->is_optical(mode)) {
                pattern.detections.emplace_back(mode, count);
            } else {
                auto owner = net.element_of(mode);
                if (!owner)
                    throw Error("joint_distribution: environment mode without an owner");
                absorbed[*owner] += count;
            }
        }
        pattern.absorptions.assign(absorbed.begin(), absorbed.end());
        std::sort(pattern.detections.begin(), pattern.detections.end());
        probs[pattern] += std::norm(amp);
    }

    std::vector<std::pair<OutcomePattern, double>> entries(probs.begin(), probs.end());
    auto detectors = net.detector_modes();
    return OutcomeDistribution(std::move(entries),
                               {detectors.begin(), detectors.end()},
                               net.element_labels());
}

double detection_probability(const OutcomeDistribution& dist, ModeId mode) {
    auto detectors = dist.detector_modes();
    if (std::find(detectors.begin(), detectors.end(), mode) == detectors.end())
        throw Error("detection_probability: not a detector mode");
    OutcomePattern pattern;
    pattern.detections.emplace_back(mode, 1);
    return dist.probability(pattern);
}

namespace {

std::uint32_t absorbed_count(const OutcomePattern& pattern, std::string_view element) {
    for (const auto& [label, count] : pattern.absorptions)
        if (label == element) return count;
    return 0;
}

void require_element(const OutcomeDistribution& dist, std::string_view element) {
    const auto& labels = dist.element_labels();
    if (std::find(labels.begin(), labels.end(), element) == labels.end())
        throw Error("analysis: unknown element '" + std::string(element) + "'");
}

} // namespace

double absorption_probability(const OutcomeDistribution& dist, std::string_view element) {
    require_element(dist, element);
    double p = 0.0;
    for (const auto& [pattern, prob] : dist.entries())
        if (absorbed_count(pattern, element) > 0) p += prob;
    return p;
}

double pair_absorption_probability(const OutcomeDistribution& dist,
                                   std::string_view elem1, std::string_view elem2) {
    require_element(dist, elem1);
    require_element(dist, elem2);
    double p = 0.0;
    for (const auto& [pattern, prob] : dist.entries())
        if (absorbed_count(pattern, elem1) > 0 || absorbed_count(pattern, elem2) > 0) p += prob;
    return p;
}

double conservation_residual(const OutcomeDistribution& dist) { return dist.residual(); }

ScanResult pair_absorption_scan(std::size_t num_points,
                                const std::function<OutcomeDistribution(std::size_t)>& distribution_at,
                                std::string_view elem1, std::string_view elem2) {
    if (num_points == 0) throw Error("pair_absorption_scan: at least one point required");
    ScanResult result{};
    for (std::size_t i = 0; i < num_points; ++i) {
        const double p = pair_absorption_probability(distribution_at(i), elem1, elem2);
        if (i == 0) {
            result.max_value = result.min_value = p;
        } else {
            result.max_value = std::max(result.max_value, p);
            result.min_value = std::min(result.min_value, p);
        }
    }
    result.spread = result.max_value - result.min_value;
    return result;
}

double total_absorption_probability(const OutcomeDistribution& dist) {
    double p = 0.0;
    for (const auto& [pattern, prob] : dist.entries())
        if (pattern.detections.empty() && !pattern.absorptions.empty()) p += prob;
    return p;
}

} // namespace cpasim
