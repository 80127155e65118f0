#include "cpasim/elements.hpp"

#include <algorithm>
#include <cmath>

#include "cpasim/errors.hpp"

namespace cpasim {

LossyBeamSplitter::LossyBeamSplitter(double t, double r, double l, std::string label)
    : t_(t), r_(r), l_(l), label_(std::move(label)) {
    if (!std::isfinite(t) || !std::isfinite(r) || !std::isfinite(l))
        throw NormalizationError("element '" + label_ + "': coefficients must be finite");
    if (l < 0.0)
        throw NormalizationError("element '" + label_ + "': loss amplitude must be nonnegative");
    const double sum = t * t + r * r + l * l;
    if (std::abs(sum - 1.0) > kElementTolerance)
        throw NormalizationError("element '" + label_ + "': t^2 + r^2 + l^2 = " +
                                 std::to_string(sum) + ", expected 1");
    const double overlap_excess = std::abs(2.0 * t * r) - l * l;
    if (overlap_excess > kElementTolerance)
        throw UnphysicalAbsorberError("element '" + label_ +
                                      "': |2 t r| exceeds l^2 by " +
                                      std::to_string(overlap_excess) +
                                      ", absorber overlap would leave [-1, 1]");
}

LossyBeamSplitter new_lossy_bs(double t, double r, double l, std::string label) {
    return LossyBeamSplitter(t, r, l, std::move(label));
}

double gram_overlap(const LossyBeamSplitter& bs) {
    if (!bs.has_absorber())
        throw NoAbsorberError("element '" + bs.label() + "': no absorber for l = 0");
    const double g = -2.0 * bs.t() * bs.r() / (bs.l() * bs.l());
    return std::clamp(g, -1.0, 1.0);
}

ModeMap phase_map(const PhaseShifter& ps) {
    ModeMap map;
    map.set_column(ps.mode, {{ps.mode, std::polar(1.0, ps.theta)}});
    return map;
}

DilationIsometry dilate(const LossyBeamSplitter& bs, ModeId port1, ModeId port2,
                        ModeRegistry& registry) {
    if (!registry.contains(port1) || !registry.contains(port2))
        throw Error("dilate: port not registered");
    if (port1 == port2)
        throw Error("dilate: ports must be distinct");
    if (!registry.is_optical(port1) || !registry.is_optical(port2))
        throw Error("dilate: ports must be optical modes");

    const double t = bs.t();
    const double r = bs.r();
    const double l = bs.l();

    ModeMap map;
    std::vector<ModeId> env;
    // Exact-zero coefficients are dropped so occupation vectors stay minimal.
    auto set_column = [&map](ModeId input, ModeMap::Column column) {
        std::erase_if(column, [](const auto& e) { return e.second == Amplitude{0.0, 0.0}; });
        map.set_column(input, std::move(column));
    };

    if (!bs.has_absorber()) {
        set_column(port1, {{port1, t}, {port2, r}});
        set_column(port2, {{port1, r}, {port2, t}});
        return DilationIsometry(bs.label(), port1, port2, std::move(env), std::move(map));
    }

    const double g = gram_overlap(bs);
    const double residual = std::sqrt(std::max(0.0, 1.0 - g * g));
    const bool degenerate = std::abs(std::abs(g) - 1.0) <= kElementTolerance;

    const ModeId env1 = registry.add_environment("env:" + bs.label() + ":1");
    env.push_back(env1);

    ModeMap::Column col1 = {{port1, t}, {port2, r}, {env1, l}};
    ModeMap::Column col2 = {{port1, r}, {port2, t}, {env1, l * g}};
    if (!degenerate) {
        const ModeId env2 = registry.add_environment("env:" + bs.label() + ":2");
        env.push_back(env2);
        col2.emplace_back(env2, l * residual);
    }
    set_column(port1, std::move(col1));
    set_column(port2, std::move(col2));
    return DilationIsometry(bs.label(), port1, port2, std::move(env), std::move(map));
}

} // namespace cpasim
