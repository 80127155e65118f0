#ifndef CPASIM_ELEMENTS_HPP
#define CPASIM_ELEMENTS_HPP

#include <string>
#include <vector>

#include "cpasim/fock.hpp"

namespace cpasim {

/// Absolute tolerance for element validation. The canned scenarios use exact
/// rationals and square roots, so nothing looser is needed.
inline constexpr double kElementTolerance = 1e-12;

/**
 * @brief Two-port optical element with real transmission t, reflection r and
 *        loss amplitude l, t^2 + r^2 + l^2 = 1.
 *
 * An absorbed photon leaves the element in internal state |f1> or |f2>
 * depending on its input port. The two absorber states are generally
 * non-orthogonal, with Gram overlap
 *
 *     g = <f1|f2> = -2 t r / l^2.
 *
 * Physicality requires |g| <= 1, i.e. |2tr| <= l^2; for l = 0 that forces
 * t r = 0 (a real lossless 2x2 symmetric matrix is unitary only as a
 * pass-through or swap).
 *
 * Construction validates all of the above and throws NormalizationError or
 * UnphysicalAbsorberError, with the element label in the message.
 */
class LossyBeamSplitter {
public:
    LossyBeamSplitter(double t, double r, double l, std::string label);

    double t() const { return t_; }
    double r() const { return r_; }
    double l() const { return l_; }
    const std::string& label() const { return label_; }

    bool has_absorber() const { return l_ != 0.0; }

    bool operator==(const LossyBeamSplitter& other) const {
        return t_ == other.t_ && r_ == other.r_ && l_ == other.l_ && label_ == other.label_;
    }

private:
    double t_, r_, l_;
    std::string label_;
};

/// new_lossy_bs of the element contract; identical to the validating constructor.
LossyBeamSplitter new_lossy_bs(double t, double r, double l, std::string label);

/// g = -2tr/l^2, clamped into [-1, 1] against roundoff at the physicality
/// boundary. Throws NoAbsorberError for l = 0.
double gram_overlap(const LossyBeamSplitter& bs);

/// e^{i theta} on one mode, identity elsewhere.
struct PhaseShifter {
    ModeId mode;
    double theta = 0.0;
};

ModeMap phase_map(const PhaseShifter& ps);

/**
 * @brief Isometric dilation of a lossy beam splitter onto fresh orthonormal
 *        environment modes.
 *
 * Columns over inputs (port1, port2), rows over (out1, out2, env1, env2):
 *
 *     out1: ( t ,  r )
 *     out2: ( r ,  t )
 *     env1: ( l ,  l g )
 *     env2: ( 0 ,  l sqrt(1 - g^2) )
 *
 * so a photon entering port1 feeds absorber vector f1 = env1 and one entering
 * port2 feeds f2 = g env1 + sqrt(1-g^2) env2, reproducing <f1|f2> = g with
 * orthonormal bookkeeping modes (lower-triangular factorization of the
 * absorber Gram matrix, f1 pinned to env1). The env2 row is omitted entirely
 * when |g| = 1 within tolerance, and both environment rows when l = 0.
 * Output optical modes coincide with the port modes (transmission keeps the
 * mode, reflection swaps it).
 */
class DilationIsometry {
public:
    DilationIsometry(std::string element, ModeId port1, ModeId port2,
                     std::vector<ModeId> environment_modes, ModeMap map)
        : element_(std::move(element)), port1_(port1), port2_(port2),
          environment_modes_(std::move(environment_modes)), map_(std::move(map)) {}

    const std::string& element() const { return element_; }
    ModeId port1() const { return port1_; }
    ModeId port2() const { return port2_; }
    std::span<const ModeId> environment_modes() const { return environment_modes_; }
    const ModeMap& map() const { return map_; }

private:
    std::string element_;
    ModeId port1_, port2_;
    std::vector<ModeId> environment_modes_;
    ModeMap map_;
};

/// Builds the dilation, allocating environment modes in `registry` (labels
/// "env:<element>:1", "env:<element>:2"). Ports must be distinct registered
/// optical modes.
DilationIsometry dilate(const LossyBeamSplitter& bs, ModeId port1, ModeId port2,
                        ModeRegistry& registry);

} // namespace cpasim

#endif
