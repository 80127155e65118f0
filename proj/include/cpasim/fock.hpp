#ifndef CPASIM_FOCK_HPP
#define CPASIM_FOCK_HPP

#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cpasim/modes.hpp"

namespace cpasim {

using Amplitude = std::complex<double>;

/// Amplitudes with modulus below this are dropped by default pruning. Well
/// below every analytic scale in the supported scenarios (smallest nonzero
/// probability ~1/16) yet above the dust left by destructive interference.
inline constexpr double kDefaultPruneThreshold = 1e-14;

/**
 * Photon/excitation counts per mode, in canonical form: entries sorted by
 * mode index, zero counts omitted. Hashing and comparison are over the
 * sorted sequence, so equal physical occupations always compare equal.
 */
class OccupationVector {
public:
    using Entry = std::pair<ModeId, std::uint32_t>;

    OccupationVector() = default;

    /// Builds canonical form from arbitrary entries (merges duplicates, drops zeros).
    static OccupationVector from_entries(std::vector<Entry> entries);

    std::uint32_t count(ModeId mode) const;
    std::uint32_t total() const;
    bool empty() const { return entries_.empty(); }
    std::span<const Entry> entries() const { return entries_; }

    /// Count at `mode` incremented by one. Pure counts; bosonic sqrt factors
    /// are the caller's business.
    OccupationVector incremented(ModeId mode) const;

    /// Restriction to the given modes (canonical form, zeros omitted).
    OccupationVector restricted_to(std::span<const ModeId> modes) const;

    std::size_t hash() const;

    bool operator==(const OccupationVector& other) const { return entries_ == other.entries_; }
    auto operator<=>(const OccupationVector& other) const { return entries_ <=> other.entries_; }

private:
    std::vector<Entry> entries_;
};

struct OccupationHash {
    std::size_t operator()(const OccupationVector& occ) const { return occ.hash(); }
};

/**
 * Linear substitution rule on creation operators: each input mode's operator
 * is rewritten as a complex combination of output-mode operators,
 *
 *     a^dag_p  ->  sum_o coeff(o, p) a^dag_o,
 *
 * identity on modes without a column. A physical element's map is an isometry
 * (orthonormal columns); the class does not require that, it only checks on
 * demand.
 */
class ModeMap {
public:
    using Column = std::vector<std::pair<ModeId, Amplitude>>;

    static ModeMap identity() { return ModeMap{}; }

    void set_column(ModeId input, Column image);

    bool has_column(ModeId input) const { return columns_.count(input) != 0; }
    const Column* column(ModeId input) const;
    const std::map<ModeId, Column>& columns() const { return columns_; }

    std::vector<ModeId> input_modes() const;
    std::vector<ModeId> output_modes() const;

    /// Column orthonormality: sum_o c(o,p) conj(c(o,q)) = delta_pq within tol.
    bool is_isometry(double tol = 1e-12) const;

private:
    std::map<ModeId, Column> columns_;
};

/**
 * Sparse multi-mode Fock state: occupation vectors mapped to complex
 * amplitudes, bound to the registry its modes live in. Values are immutable
 * once built; every operation below returns a fresh state.
 */
class FockState {
public:
    using TermMap = std::unordered_map<OccupationVector, Amplitude, OccupationHash>;

    explicit FockState(std::shared_ptr<const ModeRegistry> registry)
        : registry_(std::move(registry)) {}

    const std::shared_ptr<const ModeRegistry>& registry() const { return registry_; }
    const TermMap& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }

    Amplitude amplitude(const OccupationVector& occ) const;
    double squared_norm() const;
    double norm() const;

    /// Largest total excitation count over all stored terms (0 for vacuum).
    std::uint32_t max_total_count() const;

    /// Terms ordered by occupation vector, for deterministic output.
    std::vector<std::pair<OccupationVector, Amplitude>> sorted_terms() const;

    /// Accumulates amplitude at occ (construction path for the operations
    /// below; exact zero results are erased).
    void add_term(const OccupationVector& occ, Amplitude amp);

    bool operator==(const FockState& other) const {
        return registry_.get() == other.registry_.get() && terms_ == other.terms_;
    }

private:
    std::shared_ptr<const ModeRegistry> registry_;
    TermMap terms_;
};

/// |vac>: the single empty term with amplitude 1.
FockState vacuum(std::shared_ptr<const ModeRegistry> registry);

/// Applies a^dag_mode: count incremented, amplitude picks up sqrt(n+1).
/// Not renormalized.
FockState apply_creation(const FockState& state, ModeId mode);

/// <a|b>, conjugate-linear in the first argument. Both states must live in
/// the same registry.
Amplitude inner_product(const FockState& a, const FockState& b);

/**
 * Rewrites every term by substituting each occupied input mode's creation
 * operator with its ModeMap image, expanding the operator product and
 * recollecting canonical terms. Norm is preserved (up to roundoff) when the
 * map is an isometry. Modes without a column pass through untouched.
 */
FockState apply_mode_map(const FockState& state, const ModeMap& map);

/// Probability of each count pattern on `modes`, summed over everything else.
/// Keys are canonical restrictions (zeros omitted); values sum to the squared norm.
std::map<OccupationVector, double> marginal_counts(const FockState& state,
                                                   std::span<const ModeId> modes);

/// Drops terms with |amplitude| < threshold.
FockState prune(const FockState& state, double threshold = kDefaultPruneThreshold);

/// Term-wise sum. Same registry required.
FockState add(const FockState& a, const FockState& b);

/// Scalar multiple.
FockState scale(const FockState& state, Amplitude factor);

} // namespace cpasim

#endif
