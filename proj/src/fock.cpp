#include "cpasim/fock.hpp"

#include <algorithm>
#include <cmath>

namespace cpasim {

namespace {

double factorial_d(std::uint32_t n) {
    static constexpr double table[] = {1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0, 5040.0,
                                       40320.0, 362880.0, 3628800.0, 39916800.0};
    if (n < sizeof(table) / sizeof(table[0])) return table[n];
    double f = table[sizeof(table) / sizeof(table[0]) - 1];
    for (std::uint32_t k = sizeof(table) / sizeof(table[0]); k <= n; ++k) f *= k;
    return f;
}

/// sqrt of the product of factorials of all counts: converts between ket
/// amplitudes and raw creation-operator monomial coefficients.
double sqrt_factorial_product(const OccupationVector& occ) {
    double f = 1.0;
    for (const auto& [mode, n] : occ.entries()) f *= factorial_d(n);
    return std::sqrt(f);
}

} // namespace

// ---------------------------------------------------------------------------
// OccupationVector

OccupationVector OccupationVector::from_entries(std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.first < b.first; });
    OccupationVector occ;
    for (const auto& [mode, count] : entries) {
        if (count == 0) continue;
        if (!occ.entries_.empty() && occ.entries_.back().first == mode)
            occ.entries_.back().second += count;
        else
            occ.entries_.emplace_back(mode, count);
    }
    return occ;
}

std::uint32_t OccupationVector::count(ModeId mode) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), mode,
                               [](const Entry& e, ModeId m) { return e.first < m; });
    return (it != entries_.end() && it->first == mode) ? it->second : 0;
}

std::uint32_t OccupationVector::total() const {
    std::uint32_t n = 0;
    for (const auto& e : entries_) n += e.second;
    return n;
}

OccupationVector OccupationVector::incremented(ModeId mode) const {
    OccupationVector out = *this;
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), mode,
                               [](const Entry& e, ModeId m) { return e.first < m; });
    if (it != out.entries_.end() && it->first == mode)
        ++it->second;
    else
        out.entries_.insert(it, Entry{mode, 1});
    return out;
}

OccupationVector OccupationVector::restricted_to(std::span<const ModeId> modes) const {
    std::vector<Entry> kept;
    for (ModeId m : modes) {
        const std::uint32_t n = count(m);
        if (n > 0) kept.emplace_back(m, n);
    }
    return from_entries(std::move(kept));
}

std::size_t OccupationVector::hash() const {
    // FNV-1a over the (index, count) sequence
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](std::size_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    for (const auto& [mode, count] : entries_) {
        mix(mode.index());
        mix(count);
    }
    return h;
}

// ---------------------------------------------------------------------------
// ModeMap

void ModeMap::set_column(ModeId input, Column image) {
    std::sort(image.begin(), image.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    columns_[input] = std::move(image);
}

const ModeMap::Column* ModeMap::column(ModeId input) const {
    auto it = columns_.find(input);
    return it == columns_.end() ? nullptr : &it->second;
}

std::vector<ModeId> ModeMap::input_modes() const {
    std::vector<ModeId> out;
    out.reserve(columns_.size());
    for (const auto& [input, image] : columns_) out.push_back(input);
    return out;
}

std::vector<ModeId> ModeMap::output_modes() const {
    std::vector<ModeId> out;
    for (const auto& [input, image] : columns_)
        for (const auto& [mode, coeff] : image) out.push_back(mode);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool ModeMap::is_isometry(double tol) const {
    for (auto p = columns_.begin(); p != columns_.end(); ++p) {
        for (auto q = p; q != columns_.end(); ++q) {
            Amplitude dot = 0.0;
            for (const auto& [mode_p, coeff_p] : p->second)
                for (const auto& [mode_q, coeff_q] : q->second)
                    if (mode_p == mode_q) dot += std::conj(coeff_p) * coeff_q;
            const Amplitude expected = (p == q) ? Amplitude{1.0, 0.0} : Amplitude{0.0, 0.0};
            if (std::abs(dot - expected) > tol) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// FockState

Amplitude FockState::amplitude(const OccupationVector& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? Amplitude{0.0, 0.0} : it->second;
}

double FockState::squared_norm() const {
    double s = 0.0;
    for (const auto& [occ, amp] : terms_) s += std::norm(amp);
    return s;
}

double FockState::norm() const { return std::sqrt(squared_norm()); }

std::uint32_t FockState::max_total_count() const {
    std::uint32_t n = 0;
    for (const auto& [occ, amp] : terms_) n = std::max(n, occ.total());
    return n;
}

std::vector<std::pair<OccupationVector, Amplitude>> FockState::sorted_terms() const {
    std::vector<std::pair<OccupationVector, Amplitude>> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void FockState::add_term(const OccupationVector& occ, Amplitude amp) {
    auto [it, inserted] = terms_.try_emplace(occ, amp);
    if (!inserted) {
        it->second += amp;
        if (it->second == Amplitude{0.0, 0.0}) terms_.erase(it);
    } else if (amp == Amplitude{0.0, 0.0}) {
        terms_.erase(it);
    }
}

// ---------------------------------------------------------------------------
// Operations

FockState vacuum(std::shared_ptr<const ModeRegistry> registry) {
    FockState state(std::move(registry));
    state.add_term(OccupationVector{}, Amplitude{1.0, 0.0});
    return state;
}

FockState apply_creation(const FockState& state, ModeId mode) {
    if (!state.registry()->contains(mode))
        throw Error("apply_creation: mode not registered");
    FockState out(state.registry());
    for (const auto& [occ, amp] : state.terms()) {
        const double n = occ.count(mode);
        out.add_term(occ.incremented(mode), amp * std::sqrt(n + 1.0));
    }
    return out;
}

Amplitude inner_product(const FockState& a, const FockState& b) {
    if (a.registry().get() != b.registry().get())
        throw Error("inner_product: states belong to different mode registries");
    const FockState& small = a.term_count() <= b.term_count() ? a : b;
    const FockState& large = a.term_count() <= b.term_count() ? b : a;
    const bool small_is_a = &small == &a;
    Amplitude sum = 0.0;
    for (const auto& [occ, amp] : small.terms()) {
        auto it = large.terms().find(occ);
        if (it == large.terms().end()) continue;
        sum += small_is_a ? std::conj(amp) * it->second : std::conj(it->second) * amp;
    }
    return sum;
}

FockState apply_mode_map(const FockState& state, const ModeMap& map) {
    for (ModeId input : map.input_modes())
        if (!state.registry()->contains(input))
            throw Error("apply_mode_map: map references a mode not in the state's registry");

    FockState out(state.registry());
    using Poly = std::unordered_map<OccupationVector, Amplitude, OccupationHash>;

    for (const auto& [occ, amp] : state.terms()) {
        // Work on raw creation-operator monomials: ket amplitude divided by
        // sqrt(prod n!), substituted mode by mode, converted back at the end.
        std::vector<OccupationVector::Entry> pass_through;
        std::vector<OccupationVector::Entry> substituted;
        for (const auto& entry : occ.entries())
            (map.has_column(entry.first) ? substituted : pass_through).push_back(entry);

        Poly poly;
        poly.emplace(OccupationVector::from_entries(pass_through),
                     amp / sqrt_factorial_product(occ));

        for (const auto& [input, count] : substituted) {
            const ModeMap::Column& image = *map.column(input);
            for (std::uint32_t rep = 0; rep < count; ++rep) {
                Poly next;
                next.reserve(poly.size() * image.size());
                for (const auto& [mono, coeff] : poly)
                    for (const auto& [output, c] : image)
                        next[mono.incremented(output)] += coeff * c;
                poly = std::move(next);
            }
        }

        for (const auto& [mono, coeff] : poly)
            out.add_term(mono, coeff * sqrt_factorial_product(mono));
    }
    return out;
}

std::map<OccupationVector, double> marginal_counts(const FockState& state,
                                                   std::span<const ModeId> modes) {
    std::map<OccupationVector, double> probs;
    for (const auto& [occ, amp] : state.terms())
        probs[occ.restricted_to(modes)] += std::norm(amp);
    return probs;
}

FockState prune(const FockState& state, double threshold) {
    if (threshold < 0.0) throw Error("prune: negative threshold");
    FockState out(state.registry());
    for (const auto& [occ, amp] : state.terms())
        if (std::abs(amp) >= threshold && amp != Amplitude{0.0, 0.0})
            out.add_term(occ, amp);
    return out;
}

FockState add(const FockState& a, const FockState& b) {
    if (a.registry().get() != b.registry().get())
        throw Error("add: states belong to different mode registries");
    FockState out = a;
    for (const auto& [occ, amp] : b.terms()) out.add_term(occ, amp);
    return out;
}

FockState scale(const FockState& state, Amplitude factor) {
    FockState out(state.registry());
    for (const auto& [occ, amp] : state.terms()) out.add_term(occ, amp * factor);
    return out;
}

} // namespace cpasim
