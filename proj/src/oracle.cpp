#include "cpasim/oracle.hpp"

#include <cmath>
#include <map>

#include "cpasim/errors.hpp"

namespace cpasim {

namespace {

using DenseOcc = std::vector<std::uint32_t>;

double factorial_d(std::uint32_t n) {
    double f = 1.0;
    for (std::uint32_t k = 2; k <= n; ++k) f *= k;
    return f;
}

/// Integer power by repeated multiplication; exact where std::pow on
/// complex values would route through exp/log.
Amplitude ipow(Amplitude base, std::uint32_t n) {
    Amplitude result{1.0, 0.0};
    for (std::uint32_t k = 0; k < n; ++k) result *= base;
    return result;
}

/// All occupations of `total` photons over `num_modes` modes, lexicographic.
void enumerate_sector(std::uint32_t total, std::size_t num_modes,
                      std::vector<DenseOcc>& out) {
    DenseOcc occ(num_modes, 0);
    auto recurse = [&](auto&& self, std::size_t mode, std::uint32_t remaining) -> void {
        if (mode + 1 == num_modes) {
            occ[mode] = remaining;
            out.push_back(occ);
            occ[mode] = 0;
            return;
        }
        for (std::uint32_t n = 0; n <= remaining; ++n) {
            occ[mode] = n;
            self(self, mode + 1, remaining - n);
        }
        occ[mode] = 0;
    };
    if (num_modes > 0) recurse(recurse, 0, total);
}

/**
 * Lifted matrix element source: expands
 *
 *   prod_p (sum_o c(o,p) b_o)^{n_p}
 *
 * with the multinomial theorem, one closed-form term per composition
 * assignment {k_{p,o}}, and accumulates
 *
 *   <m| S |n> = sqrt(prod m_o! / prod n_p!) prod_p n_p! prod_o c(o,p)^{k}/k!
 *
 * into the column for |n>. Unmapped modes carry an implicit identity column.
 */
void accumulate_column(const ModeMap& map, const DenseOcc& occ,
                       std::map<DenseOcc, Amplitude>& column) {
    struct MappedInput {
        ModeMap::Column image; // identity column when the map leaves the mode alone
        std::uint32_t count;
    };
    std::vector<MappedInput> inputs;
    for (std::uint32_t p = 0; p < occ.size(); ++p) {
        if (occ[p] == 0) continue;
        MappedInput in;
        in.count = occ[p];
        if (const ModeMap::Column* img = map.column(ModeId(p)))
            in.image = *img;
        else
            in.image = {{ModeId(p), Amplitude{1.0, 0.0}}};
        inputs.push_back(std::move(in));
    }

    double in_factorials = 1.0;
    for (const auto& in : inputs) in_factorials *= factorial_d(in.count);

    DenseOcc image_occ(occ.size(), 0);
    auto recurse = [&](auto&& self, std::size_t input_idx, Amplitude weight) -> void {
        if (input_idx == inputs.size()) {
            double out_factorials = 1.0;
            for (std::uint32_t m : image_occ) out_factorials *= factorial_d(m);
            column[image_occ] += weight * std::sqrt(out_factorials / in_factorials);
            return;
        }
        const auto& in = inputs[input_idx];
        const auto& image = in.image;
        if (image.empty()) return; // photons with nowhere to go annihilate the term
        // compositions of in.count over the image's output slots
        DenseOcc parts(image.size(), 0);
        auto compose = [&](auto&& comp_self, std::size_t slot, std::uint32_t remaining,
                           Amplitude partial) -> void {
            if (slot + 1 == image.size()) {
                parts[slot] = remaining;
                Amplitude term = partial * ipow(image[slot].second, remaining) /
                                 factorial_d(remaining);
                for (std::size_t s = 0; s < image.size(); ++s)
                    image_occ[image[s].first.index()] += parts[s];
                self(self, input_idx + 1, weight * factorial_d(in.count) * term);
                for (std::size_t s = 0; s < image.size(); ++s)
                    image_occ[image[s].first.index()] -= parts[s];
                parts[slot] = 0;
                return;
            }
            for (std::uint32_t k = 0; k <= remaining; ++k) {
                parts[slot] = k;
                comp_self(comp_self, slot + 1, remaining - k,
                          partial * ipow(image[slot].second, k) / factorial_d(k));
            }
            parts[slot] = 0;
        };
        compose(compose, 0, in.count, Amplitude{1.0, 0.0});
    };
    recurse(recurse, 0, Amplitude{1.0, 0.0});
}

} // namespace

FockState oracle_evolve_dense(const Network& net, const FockState& input,
                              const OracleOptions& options) {
    if (input.registry().get() != net.registry().get())
        throw Error("oracle: input state does not live in the network's registry");

    const std::size_t num_modes = net.registry()->size();

    // Sectors do not mix: every stage conserves total photon number.
    std::map<std::uint32_t, std::vector<std::pair<DenseOcc, Amplitude>>> sectors;
    for (const auto& [occ, amp] : input.terms()) {
        DenseOcc dense(num_modes, 0);
        for (const auto& [mode, count] : occ.entries()) dense[mode.index()] = count;
        sectors[occ.total()].emplace_back(std::move(dense), amp);
    }

    FockState result(input.registry());
    for (const auto& [total, terms] : sectors) {
        std::vector<DenseOcc> basis;
        enumerate_sector(total, num_modes, basis);
        if (basis.size() > options.basis_limit)
            throw Error("oracle: sector basis of " + std::to_string(basis.size()) +
                        " states exceeds the limit of " + std::to_string(options.basis_limit));

        std::map<DenseOcc, std::size_t> index;
        for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);

        std::vector<Amplitude> vec(basis.size(), Amplitude{0.0, 0.0});
        for (const auto& [dense, amp] : terms) vec[index.at(dense)] += amp;

        for (const auto& stage : net.stages()) {
            const std::size_t b = basis.size();
            std::vector<Amplitude> matrix(b * b, Amplitude{0.0, 0.0}); // row-major
            for (std::size_t col = 0; col < b; ++col) {
                std::map<DenseOcc, Amplitude> image;
                accumulate_column(stage.map, basis[col], image);
                for (const auto& [occ, amp] : image)
                    matrix[index.at(occ) * b + col] = amp;
            }
            std::vector<Amplitude> next(b, Amplitude{0.0, 0.0});
            for (std::size_t row = 0; row < b; ++row) {
                Amplitude sum = 0.0;
                for (std::size_t col = 0; col < b; ++col)
                    sum += matrix[row * b + col] * vec[col];
                next[row] = sum;
            }
            vec = std::move(next);
        }

        for (std::size_t i = 0; i < basis.size(); ++i) {
            if (vec[i] == Amplitude{0.0, 0.0}) continue;
            std::vector<OccupationVector::Entry> entries;
            for (std::uint32_t m = 0; m < num_modes; ++m)
                if (basis[i][m] > 0) entries.emplace_back(ModeId(m), basis[i][m]);
            result.add_term(OccupationVector::from_entries(std::move(entries)), vec[i]);
        }
    }
    return result;
}

} // namespace cpasim
