#ifndef CPASIM_ORACLE_HPP
#define CPASIM_ORACLE_HPP

#include "cpasim/network.hpp"

namespace cpasim {

struct OracleOptions {
    /// Largest photon-number-sector basis the oracle will materialize; a
    /// lifted stage matrix holds basis^2 complex entries.
    std::size_t basis_limit = 2000;
};

/**
 * Independent dense verification path for evolve(): enumerates the full
 * occupation basis of each photon-number sector over all registered modes,
 * builds every stage's lifted matrix explicitly from the multinomial
 * expansion of the creation-operator substitution (closed-form multinomial
 * coefficients and factorial weights, not the sparse engine's iterative
 * operator folding), and applies dense matrix-vector products in stage
 * order. Agrees with evolve() elementwise for isometric networks.
 */
FockState oracle_evolve_dense(const Network& net, const FockState& input,
                              const OracleOptions& options = {});

} // namespace cpasim

#endif
