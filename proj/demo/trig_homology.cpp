// Draws a few random trigonometric polynomials in 2D, computes the Betti
// numbers of their cubical nodal domains and tries to certify them.
#include <cstdio>

#include "nodal/nodal.hpp"

int main() {
    using namespace nodal;
    const CoeffSeq2D coeffs = trig_coeffs_2d(3);
    const std::size_t M = 24;
    std::printf("bound at M=%zu: %.4f (vacuous until M is in the hundreds)\n", M,
                bound_2d_periodic(spectral_moments(coeffs), M).bound);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Realization2D r = draw_realization(coeffs, seed);
        const BettiPair b = betti_pair(sign_grid(r, M));
        const ReferenceBetti ref = reference_betti(r, default_reference_resolution(M, 3));
        const ValidationOutcome v = validate_2d(r, M, 4);
        std::printf("seed %llu: N+ (%zu, %zu)  N- (%zu, %zu)  reference %s  %s\n",
                    static_cast<unsigned long long>(seed), b.plus.b0, b.plus.b1, b.minus.b0, b.minus.b1,
                    homology_match(b, ref.betti) ? "agrees" : "differs", to_string(v.status));
    }
}
