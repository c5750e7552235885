#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "specset/types.hpp"

namespace specset::gallery {

/// Toeplitz matrix with -1 on the subdiagonal, 1 on the diagonal and the
/// first k superdiagonals. Requires n >= k + 2.
CMatrix grcar(int n, int k = 3);

CMatrix jordan_block(int n, Complex lambda);

CMatrix normal_diag(const std::vector<Complex>& values);

struct BlockSpec {
    int size = 0;
    Complex shift;
};

/// Block-diagonal matrix; block j is shift_j * I plus a real standard-normal
/// matrix drawn from a per-block stream split off `seed` (splitmix64 hops,
/// mt19937_64 engines, Box-Muller). zero_variance drops the random part.
CMatrix block_random(const std::vector<BlockSpec>& blocks, std::uint64_t seed,
                     bool zero_variance = false);

std::vector<BlockSpec> preset_fig4();  ///< 4+4 blocks, shifts 0 and 8
std::vector<BlockSpec> preset_fig5();  ///< 10+5+10 blocks, shifts -20, 0, 20
std::vector<BlockSpec> preset_fig6();  ///< 10+10 blocks, shifts -5 and 10+5i

/// Unit vectors with y*x = delta exactly: x = e1, y = delta e1 + sqrt(1-delta^2) e2.
std::pair<CVector, CVector> rank_one_pair(int n, double delta);

/// Dense complex matrix with independent standard-normal real/imag parts.
CMatrix random_complex(int n, std::uint64_t seed);

}  // namespace specset::gallery
