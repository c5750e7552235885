#include "specset/gallery.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace specset::gallery {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Portable normal draws: mt19937_64 is bit-specified by the standard, the
// distribution is hand-rolled Box-Muller so results match across platforms.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}

    double next() {
        if (have_) {
            have_ = false;
            return spare_;
        }
        double u1 = uniform_open();
        double u2 = uniform_open();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_ = true;
        return r * std::cos(a);
    }

private:
    double uniform_open() {
        // (0,1]: avoids log(0)
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
    }

    std::mt19937_64 eng_;
    bool have_ = false;
    double spare_ = 0;
};

}  // namespace

CMatrix grcar(int n, int k) {
    if (n < k + 2) throw Error("grcar: requires n >= k + 2");
    CMatrix a = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) a(i, i - 1) = -1.0;
        for (int j = i; j <= std::min(n - 1, i + k); ++j) a(i, j) = 1.0;
    }
    return a;
}

CMatrix jordan_block(int n, Complex lambda) {
    if (n < 1) throw Error("jordan_block: n >= 1 required");
    CMatrix a = CMatrix::Zero(n, n);
    a.diagonal().setConstant(lambda);
    for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = 1.0;
    return a;
}

CMatrix normal_diag(const std::vector<Complex>& values) {
    if (values.empty()) throw Error("normal_diag: empty value list");
    CMatrix a = CMatrix::Zero(static_cast<int>(values.size()), static_cast<int>(values.size()));
    for (int i = 0; i < static_cast<int>(values.size()); ++i) a(i, i) = values[i];
    return a;
}

CMatrix block_random(const std::vector<BlockSpec>& blocks, std::uint64_t seed,
                     bool zero_variance) {
    int n = 0;
    for (const auto& b : blocks) {
        if (b.size <= 0) throw Error("block_random: block sizes must be positive");
        n += b.size;
    }
    if (n == 0) throw Error("block_random: no blocks");
    CMatrix a = CMatrix::Zero(n, n);
    int offset = 0;
    std::uint64_t state = seed;
    for (const auto& b : blocks) {
        std::uint64_t block_seed = splitmix64(state);
        NormalStream stream(block_seed);
        for (int i = 0; i < b.size; ++i) {
            for (int j = 0; j < b.size; ++j) {
                double r = zero_variance ? 0.0 : stream.next();
                a(offset + i, offset + j) = Complex(r, 0.0) + (i == j ? b.shift : Complex(0, 0));
            }
        }
        offset += b.size;
    }
    return a;
}

std::vector<BlockSpec> preset_fig4() { return {{4, {0, 0}}, {4, {8, 0}}}; }
std::vector<BlockSpec> preset_fig5() { return {{10, {-20, 0}}, {5, {0, 0}}, {10, {20, 0}}}; }
std::vector<BlockSpec> preset_fig6() { return {{10, {-5, 0}}, {10, {10, 5}}}; }

std::pair<CVector, CVector> rank_one_pair(int n, double delta) {
    if (n < 2) throw Error("rank_one_pair: n >= 2 required");
    if (delta < 0.0 || delta >= 1.0) throw Error("rank_one_pair: delta must be in [0,1)");
    CVector x = CVector::Zero(n), y = CVector::Zero(n);
    x(0) = 1.0;
    y(0) = delta;
    y(1) = std::sqrt(1.0 - delta * delta);
    return {x, y};
}

CMatrix random_complex(int n, std::uint64_t seed) {
    if (n < 1) throw Error("random_complex: n >= 1 required");
    NormalStream stream(seed);
    CMatrix a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double re = stream.next(), im = stream.next();
            a(i, j) = Complex(re, im);
        }
    return a;
}

}  // namespace specset::gallery
