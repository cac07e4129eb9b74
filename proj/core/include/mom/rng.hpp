#ifndef MOM_RNG_HPP
#define MOM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace mom {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a base seed and stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t s = base;
    std::uint64_t h = splitmix64(s);
    s ^= a * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL;
    h ^= splitmix64(s);
    s ^= b * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL;
    h ^= splitmix64(s);
    return h;
}

/// Small counter-free xoshiro256** generator.  All randomness in the library
/// flows through explicitly seeded instances of this class, so every result
/// is reproducible bit-for-bit from (inputs, seed).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) via rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Box-Muller; one cached value per pair of uniforms.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(theta);
        has_cached_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Student-t with integer degrees of freedom, via the normal/chi-square ratio.
    double student_t(int dof) {
        const double z = normal();
        double chi_sq = 0.0;
        for (int i = 0; i < dof; ++i) {
            const double g = normal();
            chi_sq += g * g;
        }
        return z / std::sqrt(chi_sq / static_cast<double>(dof));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// In-place Fisher-Yates shuffle, self-contained so results do not depend on
/// the standard library's std::shuffle implementation.
template <typename T, typename Container>
void shuffle_values(Container& values, Rng& rng) {
    const std::size_t n = values.size();
    if (n < 2) return;
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_int(i + 1));
        T tmp = values[i];
        values[i] = values[j];
        values[j] = tmp;
    }
}

template <typename Container>
void shuffle_values(Container& values, Rng& rng) {
    shuffle_values<typename Container::value_type>(values, rng);
}

}  // namespace mom

#endif
