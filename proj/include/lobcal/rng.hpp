#ifndef LOBCAL_RNG_HPP
#define LOBCAL_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace lobcal {

/// splitmix64 finalizer; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a, for turning a purpose label into a seed namespace.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Seed for stream `index` inside namespace `label` of `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                    std::uint64_t index = 0) noexcept {
    return mix64(mix64(master ^ hash_label(label)) + index);
}

/// Thin wrapper over std::mt19937_64. The distributions are written out by
/// hand because the std:: ones are not bit-reproducible across standard
/// libraries, and traces must be.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() noexcept { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on the open interval (0, 1).
    double uniform_open() noexcept {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    bool bernoulli(double p) noexcept { return uniform() < p; }

    /// Uniform integer on [0, n), n > 0. Rejection keeps it unbiased.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Number of Bernoulli(p) failures before the next success; p in (0, 1).
    std::uint64_t geometric_gap(double p) noexcept {
        const double g = std::floor(std::log(uniform_open()) / std::log1p(-p));
        return g >= 1.8e19 ? ~std::uint64_t{0} : static_cast<std::uint64_t>(g);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace lobcal

#endif  // LOBCAL_RNG_HPP
