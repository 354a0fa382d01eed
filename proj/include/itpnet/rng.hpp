#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace itpnet {

/// splitmix64 generator (Vigna). All randomness in the project flows through
/// this so that data, init and shuffle streams are independent and every run
/// is reproducible from (seed, stream) alone. Normals use Box-Muller.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi] inclusive.
    long uniform_int(long lo, long hi) {
        return lo + long(next_u64() % std::uint64_t(hi - lo + 1));
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        // fresh pair per call; the spare is discarded to keep call sites
        // position-independent
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mean + stddev * z;
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    /// Derives an independent stream from (seed, name, index).
    static std::uint64_t derive(std::uint64_t seed, std::string_view name, std::uint64_t index = 0) {
        Rng mixer(seed ^ fnv1a(name));
        std::uint64_t h = mixer.next_u64();
        Rng mixer2(h ^ (index * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL));
        return mixer2.next_u64();
    }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
};

} // namespace itpnet
