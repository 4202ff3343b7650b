#pragma once

#include <cmath>
#include <cstdint>

namespace rgbdmeas {

// splitmix64: tiny, fast, and fully specified, so every platform and run
// produces the same stream for the same seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless hash of up to three lattice coordinates, for procedural noise.
inline std::uint64_t hash_coords(std::uint64_t seed, std::int64_t a, std::int64_t b,
                                 std::int64_t c = 0) {
    std::uint64_t state = seed;
    state ^= splitmix64(state) + static_cast<std::uint64_t>(a) * 0x9e3779b97f4a7c15ULL;
    state ^= splitmix64(state) + static_cast<std::uint64_t>(b) * 0xc2b2ae3d27d4eb4fULL;
    state ^= splitmix64(state) + static_cast<std::uint64_t>(c) * 0x165667b19e3779f9ULL;
    return splitmix64(state);
}

// Deterministic random stream with the handful of draws the project needs.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64(state_); }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    // Standard normal via Box-Muller; owned rather than std:: so the stream
    // is identical everywhere.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rgbdmeas
