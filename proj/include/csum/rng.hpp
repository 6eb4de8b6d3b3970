#ifndef CSUM_RNG_HPP
#define CSUM_RNG_HPP

#include <cstdint>

namespace csum {

// xoshiro256++ with splitmix64 seeding.  Each simulated path gets its own
// stream derived from (seed, path_index), so results do not depend on how
// paths are distributed over worker threads.
class Rng {
public:
    using result_type = std::uint64_t;

    Rng() : Rng(0x9e3779b97f4a7c15ULL) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& w : s_) w = splitmix64(z);
    }

    // Stream for one path of one run: mixes the run seed with the path index.
    static Rng for_path(std::uint64_t seed, std::uint64_t path_index) {
        std::uint64_t z = seed;
        std::uint64_t a = splitmix64(z);
        z ^= (path_index + 0x632be59bd9b4e019ULL) * 0xff51afd7ed558ccdULL;
        Rng r;
        r.s_[0] = a;
        r.s_[1] = splitmix64(z);
        r.s_[2] = splitmix64(z);
        r.s_[3] = splitmix64(z);
        if ((r.s_[0] | r.s_[1] | r.s_[2] | r.s_[3]) == 0) r.s_[0] = 1;
        return r;
    }

    std::uint64_t operator()() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~0ULL; }

    // Uniform on (0,1]; never returns 0, safe under -log().
    double uniform_pos() {
        return (double)((operator()() >> 11) + 1) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    static std::uint64_t splitmix64(std::uint64_t& z) {
        z += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = z;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::uint64_t s_[4];
};

} // namespace csum

#endif
