#pragma once

#include <cmath>
#include <cstdint>

namespace sigest {

// splitmix64 step; also used to mix seed material.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic stream seed for (master_seed, replication, coordinate):
// experiments are reproducible and parallelizable without coordination.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replication,
                                 std::uint64_t coordinate) {
    std::uint64_t s = master;
    splitmix64(s);
    s ^= 0x9e3779b97f4a7c15ULL * (replication + 1);
    splitmix64(s);
    s ^= 0xc2b2ae3d27d4eb4fULL * (coordinate + 1);
    std::uint64_t mixed = s;
    return splitmix64(mixed);
}

// xoshiro256++ with Box-Muller normals.  Self-contained so that streams are
// bit-reproducible across runs and thread counts.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& si : s_) si = splitmix64(sm);
        have_spare_ = false;
        spare_ = 0.0;
    }

    std::uint64_t next_u64() {
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

    // Uniform in (0, 1): 53-bit mantissa, zero excluded.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
    bool have_spare_;
    double spare_;
};

}  // namespace sigest
