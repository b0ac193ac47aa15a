#pragma once

#include <cstdint>
#include <random>

namespace lgt {

// splitmix64, used to derive independent substream seeds from one root seed.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// One RNG stream, owned by exactly one consumer. Substreams are derived
// counter-style: stream k of root seed s is seeded with splitmix64(s ^ k-dependent word).
class RngStream {
  public:
    explicit RngStream(uint64_t seed) : gen_(seed) {}

    static RngStream substream(uint64_t root_seed, uint64_t stream_id) {
        uint64_t s = splitmix64(root_seed ^ splitmix64(stream_id + 0x632be59bd9b4e019ULL));
        return RngStream(s);
    }

    double uniform() { return unif_(gen_); }                    // [0,1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int n) {                                    // {0,..,n-1}
        return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(gen_));
    }
    double normal() { return normal_(gen_); }
    uint64_t raw() { return gen_(); }

    std::mt19937_64& engine() { return gen_; }

  private:
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace lgt
