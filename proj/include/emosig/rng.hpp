// Deterministic, platform-independent random draws.
//
// std::uniform_real_distribution and std::normal_distribution are
// implementation-defined, so byte-identical outputs across toolchains require
// hand-rolled transforms on top of mt19937_64.
#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace emosig {

// FNV-1a 64-bit over a byte string. Used to fold structured stream names
// (subject id, trial id, purpose tags) into seed material.
std::uint64_t fnv1a64(const std::string& s);

// splitmix64 finalizer: decorrelates seeds that differ in few bits.
std::uint64_t splitmix64(std::uint64_t x);

// Stable per-stream seed: hash of the tag mixed with the master seed.
std::uint64_t derive_seed(std::uint64_t master, const std::string& tag);

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1): top 53 bits of the engine output.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; caches the second variate.
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer on [0, n): rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace emosig
