#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace anmdisc {

/// Mixes a parent seed with a stream tag (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// Seeded random stream. Distributions are computed here rather than with
/// <random>'s distribution classes, whose output is implementation-defined,
/// so a seed produces the same numbers on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent child stream identified by `tag`.
    Rng split(std::uint64_t tag) const { return Rng(derive_seed(seed_of_stream(), tag)); }

    double uniform();  // [0, 1)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    double normal();   // standard normal
    double normal(double mean, double sd) { return mean + sd * normal(); }
    /// Uniform on [-hi, -lo] u [lo, hi].
    double symmetric_band(double lo, double hi);
    std::uint64_t below(std::uint64_t bound);  // uniform integer in [0, bound)

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_of_stream() const;

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace anmdisc
