#pragma once

#include <complex>
#include <cstdint>

namespace riscbf {

// Deterministic random stream. All draws are built from raw mt19937_64
// output so that a given (seed) produces the same sequence on every
// platform; std::uniform_real_distribution and friends do not give that
// guarantee.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : s_(splitmix(seed)), s2_(splitmix(s_ + 0x9e3779b97f4a7c15ull)) {}

    std::uint64_t next_u64();

    // uniform in [0, 1)
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal, Box-Muller (two uniforms per draw, no cached spare)
    double normal();

    // circularly-symmetric complex normal CN(0, 1): E|z|^2 = 1
    std::complex<double> cnormal();

    // uniform integer in [0, n)
    std::uint64_t integer(std::uint64_t n);

    // derive an independent stream for a named sub-purpose
    Rng fork(std::uint64_t tag) const;

private:
    static std::uint64_t splitmix(std::uint64_t x);
    std::uint64_t s_, s2_;
};

} // namespace riscbf
