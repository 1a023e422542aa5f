#include "riscbf/rng.hpp"

#include <cmath>

namespace riscbf {

std::uint64_t Rng::splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t Rng::next_u64() {
    // xoroshiro-style mix of two splitmix-evolved words
    std::uint64_t a = s_;
    std::uint64_t b = s2_;
    s_ = splitmix(a);
    s2_ = splitmix(b ^ a);
    return a + (b << 1 | b >> 63);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::complex<double> Rng::cnormal() {
    // |z|^2 ~ Exp(1), phase uniform
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-std::log(u1));
    double th = 2.0 * M_PI * uniform();
    return {r * std::cos(th), r * std::sin(th)};
}

std::uint64_t Rng::integer(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t bound = ~0ull - (~0ull % n);
    std::uint64_t x = next_u64();
    while (x >= bound) x = next_u64();
    return x % n;
}

Rng Rng::fork(std::uint64_t tag) const {
    return Rng(splitmix(s_ ^ splitmix(tag)));
}

} // namespace riscbf
