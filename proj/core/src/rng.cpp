#include "bellsim/rng.hpp"

#include <cmath>

namespace bellsim {
namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

constexpr double kTwoPi = 6.283185307179586476925286766559005768;

} // namespace

RngStream::RngStream(std::uint64_t seed) : seed_(seed), gen_(seed) {}

std::uint64_t RngStream::next_word() { return gen_(); }

double RngStream::uniform_open() {
    for (;;) {
        double u = static_cast<double>(next_word() >> 11) * 0x1.0p-53;
        if (u != 0.0) return u;
    }
}

double RngStream::uniform_angle() {
    return kTwoPi * (static_cast<double>(next_word() >> 11) * 0x1.0p-53);
}

int RngStream::random_bit() { return static_cast<int>(next_word() >> 63); }

RngStream RngStream::substream(std::string_view label) const {
    return RngStream(splitmix64(seed_ ^ fnv1a(label)));
}

} // namespace bellsim
