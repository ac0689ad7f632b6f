#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace bellsim {

// Seedable, reproducible pseudo-random stream. Every stochastic rule in the
// simulator draws from one of these. A stream is single-owner and sequential;
// parallel or repeated work must use substream() children with distinct
// labels. The sequence for a given seed is bit-identical across platforms
// (mt19937_64 is pinned by the standard; the double conversion is explicit
// instead of going through the implementation-defined distributions).
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    // Uniform on the open interval (0,1); exact zeros are rejected.
    double uniform_open();

    // Uniform on [0, 2*pi).
    double uniform_angle();

    // Fair bit in {0,1}.
    int random_bit();

    // Independent, reproducible child stream. Same (seed, label) always
    // yields the same child; the parent is not advanced.
    RngStream substream(std::string_view label) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t next_word();

    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

} // namespace bellsim
