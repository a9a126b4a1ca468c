#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace qfep {

// Counter-based generator. A stream is identified by a 64-bit key derived from
// (seed, label path); the n-th draw is a pure function of (key, n), so forked
// streams are independent of the order in which other streams are consumed.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0);

    // Child stream keyed by this stream's key and `label`. Does not advance this stream.
    Rng fork(std::string_view label) const;
    Rng fork(std::uint64_t index) const;

    std::uint64_t next();
    result_type operator()() { return next(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform();
    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);
    // Standard normal via Box-Muller; deterministic across platforms.
    double normal();

    std::uint64_t key() const { return key_; }
    std::uint64_t counter() const { return counter_; }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    Rng(std::uint64_t key, std::uint64_t counter) : key_(key), counter_(counter) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace qfep
