#include "qfep/rng.hpp"

#include <cmath>
#include <numbers>

#include "qfep/error.hpp"

namespace qfep {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::unsupported_observable: return "unsupported-observable";
    case ErrorKind::invalid_weights: return "invalid-weights";
    case ErrorKind::landauer_violation: return "landauer-violation";
    case ErrorKind::invalid_partition: return "invalid-partition";
    case ErrorKind::memory_full: return "memory-full";
    case ErrorKind::thermodynamic_starvation: return "thermodynamic-starvation";
    case ErrorKind::conditioning_on_null: return "conditioning-on-null";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::validation_error: return "validation-error";
    }
    return "error";
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Rng::Rng(std::uint64_t seed) : key_(mix64(seed ^ 0x5eedf00dcafe1234ULL)) {}

Rng Rng::fork(std::string_view label) const { return Rng(mix64(key_ ^ mix64(fnv1a64(label))), 0); }

Rng Rng::fork(std::uint64_t index) const { return Rng(mix64(key_ + mix64(index + 0x9e3779b97f4a7c15ULL)), 0); }

std::uint64_t Rng::next() {
    std::uint64_t z = key_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
    return mix64(z);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
    require(n > 0, ErrorKind::invalid_argument, "Rng::below requires n > 0");
    const std::uint64_t limit = max() - max() % n;
    for (;;) {
        std::uint64_t x = next();
        if (x < limit) return x % n;
    }
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

}  // namespace qfep
