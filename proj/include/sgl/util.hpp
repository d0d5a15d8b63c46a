#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace sgl {

// Half-up rounding: 0.5 rounds toward +inf, so 2.5 -> 3 and -2.5 -> -2.
// Used for every quantization and mean in the toolkit.
long long round_half_up(double v);

// Token grammar shared by class and predicate labels: [a-z0-9_]+.
bool is_token(std::string_view s);

// Lowercases ASCII letters and collapses internal whitespace runs to a
// single underscore. "Traffic Light" -> "traffic_light".
std::string normalize_label(std::string_view raw);

std::vector<std::string> split_whitespace(std::string_view line);
std::vector<std::string> split_on(std::string_view line, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// 64-bit string hash (FNV-1a), used to derive per-sample random streams.
std::uint64_t hash_string(std::string_view s);

// splitmix64 finalizer; decorrelates nearby seed values.
std::uint64_t mix64(std::uint64_t x);

// Deterministic RNG wrapper. Bounded draws avoid std::uniform_int_distribution
// so a given seed produces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    // Uniform integer in [lo, hi], inclusive.
    long long between(long long lo, long long hi);

    // Uniform double in [0, 1).
    double real01();

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n) on `jobs` worker threads. Results must be
// written to pre-sized per-index slots by the caller; the first exception
// (by index) is rethrown after all workers join. jobs <= 1 runs inline.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// Calls fn once per n-element index combination of [0, k), lexicographic.
void for_each_combination(int k, int n, const std::function<void(const std::vector<int>&)>& fn);

}  // namespace sgl
