#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "missim/errors.hpp"

namespace missim::rng {

// splitmix64 step, used to hash stream coordinates into seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d65862296329c7ULL;
    return x ^ (x >> 31);
}

// Column slot meaning "this stream is keyed to a row draw, not a column".
inline constexpr std::uint64_t ROW_STREAM = 0xffffffffffffffffULL;

// Purpose tags keep independent draw kinds on separate substreams, so a
// frozen transform can replay one kind without disturbing the others.
enum class Purpose : std::uint64_t {
    cell_bernoulli = 1,
    row_select = 2,
    column_select = 3,
    weight_draw = 4,
    noise_draw = 5,
};

// Deterministic seed for the (family, variant, column, purpose) substream of a
// run seed. Chained splitmix64 so every coordinate perturbs the whole state.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t family, std::uint64_t variant,
                              std::uint64_t column, Purpose purpose) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ family);
    h = splitmix64(h ^ variant);
    h = splitmix64(h ^ column);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return h;
}

// mt19937_64 wrapper with fixed real-number recipes. The standard pins the
// raw engine sequence; the distributions here avoid libstdc++-specific
// std::uniform_real_distribution behavior so streams stay portable.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1): top 53 bits of the engine output.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, bound) by rejection, bound > 0.
    std::uint64_t uniform_int(std::uint64_t bound) {
        if (bound == 0) throw DomainError("uniform_int: bound must be positive");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t v = engine_();
        while (v >= limit) v = engine_();
        return v % bound;
    }

    // Standard normal via Box-Muller; one engine pair per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // k distinct indices from [0, n), partial Fisher-Yates, output unsorted.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw DomainError("sample_without_replacement: k exceeds n");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            std::size_t j = i + static_cast<std::size_t>(uniform_int(n - i));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

    // k distinct indices drawn with probability proportional to weights,
    // sequential O(k*n). Zero-weight items are only taken once every
    // positive-weight item is exhausted.
    std::vector<std::size_t> weighted_sample_without_replacement(std::span<const double> weights,
                                                                 std::size_t k);

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
};

inline std::vector<std::size_t> Rng::weighted_sample_without_replacement(
    std::span<const double> weights, std::size_t k) {
    std::size_t n = weights.size();
    if (k > n) throw DomainError("weighted sample: k exceeds n");
    for (double w : weights)
        if (!(w >= 0.0)) throw DomainError("weighted sample: weights must be non-negative");
    std::vector<bool> taken(n, false);
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t draw = 0; draw < k; ++draw) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!taken[i]) total += weights[i];
        std::size_t pick = n;
        if (total > 0.0) {
            double target = uniform() * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                acc += weights[i];
                if (target < acc) {
                    pick = i;
                    break;
                }
            }
            if (pick == n) {  // fp roundoff pushed target past the last band
                for (std::size_t i = n; i-- > 0;) {
                    if (!taken[i] && weights[i] > 0.0) {
                        pick = i;
                        break;
                    }
                }
            }
        } else {
            std::size_t remaining = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i]) ++remaining;
            std::size_t step = static_cast<std::size_t>(uniform_int(remaining));
            for (std::size_t i = 0; i < n; ++i) {
                if (taken[i]) continue;
                if (step == 0) {
                    pick = i;
                    break;
                }
                --step;
            }
        }
        taken[pick] = true;
        out.push_back(pick);
    }
    return out;
}

}  // namespace missim::rng
