#include "missim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "missim/errors.hpp"

namespace missim::stats {

double mean(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("mean of empty range");
    double s = std::accumulate(values.begin(), values.end(), 0.0);
    return s / static_cast<double>(values.size());
}

double pop_variance(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("variance of empty range");
    double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw EmptyInputError("sample variance needs at least two values");
    double m = mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size() - 1);
}

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw EmptyInputError("quantile of empty range");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    double h = q * static_cast<double>(sorted.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(h));
    auto hi = static_cast<std::size_t>(std::ceil(h));
    if (lo == hi) return sorted[lo];
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> ranks(std::span<const double> values) {
    std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> out(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the average of 1-based ranks i+1..j+1
        double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) out[order[k]] = avg;
        i = j + 1;
    }
    return out;
}

Standardization fit_standardization(std::span<const double> values) {
    if (values.empty()) throw EmptyInputError("standardization over empty range");
    Standardization s;
    s.mean = mean(values);
    s.stddev = std::sqrt(pop_variance(values));
    return s;
}

Standardization fit_standardization(std::span<const std::optional<double>> values) {
    std::vector<double> present;
    present.reserve(values.size());
    for (const auto& v : values)
        if (v.has_value()) present.push_back(*v);
    if (present.empty()) throw EmptyInputError("standardization needs at least one present value");
    return fit_standardization(std::span<const double>(present));
}

std::vector<double> standardize(std::span<const double> values) {
    auto s = fit_standardization(values);
    std::vector<double> out;
    out.reserve(values.size());
    for (double v : values) out.push_back(s.apply(v));
    return out;
}

std::vector<std::optional<double>> standardize(std::span<const std::optional<double>> values) {
    auto s = fit_standardization(values);
    std::vector<std::optional<double>> out;
    out.reserve(values.size());
    for (const auto& v : values)
        out.push_back(v.has_value() ? std::optional<double>(s.apply(*v)) : std::nullopt);
    return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("pearson: length mismatch");
    if (a.empty()) throw EmptyInputError("pearson of empty range");
    double ma = mean(a), mb = mean(b);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return std::nullopt;
    return sab / std::sqrt(saa * sbb);
}

std::optional<double> spearman(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("spearman: length mismatch");
    auto ra = ranks(a);
    auto rb = ranks(b);
    return pearson(ra, rb);
}

std::optional<double> kendall_tau_b(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("kendall: length mismatch");
    if (a.empty()) throw EmptyInputError("kendall of empty range");
    std::size_t n = a.size();
    long long concordant = 0, discordant = 0;
    long long ties_a = 0, ties_b = 0;  // pairs tied in exactly that one variable
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double da = a[i] - a[j], db = b[i] - b[j];
            if (da == 0.0 && db == 0.0) continue;  // tied in both, drops from every term
            if (da == 0.0) {
                ++ties_a;
            } else if (db == 0.0) {
                ++ties_b;
            } else if ((da > 0.0) == (db > 0.0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }
    double n0 = concordant + discordant;
    double denom = std::sqrt((n0 + ties_a) * (n0 + ties_b));
    if (denom == 0.0) return std::nullopt;
    return (static_cast<double>(concordant) - static_cast<double>(discordant)) / denom;
}

double point_biserial(std::span<const double> values, std::span<const std::uint8_t> group) {
    if (values.size() != group.size()) throw ShapeError("point_biserial: length mismatch");
    if (values.empty()) throw EmptyInputError("point_biserial of empty range");
    double s = std::sqrt(pop_variance(values));
    if (s == 0.0) return 0.0;
    double sum1 = 0.0, sum0 = 0.0;
    std::size_t n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (group[i]) {
            sum1 += values[i];
            ++n1;
        } else {
            sum0 += values[i];
            ++n0;
        }
    }
    if (n1 == 0 || n0 == 0) return 0.0;
    double m1 = sum1 / static_cast<double>(n1);
    double m0 = sum0 / static_cast<double>(n0);
    double n = static_cast<double>(values.size());
    return (m1 - m0) / s * std::sqrt(static_cast<double>(n1) * static_cast<double>(n0) / (n * n));
}

long long round_half_even(double x) {
    double f = std::floor(x);
    double frac = x - f;
    if (frac > 0.5) return static_cast<long long>(f) + 1;
    if (frac < 0.5) return static_cast<long long>(f);
    auto n = static_cast<long long>(f);
    return (n % 2 == 0) ? n : n + 1;
}

double sigmoid(double x) {
    double c = std::clamp(x, -700.0, 700.0);
    return 1.0 / (1.0 + std::exp(-c));
}

}  // namespace missim::stats
