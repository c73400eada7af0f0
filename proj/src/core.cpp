#include "uqkit/core.hpp"

#include <cmath>
#include <limits>

namespace uqkit {

void normalize_simplex_row(std::span<double> row) {
    for (int pass = 0; pass < 4; ++pass) {
        double sum = 0.0;
        for (double v : row) sum += v;
        if (sum == 1.0) return;
        bool changed = false;
        for (double& v : row) {
            double next = v / sum;
            if (next != v) changed = true;
            v = next;
        }
        if (!changed) return;
    }
}

PredictionTensor validate_predictions(std::vector<UnitRef> units,
                                      const std::vector<std::vector<double>>& table,
                                      int n_classes, int n_members) {
    if (n_classes < 2)
        throw Error("ShapeMismatch", "n_classes must be >= 2, got " + std::to_string(n_classes));
    if (n_members < 1)
        throw Error("ShapeMismatch", "n_members must be >= 1, got " + std::to_string(n_members));
    std::size_t expected_rows = units.size() * static_cast<std::size_t>(n_members);
    if (table.size() != expected_rows)
        throw Error("ShapeMismatch", "expected " + std::to_string(expected_rows) + " rows for " +
                                         std::to_string(units.size()) + " units x " +
                                         std::to_string(n_members) + " members, got " +
                                         std::to_string(table.size()));

    PredictionTensor t;
    t.n_classes_ = n_classes;
    t.n_members_ = n_members;
    t.values_.resize(expected_rows * static_cast<std::size_t>(n_classes));

    for (std::size_t r = 0; r < table.size(); ++r) {
        const std::vector<double>& in = table[r];
        double* out = t.values_.data() + r * static_cast<std::size_t>(n_classes);
        std::string where = "row " + std::to_string(r);

        if (in.size() == 1 && n_classes == 2) {
            // binary shorthand: p(class 1) expands to (1-p, p)
            double p = in[0];
            if (!std::isfinite(p) || p < 0.0)
                throw Error("NegativeProbability", "probability " + std::to_string(p) + " at " + where);
            if (p > 1.0)
                throw Error("RowNotSimplex", "binary probability " + std::to_string(p) + " > 1 at " + where);
            out[0] = 1.0 - p;
            out[1] = p;
        } else {
            if (static_cast<int>(in.size()) != n_classes)
                throw Error("ShapeMismatch", where + " has " + std::to_string(in.size()) +
                                                 " columns, expected " + std::to_string(n_classes));
            double sum = 0.0;
            for (double v : in) {
                if (!std::isfinite(v) || v < 0.0)
                    throw Error("NegativeProbability", "probability " + std::to_string(v) + " at " + where);
                sum += v;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw Error("RowNotSimplex",
                            where + " sums to " + std::to_string(sum) + ", must be 1 within 1e-6");
            for (int j = 0; j < n_classes; ++j) out[j] = in[static_cast<std::size_t>(j)];
        }
        normalize_simplex_row({out, static_cast<std::size_t>(n_classes)});
    }

    for (std::size_t u = 0; u < units.size(); ++u) {
        if (units[u].element_id < 0)
            throw Error("ShapeMismatch", "negative element_id for unit " + units[u].str());
        if (!t.index_.emplace(units[u], u).second)
            throw Error("DuplicateUnit", "duplicate unit " + units[u].str());
    }
    t.units_ = std::move(units);
    return t;
}

std::vector<double> validate_soft_label(std::vector<double> v, int n_classes, const UnitRef& unit) {
    if (static_cast<int>(v.size()) != n_classes)
        throw Error("ShapeMismatch", "soft label for " + unit.str() + " has " +
                                         std::to_string(v.size()) + " entries, expected " +
                                         std::to_string(n_classes));
    double sum = 0.0;
    for (double p : v) {
        if (!std::isfinite(p) || p < 0.0)
            throw Error("NegativeProbability", "soft label entry " + std::to_string(p) + " for " + unit.str());
        if (p > 1.0 + 1e-9)
            throw Error("RowNotSimplex", "soft label entry " + std::to_string(p) + " > 1 for " + unit.str());
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error("RowNotSimplex", "soft label for " + unit.str() + " sums to " + std::to_string(sum));
    normalize_simplex_row(v);
    return v;
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    // Box-Muller; u clamped away from 0 so log stays finite.
    double u = uniform();
    if (u <= 0.0) u = 0x1.0p-53;
    double v = uniform();
    double radius = std::sqrt(-2.0 * std::log(u));
    double angle = 2.0 * 3.141592653589793238462643383279502884 * v;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
    if (n == 0) throw Error("ShapeMismatch", "Rng::below(0)");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

void Rng::shuffle(std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(below(i));
        std::swap(idx[i - 1], idx[j]);
    }
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t Rng::derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

}  // namespace uqkit
