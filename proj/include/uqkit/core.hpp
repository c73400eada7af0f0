#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace uqkit {

// Library error with a stable machine-readable code. The CLI surfaces these
// as {code, message, context} JSON on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message, std::string context = "")
        : std::runtime_error(message), code_(std::move(code)), context_(std::move(context)) {}

    const std::string& code() const { return code_; }
    const std::string& context() const { return context_; }

private:
    std::string code_;
    std::string context_;
};

// Identifies one evaluation unit: a whole sample (element_id 0) or a pixel
// of a sample (element_id = pixel index).
struct UnitRef {
    std::string sample_id;
    std::int64_t element_id = 0;

    friend bool operator==(const UnitRef&, const UnitRef&) = default;
    std::string str() const { return sample_id + "#" + std::to_string(element_id); }
};

struct UnitRefHash {
    std::size_t operator()(const UnitRef& u) const {
        std::size_t h = std::hash<std::string>{}(u.sample_id);
        std::size_t e = std::hash<std::int64_t>{}(u.element_id);
        return h ^ (e + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

// Insertion-ordered unit -> value map. File order is the canonical unit
// order everywhere (rejection-curve tie-breaks depend on it), so iteration
// follows insertion, with an index for O(1) lookup.
template <class T>
class UnitMap {
public:
    void insert(UnitRef unit, T value) {
        if (index_.count(unit) > 0)
            throw Error("DuplicateUnit", "duplicate unit " + unit.str());
        index_.emplace(unit, items_.size());
        items_.emplace_back(std::move(unit), std::move(value));
    }

    const T* find(const UnitRef& unit) const {
        auto it = index_.find(unit);
        return it == index_.end() ? nullptr : &items_[it->second].second;
    }

    const T& at(const UnitRef& unit) const {
        const T* v = find(unit);
        if (v == nullptr) throw Error("UnknownUnit", "no entry for unit " + unit.str());
        return *v;
    }

    bool contains(const UnitRef& unit) const { return index_.count(unit) > 0; }
    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    const std::pair<UnitRef, T>& operator[](std::size_t i) const { return items_[i]; }

private:
    std::vector<std::pair<UnitRef, T>> items_;
    std::unordered_map<UnitRef, std::size_t, UnitRefHash> index_;
};

using HardLabelSet = UnitMap<int>;
using SoftLabelSet = UnitMap<std::vector<double>>;
using ScoreMap = UnitMap<double>;

// Validated per-unit, per-member class probabilities, indexed
// (unit, member, class) row-major. Rows are exact simplex rows after
// validation. Immutable once constructed.
class PredictionTensor {
public:
    int n_units() const { return static_cast<int>(units_.size()); }
    int n_members() const { return n_members_; }
    int n_classes() const { return n_classes_; }

    const std::vector<UnitRef>& units() const { return units_; }
    const UnitRef& unit(int u) const { return units_[static_cast<std::size_t>(u)]; }

    std::span<const double> row(int u, int k) const {
        std::size_t off = (static_cast<std::size_t>(u) * n_members_ + k) * n_classes_;
        return {values_.data() + off, static_cast<std::size_t>(n_classes_)};
    }

    // All K rows of one unit, row-major K x N.
    std::span<const double> unit_rows(int u) const {
        std::size_t off = static_cast<std::size_t>(u) * n_members_ * n_classes_;
        return {values_.data() + off, static_cast<std::size_t>(n_members_) * n_classes_};
    }

    double at(int u, int k, int j) const { return row(u, k)[static_cast<std::size_t>(j)]; }

    int unit_index(const UnitRef& ref) const {
        auto it = index_.find(ref);
        return it == index_.end() ? -1 : static_cast<int>(it->second);
    }

    const std::vector<double>& values() const { return values_; }

    friend PredictionTensor validate_predictions(std::vector<UnitRef> units,
                                                 const std::vector<std::vector<double>>& table,
                                                 int n_classes, int n_members);

private:
    PredictionTensor() = default;
    std::vector<UnitRef> units_;
    std::vector<double> values_;
    std::unordered_map<UnitRef, std::size_t, UnitRefHash> index_;
    int n_members_ = 0;
    int n_classes_ = 0;
};

// Builds a validated tensor from a raw table with one row per (unit, member),
// unit-major. A single-column table with n_classes == 2 is the binary
// shorthand p(class 1) and expands to (1-p, p). Accepted rows are
// renormalized so downstream identities hold at 1e-12.
PredictionTensor validate_predictions(std::vector<UnitRef> units,
                                      const std::vector<std::vector<double>>& table,
                                      int n_classes, int n_members);

// Renormalizes a nonnegative row to an exact simplex row in place.
// Iterates x -> x / sum(x) to a fixed point so that re-validating emitted
// values is a bitwise no-op.
void normalize_simplex_row(std::span<double> row);

// Checks a soft-label vector: length n, entries in [0,1], sum within 1e-9 of
// one. Returns the renormalized vector.
std::vector<double> validate_soft_label(std::vector<double> v, int n_classes,
                                        const UnitRef& unit);

// Feature rows for toy-model training and synthetic scenarios.
struct FeatureMatrix {
    std::vector<UnitRef> units;
    std::vector<double> values;  // row-major n x dim
    int dim = 0;

    std::size_t size() const { return units.size(); }
    std::span<const double> row(std::size_t i) const {
        return {values.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

// Deterministic PRNG: mt19937_64 engine (exactly specified by the standard)
// with explicit output transforms, since std::*_distribution output is
// implementation-defined and would break cross-platform stream identity.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (pairs cached).
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n);

    // Fisher-Yates shuffle.
    void shuffle(std::vector<std::size_t>& idx);

    // Independent stream id derived from (seed, a, b) by splitmix64 mixing.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace uqkit
