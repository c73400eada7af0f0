#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uqkit/core.hpp"

namespace uqkit {

// Per-unit uncertainty components. tu == eu + au for unweighted records;
// single_model records carry only tu (has_components is false).
struct UncertaintyRecord {
    UnitRef unit;
    double eu = 0.0;
    double au = 0.0;
    double tu = 0.0;
    bool has_components = true;
    std::vector<double> eu_per_class;  // empty when not computed
    std::vector<double> au_per_class;
    std::string method_tag;
};

struct WeightSpec {
    double alpha = 0.5;
};

struct SquareMatrix {
    int n = 0;
    std::vector<double> a;  // row-major n x n

    explicit SquareMatrix(int size = 0) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
    double trace() const;
};

// Epistemic and aleatoric covariance estimates for one unit.
struct CovarianceComponents {
    SquareMatrix eu_matrix;
    SquareMatrix au_matrix;
};

struct EntropyMi {
    double tu_entropy = 0.0;
    double au_entropy = 0.0;
    double eu_mi = 0.0;
};

enum class Method { total_variance, prediction_variance, entropy_mi, single_model };
enum class Reduction { trace, det };

Method method_from_string(const std::string& name);
std::string method_name(Method m);

// Variance decomposition of one unit's K x N ensemble rows. Per class j:
// EU_j = (1/K) sum_i (p_ij - pbar_j)^2, AU_j = (1/K) sum_i p_ij (1 - p_ij);
// totals are sums over classes. Population normalization throughout: the
// exact identity EU_j + AU_j = pbar_j (1 - pbar_j) depends on it.
UncertaintyRecord decompose_unit(std::span<const double> rows, int n_members, int n_classes);

// Full covariance forms: eu = (1/K) sum (p_i - pbar)(p_i - pbar)^T,
// au = (1/K) sum (diag(p_i) - p_i p_i^T).
CovarianceComponents covariance_components(std::span<const double> rows, int n_members, int n_classes);

// trace or det of a symmetric covariance matrix; det of a singular matrix
// is 0, not an error (near-deterministic predictions legitimately have
// singular covariance).
double reduce_covariance(const SquareMatrix& m, Reduction mode);

// TU = 2 [alpha EU + (1 - alpha) AU]; reduces to EU + AU at alpha = 0.5.
double weighted_total(double eu, double au, const WeightSpec& spec);

// Entropy baseline, natural log, 0 log 0 := 0. tu = H(pbar),
// au = (1/K) sum H(p_i), eu = tu - au (mutual information, >= 0 by Jensen;
// values in [-1e-12, 0) clamp to 0, anything more negative is a logic error).
EntropyMi entropy_mi(std::span<const double> rows, int n_members, int n_classes);

// Dataset-level decomposition. single_model requires K = 1 unless member
// selects an explicit ensemble member. A WeightSpec reweights tu for
// component-bearing methods; eu/au stay raw.
std::vector<UncertaintyRecord> decompose_dataset(const PredictionTensor& tensor, Method method,
                                                 std::optional<WeightSpec> weight = std::nullopt,
                                                 std::optional<int> member = std::nullopt);

// Expert-informed total variance: EU from the base ensemble (eq. epistemic),
// AU from the expert soft label treated as a single-member prediction
// (eq. aleatoric with K = 1). Soft labels must cover every tensor unit.
std::vector<UncertaintyRecord> expert_informed_records(const PredictionTensor& base,
                                                       const SoftLabelSet& soft,
                                                       std::optional<WeightSpec> weight = std::nullopt);

}  // namespace uqkit
