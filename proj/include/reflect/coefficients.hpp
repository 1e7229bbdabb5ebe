#pragma once

#include "reflect/geometry.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reflect {

using MatrixRef = Eigen::Ref<Matrix>;

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Time-state coefficient pair (sigma, b) of dX = sigma dW + b dt.
///
/// The callables write into caller-owned storage so integrators can run
/// without allocating per step. Both must be pure: they are invoked
/// concurrently from worker threads.
struct CoefficientField {
    using SigmaFn = std::function<void(Scalar t, ConstVectorRef x, MatrixRef sigma)>;
    using DriftFn = std::function<void(Scalar t, ConstVectorRef x, VectorRef drift)>;

    std::string name;
    Eigen::Index dim = 1;
    SigmaFn sigma;
    DriftFn drift;
    std::optional<Scalar> declared_growth_C;
    std::optional<Scalar> declared_lipschitz_L;

    Matrix sigma_at(Scalar t, ConstVectorRef x) const;
    Vector drift_at(Scalar t, ConstVectorRef x) const;
};

enum class CoefficientTag { Lipschitz, Discontinuous, Degenerate };

struct CatalogEntry {
    std::string name;
    CoefficientField field;
    std::vector<CoefficientTag> tags;
    Eigen::Index reference_dim = 1;

    bool has_tag(CoefficientTag tag) const;
};

using ParameterMap = std::map<std::string, Scalar>;

/// Builds the named catalog entry with the given parameters; unknown names or
/// parameters raise std::invalid_argument.
CatalogEntry make_catalog_entry(const std::string& name, const ParameterMap& params = {});

/// Names and default parameters of every catalog entry.
const std::map<std::string, ParameterMap>& catalog_defaults();

/// Constant sigma and drift, mostly for tests and degenerate experiments.
CoefficientField constant_field(Matrix sigma, Vector drift, std::string name = "constant");

struct GrowthReport {
    Scalar max_ratio = 0.0;
    std::optional<Vector> violating_point;
    Scalar violating_time = 0.0;
    bool pass = true;
};

struct LipschitzReport {
    Scalar max_quotient = 0.0;
    std::optional<std::pair<Vector, Vector>> violating_pair;
    bool pass = true;
};

struct SamplingBox {
    std::size_t samples = 100'000;
    Scalar box_radius = 10.0;
    Scalar horizon = 1.0;  // t is drawn uniformly from [0, horizon]
    std::uint64_t rng_seed = 0;
};

/// max over sampled (t, x) of (|sigma|_F^2 + |b|^2) / (1 + |x|^2), compared
/// against C with relative slack 1e-9. Throws NumericalError on non-finite
/// coefficient output.
GrowthReport check_linear_growth(const CoefficientField& f, Scalar C, const SamplingBox& box);

/// max over sampled pairs of (|sigma(x)-sigma(y)|_F^2 + |b(x)-b(y)|^2) / |x-y|^2.
/// Half the pairs are local, at separations log-uniform in [1e-6, 1] * radius.
/// A pair fails only beyond the rounding error of the differences.
LipschitzReport check_lipschitz(const CoefficientField& f, Scalar L, const SamplingBox& box);

}  // namespace reflect
