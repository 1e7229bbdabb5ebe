#include "reflect/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace reflect {

namespace {

Scalar param(const ParameterMap& params, const ParameterMap& defaults, const std::string& key) {
    if (auto it = params.find(key); it != params.end()) return it->second;
    return defaults.at(key);
}

void reject_unknown(const std::string& name, const ParameterMap& params,
                    const ParameterMap& defaults) {
    for (const auto& [key, value] : params) {
        if (!defaults.contains(key)) {
            throw std::invalid_argument("catalog entry '" + name + "' has no parameter '" + key +
                                        "'");
        }
        if (!std::isfinite(value)) {
            throw std::invalid_argument("parameter '" + key + "' of '" + name +
                                        "' must be finite");
        }
    }
}

std::string describe(const Vector& x) {
    std::ostringstream out;
    out << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) out << (i ? ", " : "") << x(i);
    out << ")";
    return out.str();
}

void uniform_point(std::mt19937_64& rng, Scalar radius, Vector& x) {
    std::uniform_real_distribution<Scalar> u(-radius, radius);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = u(rng);
}

}  // namespace

Matrix CoefficientField::sigma_at(Scalar t, ConstVectorRef x) const {
    Matrix s = Matrix::Zero(dim, dim);
    sigma(t, x, s);
    return s;
}

Vector CoefficientField::drift_at(Scalar t, ConstVectorRef x) const {
    Vector b = Vector::Zero(dim);
    drift(t, x, b);
    return b;
}

bool CatalogEntry::has_tag(CoefficientTag tag) const {
    return std::find(tags.begin(), tags.end(), tag) != tags.end();
}

const std::map<std::string, ParameterMap>& catalog_defaults() {
    static const std::map<std::string, ParameterMap> defaults{
        {"ou1d", {{"kappa", 1.0}, {"sigma0", 1.0}}},
        {"gbm-box", {{"sigma0", 0.3}, {"mu", 0.1}, {"clip", 10.0}, {"dim", 1.0}}},
        {"quadrant2d", {{"coupling", 0.1}, {"drift", 0.5}, {"center", 1.0}}},
        {"schmidt1d", {{"low", 1.0}, {"high", 2.0}, {"threshold", 1.0}}},
    };
    return defaults;
}

CatalogEntry make_catalog_entry(const std::string& name, const ParameterMap& params) {
    const auto& all = catalog_defaults();
    const auto found = all.find(name);
    if (found == all.end()) throw std::invalid_argument("unknown coefficient catalog entry '" + name + "'");
    const ParameterMap& defaults = found->second;
    reject_unknown(name, params, defaults);

    CatalogEntry entry;
    entry.name = name;
    CoefficientField& f = entry.field;
    f.name = name;

    if (name == "ou1d") {
        // dX = sigma0 dW - kappa X dt
        const Scalar kappa = param(params, defaults, "kappa");
        const Scalar sigma0 = param(params, defaults, "sigma0");
        f.dim = 1;
        f.sigma = [sigma0](Scalar, ConstVectorRef, MatrixRef s) { s(0, 0) = sigma0; };
        f.drift = [kappa](Scalar, ConstVectorRef x, VectorRef b) { b(0) = -kappa * x(0); };
        f.declared_lipschitz_L = kappa * kappa;
        f.declared_growth_C = std::max(sigma0 * sigma0, kappa * kappa);
        entry.tags = {CoefficientTag::Lipschitz};
    } else if (name == "gbm-box") {
        // sigma = diag(sigma0 * clip(x_i)), b = mu x
        const Scalar sigma0 = param(params, defaults, "sigma0");
        const Scalar mu = param(params, defaults, "mu");
        const Scalar clip = param(params, defaults, "clip");
        const Scalar dim_param = param(params, defaults, "dim");
        if (dim_param < 1.0 || dim_param != std::floor(dim_param)) {
            throw std::invalid_argument("gbm-box 'dim' must be a positive integer");
        }
        if (!(clip > 0.0)) throw std::invalid_argument("gbm-box 'clip' must be positive");
        f.dim = static_cast<Eigen::Index>(dim_param);
        f.sigma = [sigma0, clip](Scalar, ConstVectorRef x, MatrixRef s) {
            s.setZero();
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                s(i, i) = sigma0 * std::clamp(x(i), -clip, clip);
            }
        };
        f.drift = [mu](Scalar, ConstVectorRef x, VectorRef b) { b = mu * x; };
        f.declared_lipschitz_L = sigma0 * sigma0 + mu * mu;
        f.declared_growth_C = sigma0 * sigma0 + mu * mu;
        entry.tags = {CoefficientTag::Lipschitz, CoefficientTag::Degenerate};
    } else if (name == "quadrant2d") {
        // sigma = I + coupling * [[0, sin x2], [sin x1, 0]],
        // b_i = -drift * tanh(x_i - center)
        const Scalar coupling = param(params, defaults, "coupling");
        const Scalar drift = param(params, defaults, "drift");
        const Scalar center = param(params, defaults, "center");
        f.dim = 2;
        f.sigma = [coupling](Scalar, ConstVectorRef x, MatrixRef s) {
            s(0, 0) = 1.0;
            s(0, 1) = coupling * std::sin(x(1));
            s(1, 0) = coupling * std::sin(x(0));
            s(1, 1) = 1.0;
        };
        f.drift = [drift, center](Scalar, ConstVectorRef x, VectorRef b) {
            b(0) = -drift * std::tanh(x(0) - center);
            b(1) = -drift * std::tanh(x(1) - center);
        };
        f.declared_lipschitz_L = coupling * coupling + drift * drift;
        f.declared_growth_C = 2.0 + 2.0 * coupling * coupling + 2.0 * drift * drift;
        entry.tags = {CoefficientTag::Lipschitz};
    } else {
        // schmidt1d: b = 0, sigma = low below threshold, high at or above it
        const Scalar low = param(params, defaults, "low");
        const Scalar high = param(params, defaults, "high");
        const Scalar threshold = param(params, defaults, "threshold");
        f.dim = 1;
        f.sigma = [low, high, threshold](Scalar, ConstVectorRef x, MatrixRef s) {
            s(0, 0) = x(0) < threshold ? low : high;
        };
        f.drift = [](Scalar, ConstVectorRef, VectorRef b) { b(0) = 0.0; };
        f.declared_growth_C = std::max(low * low, high * high);
        entry.tags = {CoefficientTag::Discontinuous};
    }
    entry.reference_dim = f.dim;
    return entry;
}

CoefficientField constant_field(Matrix sigma, Vector drift, std::string name) {
    if (sigma.rows() != sigma.cols() || sigma.rows() != drift.size()) {
        throw DimensionError("constant_field: sigma must be d x d and drift of length d");
    }
    CoefficientField f;
    f.name = std::move(name);
    f.dim = drift.size();
    f.sigma = [sigma](Scalar, ConstVectorRef, MatrixRef s) { s = sigma; };
    f.drift = [drift](Scalar, ConstVectorRef, VectorRef b) { b = drift; };
    f.declared_lipschitz_L = 0.0;
    f.declared_growth_C = sigma.squaredNorm() + drift.squaredNorm();
    return f;
}

GrowthReport check_linear_growth(const CoefficientField& f, Scalar C, const SamplingBox& box) {
    if (!(C > 0.0)) throw std::invalid_argument("growth constant must be positive");
    if (box.samples == 0) throw std::invalid_argument("at least one sample is required");
    std::mt19937_64 rng(box.rng_seed);
    std::uniform_real_distribution<Scalar> time(0.0, box.horizon);
    Vector x(f.dim);
    Matrix s(f.dim, f.dim);
    Vector b(f.dim);
    GrowthReport report;
    Vector worst_x;
    Scalar worst_t = 0.0;
    for (std::size_t k = 0; k < box.samples; ++k) {
        const Scalar t = time(rng);
        uniform_point(rng, box.box_radius, x);
        s.setZero();
        b.setZero();
        f.sigma(t, x, s);
        f.drift(t, x, b);
        if (!s.allFinite() || !b.allFinite()) {
            throw NumericalError("coefficient '" + f.name + "' is not finite at x = " + describe(x));
        }
        const Scalar ratio = (s.squaredNorm() + b.squaredNorm()) / (1.0 + x.squaredNorm());
        if (ratio > report.max_ratio || k == 0) {
            report.max_ratio = ratio;
            worst_x = x;
            worst_t = t;
        }
    }
    report.pass = report.max_ratio <= C * (1.0 + 1e-9);
    if (!report.pass) {
        report.violating_point = worst_x;
        report.violating_time = worst_t;
    }
    return report;
}

LipschitzReport check_lipschitz(const CoefficientField& f, Scalar L, const SamplingBox& box) {
    if (!(L >= 0.0)) throw std::invalid_argument("Lipschitz constant must be nonnegative");
    if (box.samples == 0) throw std::invalid_argument("at least one sample is required");
    std::mt19937_64 rng(box.rng_seed);
    std::uniform_real_distribution<Scalar> time(0.0, box.horizon);
    std::uniform_real_distribution<Scalar> log_scale(std::log(1e-6), 0.0);
    std::normal_distribution<Scalar> gauss;
    Vector x(f.dim), y(f.dim), dir(f.dim);
    Matrix sx(f.dim, f.dim), sy(f.dim, f.dim);
    Vector bx(f.dim), by(f.dim);
    LipschitzReport report;
    std::pair<Vector, Vector> worst;
    Scalar worst_excess = 0.0;
    for (std::size_t k = 0; k < box.samples; ++k) {
        const Scalar t = time(rng);
        uniform_point(rng, box.box_radius, x);
        if (k % 2 == 0) {
            uniform_point(rng, box.box_radius, y);
        } else {
            // Local pair at a log-uniform separation; catches jumps that
            // uniform pairs almost never straddle closely.
            for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = gauss(rng);
            const Scalar sep = box.box_radius * std::exp(log_scale(rng));
            y = x + sep * dir.normalized();
        }
        const Scalar gap = (x - y).squaredNorm();
        if (gap == 0.0) continue;
        sx.setZero();
        sy.setZero();
        bx.setZero();
        by.setZero();
        f.sigma(t, x, sx);
        f.sigma(t, y, sy);
        f.drift(t, x, bx);
        f.drift(t, y, by);
        if (!sx.allFinite() || !bx.allFinite()) {
            throw NumericalError("coefficient '" + f.name + "' is not finite at x = " + describe(x));
        }
        if (!sy.allFinite() || !by.allFinite()) {
            throw NumericalError("coefficient '" + f.name + "' is not finite at x = " + describe(y));
        }
        const Scalar numerator = (sx - sy).squaredNorm() + (bx - by).squaredNorm();
        const Scalar quotient = numerator / gap;
        if (quotient > report.max_quotient || worst.first.size() == 0) {
            report.max_quotient = quotient;
        }
        // Differences of nearby values lose absolute precision eps * |f|, which
        // dominates the quotient at tiny separations.
        const Scalar rounding = 8.0 * std::numeric_limits<Scalar>::epsilon() *
                                (sx.norm() + sy.norm() + bx.norm() + by.norm() +
                                 std::sqrt(L) * (x.norm() + y.norm()));
        const Scalar excess = std::sqrt(numerator) - std::sqrt(L * gap) * (1.0 + 1e-9) - rounding;
        if (excess > worst_excess) {
            worst_excess = excess;
            worst = {x, y};
        }
    }
    report.pass = worst_excess <= 0.0;
    if (!report.pass) report.violating_pair = worst;
    return report;
}

}  // namespace reflect
