#pragma once

#include "reflect/brownian.hpp"
#include "reflect/penalized.hpp"
#include "reflect/reflected.hpp"
#include "reflect/sweep.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reflect {

enum class Regressor {
    LogLnNOverN,  // log((ln n) / n)
    LogInvN,      // log(1 / n)
};

std::string to_string(Regressor regressor);
Scalar regressor_value(Regressor regressor, Scalar level);

struct ErrorRow {
    Scalar level = 0.0;
    std::size_t num_paths = 0;
    Scalar h_fine = 0.0;
    Scalar p = 2.0;
    Scalar value = 0.0;
    Scalar std_error = 0.0;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;

    /// Levels strictly increasing, values nonnegative, standard errors finite.
    void validate() const;
};

/// Closed interval [lower, upper]; no upper bound when upper is empty.
struct SlopeBand {
    Scalar lower = 0.0;
    std::optional<Scalar> upper;

    bool contains(Scalar slope) const {
        return slope >= lower && (!upper || slope <= *upper);
    }
};

struct RateReport {
    ErrorTable table;
    Regressor regressor = Regressor::LogLnNOverN;
    Scalar slope = 0.0;
    Scalar intercept = 0.0;
    Scalar residual = 0.0;  // Euclidean norm of the fit residuals
    std::size_t rows_used = 0;
    std::optional<SlopeBand> band;
    bool pass = true;  // band contains slope (true when no band is set)
};

/// Least squares fit of log(error) = slope * log(regressor(n)) + intercept.
/// Needs at least four rows, all with positive error.
RateReport fit_rate(const ErrorTable& table, Regressor regressor,
                    std::optional<SlopeBand> band = std::nullopt);

/// Monte Carlo L^p norm (E S^p)^{1/p} from per-path values S^p, with a
/// delta-method standard error. The root is biased; the bias is accepted.
struct PooledNorm {
    Scalar value = 0.0;
    Scalar std_error = 0.0;
};
PooledNorm pooled_norm(std::span<const Scalar> per_path_powers, Scalar p);

/// (max over rows of |a_k - b_k|)^p; both arrays on the same grid.
Scalar lp_sup_error(const RowMatrix& reference, const RowMatrix& approx, Scalar p);

/// Same, after restricting the finer of the two trajectories to the coarser
/// dyadic grid.
Scalar lp_sup_error(const ReflectedTrajectory& reference, const PenalizedTrajectory& approx,
                    Scalar p);

bool strictly_decreasing(const ErrorTable& table);

/// Decreasing up to Monte Carlo noise: no step increases by more than
/// sigmas combined standard errors.
bool decreasing_within_noise(const ErrorTable& table, Scalar sigmas = 2.0);

/// max |x_t - x_s| over grid pairs with |t - s| <= delta and s, t <= horizon.
Scalar modulus_of_continuity(const RowMatrix& values, Scalar step, Scalar delta, Scalar horizon);

/// Two-sample Kolmogorov-Smirnov distance sup_x |F_a(x) - F_b(x)|.
Scalar ks_distance(std::vector<Scalar> a, std::vector<Scalar> b);

enum class WeakFunctional { Mean, SecondMoment, CdfDistance };

std::string to_string(WeakFunctional functional);
WeakFunctional parse_weak_functional(const std::string& name);

struct WeakRow {
    Scalar level = 0.0;
    Scalar approx = 0.0;     // functional of X^n_T (|mean| for Mean when d > 1)
    Scalar reference = 0.0;  // functional of X_T
    Scalar distance = 0.0;
    Scalar std_error = 0.0;
};

/// Compares the law of X^n_T with the reference X_T through one functional,
/// per level. CDF distance needs d = 1.
std::vector<WeakRow> weak_compare(const SweepSpec& spec, WeakFunctional functional);

/// Same comparison from an already computed sweep.
std::vector<WeakRow> weak_compare(const SweepSpec& spec, const std::vector<PathSample>& samples,
                                  WeakFunctional functional);

}  // namespace reflect
