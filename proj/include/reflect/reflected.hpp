#pragma once

#include "reflect/brownian.hpp"
#include "reflect/coefficients.hpp"
#include "reflect/geometry.hpp"

namespace reflect {

/// Discrete solution (X, K) of the Skorokhod problem for a driver Y:
/// X = Y + K, X in the domain, K pushing along inward normals only from the
/// boundary. variation holds the running total variation |K|.
struct ReflectedTrajectory {
    TimeGrid grid;
    RowMatrix states;     // (M+1) x d
    RowMatrix regulator;  // (M+1) x d
    Vector variation;     // M+1, nondecreasing
    RowMatrix driver;     // (M+1) x d, the Y the regulator was built against
};

/// One-sided reflection at a for a scalar driver:
///     X_k = Y_k + max(0, max_{j<=k} (a - Y_j)).
ReflectedTrajectory skorokhod_map_halfline(const TimeGrid& grid, const RowMatrix& driver,
                                           Scalar lower);

/// X_{k+1} = Pi(X_k + sigma(t_k, X_k) dW_k + b(t_k, X_k) h), with the driver
/// accumulated from the same pre-projection increments.
ReflectedTrajectory projected_euler(const ConvexDomain& domain, const CoefficientField& coeffs,
                                    const BrownianPath& path, ConstVectorRef x0);

/// Half-line reference for state-dependent coefficients: the driver increment
/// at step k uses X_k, then the running-maximum map is applied incrementally.
ReflectedTrajectory halfline_map_reference(const CoefficientField& coeffs,
                                           const BrownianPath& path, Scalar x0, Scalar lower);

struct SkorokhodCheckOptions {
    Scalar boundary_tol = 1e-9;
    Scalar flat_tol = 1e-12;
    std::size_t direction_samples = 1000;
    std::uint64_t sample_seed = 7;
    Scalar sample_radius = 2.0;
};

struct SkorokhodReport {
    Scalar containment_violation = 0.0;   // max dist(X_k, D)
    Scalar flatness_violation = 0.0;      // |K| mass accrued away from the boundary
    Scalar direction_violation = 0.0;     // worst -<y - X_k, dK_k / |dK_k|>
    Scalar decomposition_residual = 0.0;  // max |X_k - Y_k - K_k|
};

SkorokhodReport verify_skorokhod(const ConvexDomain& domain, const ReflectedTrajectory& traj,
                                 const RowMatrix& driver,
                                 const SkorokhodCheckOptions& options = {});

}  // namespace reflect
