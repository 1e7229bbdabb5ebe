#pragma once

#include "reflect/brownian.hpp"
#include "reflect/coefficients.hpp"
#include "reflect/geometry.hpp"

#include <string>

namespace reflect {

enum class PenaltyScheme { Euler, Splitting };

std::string to_string(PenaltyScheme scheme);
PenaltyScheme parse_penalty_scheme(const std::string& name);

/// Discrete path of the penalized SDE
///     dX = sigma dW + b dt - n (X - Pi(X)) dt
/// with K the cumulative penalty term, K_0 = 0.
struct PenalizedTrajectory {
    TimeGrid grid;
    RowMatrix states;   // (M+1) x d
    RowMatrix penalty;  // (M+1) x d
    Scalar max_dist = 0.0;
    PenaltyScheme scheme = PenaltyScheme::Splitting;
    Scalar level = 0.0;

    /// sum of |K_{k+1} - K_k|
    Scalar penalty_variation() const;
};

/// Raised when an integrator produces a non-finite state.
class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, Eigen::Index step)
        : NumericalError(what), step_(step) {}
    Eigen::Index step() const noexcept { return step_; }

private:
    Eigen::Index step_;
};

/// Explicit Euler-Maruyama on the penalized equation. Requires n h <= 1;
/// a violated guard throws std::invalid_argument rather than clamping.
PenalizedTrajectory euler_penalized(const ConvexDomain& domain, const CoefficientField& coeffs,
                                    const BrownianPath& path, ConstVectorRef x0, Scalar level);

/// Exact flow of y' = -n (y - Pi(x)) with the projection frozen at x:
/// Pi(x) + (x - Pi(x)) e^{-n s}.
Vector relax(const ConvexDomain& domain, ConstVectorRef x, Scalar level, Scalar duration);

/// Per step: Euler diffusion sub-step, then the frozen-projection relaxation
/// applied substeps times over h / substeps each, re-projecting in between.
/// Unconditionally stable in n h.
PenalizedTrajectory splitting_penalized(const ConvexDomain& domain,
                                        const CoefficientField& coeffs, const BrownianPath& path,
                                        ConstVectorRef x0, Scalar level, int substeps = 1);

PenalizedTrajectory integrate_penalized(PenaltyScheme scheme, const ConvexDomain& domain,
                                        const CoefficientField& coeffs, const BrownianPath& path,
                                        ConstVectorRef x0, Scalar level, int substeps = 1);

/// Single steps of the two schemes from an arbitrary state x (which need not
/// lie in the domain) with Brownian increment dw.
Vector euler_penalized_step(const ConvexDomain& domain, const CoefficientField& coeffs,
                            ConstVectorRef x, Scalar t, ConstVectorRef dw, Scalar h,
                            Scalar level);
Vector splitting_penalized_step(const ConvexDomain& domain, const CoefficientField& coeffs,
                                ConstVectorRef x, Scalar t, ConstVectorRef dw, Scalar h,
                                Scalar level, int substeps = 1);

/// (max over the grid of dist(X_t, D))^p for one trajectory.
Scalar boundary_distance_stats(const PenalizedTrajectory& traj, Scalar p);

/// Largest n with n h <= 1 on this grid, the Euler stability limit.
inline Scalar euler_level_limit(const TimeGrid& grid) { return 1.0 / grid.step(); }

}  // namespace reflect
