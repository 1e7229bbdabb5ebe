#include "reflect/penalized.hpp"

#include "step_kernel.hpp"

#include <cmath>
#include <sstream>

namespace reflect {

namespace {

PenalizedTrajectory make_trajectory(const BrownianPath& path, ConstVectorRef x0,
                                    PenaltyScheme scheme, Scalar level) {
    const Eigen::Index rows = path.grid.steps() + 1;
    PenalizedTrajectory traj{path.grid, RowMatrix(rows, x0.size()),
                             RowMatrix::Zero(rows, x0.size()), 0.0, scheme, level};
    traj.states.row(0) = x0.transpose();
    return traj;
}

void require_level(Scalar level) {
    if (!(level > 0.0) || !std::isfinite(level)) {
        throw std::invalid_argument("penalization level must be positive and finite");
    }
}

// X_{k+1} = pre - n h (X_k - Pi(X_k)); leaves the penalty increment in buf.proj
template <int Dim>
inline void euler_update(Scalar pull, detail::StepBuffers<Dim>& buf) {
    buf.proj -= buf.x;
    buf.proj *= pull;
    buf.x = buf.pre + buf.proj;
}

template <int Dim, class Vec>
inline void splitting_update(const ConvexDomain& domain, Scalar decay, int substeps,
                             detail::StepBuffers<Dim>& buf, Vec& y) {
    y = buf.pre;
    for (int j = 0; j < substeps; ++j) {
        project_into(domain, y, buf.proj);
        y = buf.proj + decay * (y - buf.proj);
    }
    buf.x = y;
}

template <int Dim>
void run_euler(const ConvexDomain& domain, const CoefficientField& coeffs,
               const BrownianPath& path, PenalizedTrajectory& traj) {
    const Scalar h = path.grid.step();
    const Scalar pull = traj.level * h;
    detail::StepBuffers<Dim> buf(coeffs.dim);
    buf.x = traj.states.row(0).transpose();
    Scalar max_dist = 0.0;
    for (Eigen::Index k = 0; k < path.grid.steps(); ++k) {
        project_into(domain, buf.x, buf.proj);
        max_dist = std::max(max_dist, (buf.x - buf.proj).norm());
        detail::diffusion_step(coeffs, path, k, buf);
        // penalty increment -n h (X_k - Pi(X_k)), exactly zero inside
        euler_update(pull, buf);
        detail::require_finite(buf.x, k, "euler_penalized");
        traj.states.row(k + 1) = buf.x.transpose();
        traj.penalty.row(k + 1) = traj.penalty.row(k) + buf.proj.transpose();
    }
    project_into(domain, buf.x, buf.proj);
    traj.max_dist = std::max(max_dist, (buf.x - buf.proj).norm());
}

template <int Dim>
void run_splitting(const ConvexDomain& domain, const CoefficientField& coeffs,
                   const BrownianPath& path, int substeps, PenalizedTrajectory& traj) {
    const Scalar decay = std::exp(-traj.level * path.grid.step() / substeps);
    detail::StepBuffers<Dim> buf(coeffs.dim);
    typename detail::StepBuffers<Dim>::Vec y(coeffs.dim);
    buf.x = traj.states.row(0).transpose();
    Scalar max_dist = 0.0;
    for (Eigen::Index k = 0; k < path.grid.steps(); ++k) {
        detail::diffusion_step(coeffs, path, k, buf);
        detail::require_finite(buf.pre, k, "splitting_penalized");
        splitting_update(domain, decay, substeps, buf, y);
        project_into(domain, buf.x, buf.proj);
        max_dist = std::max(max_dist, (buf.x - buf.proj).norm());
        traj.states.row(k + 1) = buf.x.transpose();
        traj.penalty.row(k + 1) = traj.penalty.row(k) + (buf.x - buf.pre).transpose();
    }
    // X_0 lies in the domain, so its distance contributes nothing
    traj.max_dist = max_dist;
}

}  // namespace

std::string to_string(PenaltyScheme scheme) {
    return scheme == PenaltyScheme::Euler ? "euler" : "splitting";
}

PenaltyScheme parse_penalty_scheme(const std::string& name) {
    if (name == "euler") return PenaltyScheme::Euler;
    if (name == "splitting") return PenaltyScheme::Splitting;
    throw std::invalid_argument("unknown penalization scheme '" + name + "'");
}

Scalar PenalizedTrajectory::penalty_variation() const {
    Scalar total = 0.0;
    for (Eigen::Index k = 1; k < penalty.rows(); ++k) {
        total += (penalty.row(k) - penalty.row(k - 1)).norm();
    }
    return total;
}

PenalizedTrajectory euler_penalized(const ConvexDomain& domain, const CoefficientField& coeffs,
                                    const BrownianPath& path, ConstVectorRef x0, Scalar level) {
    require_level(level);
    detail::require_compatible(domain, coeffs, path, x0);
    const Scalar nh = level * path.grid.step();
    if (nh > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "euler_penalized is unstable for n h = " << nh << " > 1 (n = " << level
            << ", h = " << path.grid.step() << "); refine the grid or use the splitting scheme";
        throw std::invalid_argument(msg.str());
    }
    auto traj = make_trajectory(path, x0, PenaltyScheme::Euler, level);
    detail::dispatch_dim(coeffs.dim, [&](auto dim) {
        run_euler<decltype(dim)::value>(domain, coeffs, path, traj);
    });
    return traj;
}

Vector relax(const ConvexDomain& domain, ConstVectorRef x, Scalar level, Scalar duration) {
    if (!(duration >= 0.0)) throw std::invalid_argument("relaxation duration must be >= 0");
    if (!(level >= 0.0)) throw std::invalid_argument("penalization level must be >= 0");
    const Vector anchor = project(domain, x);
    return anchor + (x - anchor) * std::exp(-level * duration);
}

PenalizedTrajectory splitting_penalized(const ConvexDomain& domain,
                                        const CoefficientField& coeffs, const BrownianPath& path,
                                        ConstVectorRef x0, Scalar level, int substeps) {
    require_level(level);
    if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
    detail::require_compatible(domain, coeffs, path, x0);
    auto traj = make_trajectory(path, x0, PenaltyScheme::Splitting, level);
    detail::dispatch_dim(coeffs.dim, [&](auto dim) {
        run_splitting<decltype(dim)::value>(domain, coeffs, path, substeps, traj);
    });
    return traj;
}

PenalizedTrajectory integrate_penalized(PenaltyScheme scheme, const ConvexDomain& domain,
                                        const CoefficientField& coeffs, const BrownianPath& path,
                                        ConstVectorRef x0, Scalar level, int substeps) {
    if (scheme == PenaltyScheme::Euler) return euler_penalized(domain, coeffs, path, x0, level);
    return splitting_penalized(domain, coeffs, path, x0, level, substeps);
}

Vector euler_penalized_step(const ConvexDomain& domain, const CoefficientField& coeffs,
                            ConstVectorRef x, Scalar t, ConstVectorRef dw, Scalar h,
                            Scalar level) {
    detail::StepBuffers<Eigen::Dynamic> buf(coeffs.dim);
    buf.x = x;
    detail::diffusion_step_at(coeffs, t, h, dw, buf);
    project_into(domain, buf.x, buf.proj);
    euler_update(level * h, buf);
    return buf.x;
}

Vector splitting_penalized_step(const ConvexDomain& domain, const CoefficientField& coeffs,
                                ConstVectorRef x, Scalar t, ConstVectorRef dw, Scalar h,
                                Scalar level, int substeps) {
    if (substeps < 1) throw std::invalid_argument("substeps must be at least 1");
    detail::StepBuffers<Eigen::Dynamic> buf(coeffs.dim);
    Vector y(coeffs.dim);
    buf.x = x;
    detail::diffusion_step_at(coeffs, t, h, dw, buf);
    splitting_update(domain, std::exp(-level * h / substeps), substeps, buf, y);
    return buf.x;
}

Scalar boundary_distance_stats(const PenalizedTrajectory& traj, Scalar p) {
    if (!(p >= 1.0)) throw std::invalid_argument("moment order p must be >= 1");
    return std::pow(traj.max_dist, p);
}

}  // namespace reflect
