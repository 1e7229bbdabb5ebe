#include "reflect/reflected.hpp"

#include "step_kernel.hpp"

#include <algorithm>
#include <sstream>

namespace reflect {

namespace {

void fill_variation(ReflectedTrajectory& traj) {
    traj.variation.resize(traj.regulator.rows());
    traj.variation(0) = 0.0;
    for (Eigen::Index k = 1; k < traj.regulator.rows(); ++k) {
        traj.variation(k) =
            traj.variation(k - 1) + (traj.regulator.row(k) - traj.regulator.row(k - 1)).norm();
    }
}

template <int Dim>
void run_projected_euler(const ConvexDomain& domain, const CoefficientField& coeffs,
                         const BrownianPath& path, ReflectedTrajectory& traj) {
    detail::StepBuffers<Dim> buf(coeffs.dim);
    buf.x = traj.states.row(0).transpose();
    for (Eigen::Index k = 0; k < path.grid.steps(); ++k) {
        detail::diffusion_step(coeffs, path, k, buf);
        detail::require_finite(buf.pre, k, "projected_euler");
        project_into(domain, buf.pre, buf.proj);
        traj.driver.row(k + 1) = traj.driver.row(k) + (buf.pre - buf.x).transpose();
        traj.regulator.row(k + 1) = traj.regulator.row(k) + (buf.proj - buf.pre).transpose();
        buf.x = buf.proj;
        traj.states.row(k + 1) = buf.x.transpose();
    }
}

}  // namespace

ReflectedTrajectory skorokhod_map_halfline(const TimeGrid& grid, const RowMatrix& driver,
                                           Scalar lower) {
    if (driver.cols() != 1) throw DimensionError("half-line Skorokhod map needs a scalar driver");
    if (driver.rows() != grid.steps() + 1) {
        throw std::invalid_argument("driver length does not match the time grid");
    }
    if (driver(0, 0) < lower) {
        throw DomainError("driver must start inside the half-line (Y_0 >= a)");
    }
    const Eigen::Index rows = driver.rows();
    ReflectedTrajectory traj{grid, RowMatrix(rows, 1), RowMatrix(rows, 1), Vector(rows), driver};
    Scalar push = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) {
        push = std::max(push, lower - driver(k, 0));
        traj.regulator(k, 0) = push;
        traj.states(k, 0) = driver(k, 0) + push;
    }
    fill_variation(traj);
    return traj;
}

ReflectedTrajectory projected_euler(const ConvexDomain& domain, const CoefficientField& coeffs,
                                    const BrownianPath& path, ConstVectorRef x0) {
    detail::require_compatible(domain, coeffs, path, x0);
    const Eigen::Index rows = path.grid.steps() + 1;
    const Eigen::Index d = x0.size();
    ReflectedTrajectory traj{path.grid, RowMatrix(rows, d), RowMatrix::Zero(rows, d),
                             Vector(rows), RowMatrix(rows, d)};
    traj.states.row(0) = x0.transpose();
    traj.driver.row(0) = x0.transpose();
    detail::dispatch_dim(d, [&](auto dim) {
        run_projected_euler<decltype(dim)::value>(domain, coeffs, path, traj);
    });
    fill_variation(traj);
    return traj;
}

ReflectedTrajectory halfline_map_reference(const CoefficientField& coeffs,
                                           const BrownianPath& path, Scalar x0, Scalar lower) {
    if (coeffs.dim != 1 || path.dim() != 1) {
        throw DimensionError("half-line reference needs one-dimensional coefficients and path");
    }
    if (x0 < lower) throw DomainError("initial point must lie in the half-line");
    const Eigen::Index rows = path.grid.steps() + 1;
    const Scalar h = path.grid.step();
    ReflectedTrajectory traj{path.grid, RowMatrix(rows, 1), RowMatrix(rows, 1), Vector(rows),
                             RowMatrix(rows, 1)};
    Eigen::Matrix<Scalar, 1, 1> x{x0};
    Eigen::Matrix<Scalar, 1, 1> s, b;
    traj.driver(0, 0) = x0;
    traj.states(0, 0) = x0;
    traj.regulator(0, 0) = 0.0;
    Scalar push = 0.0;
    for (Eigen::Index k = 0; k < path.grid.steps(); ++k) {
        const Scalar t = path.grid.time(k);
        coeffs.sigma(t, x, s);
        coeffs.drift(t, x, b);
        const Scalar y = traj.driver(k, 0) + s(0, 0) * path.increments(k, 0) + b(0) * h;
        detail::require_finite(Eigen::Matrix<Scalar, 1, 1>{y}, k, "halfline_map_reference");
        push = std::max(push, lower - y);
        traj.driver(k + 1, 0) = y;
        traj.regulator(k + 1, 0) = push;
        x(0) = y + push;
        traj.states(k + 1, 0) = x(0);
    }
    fill_variation(traj);
    return traj;
}

SkorokhodReport verify_skorokhod(const ConvexDomain& domain, const ReflectedTrajectory& traj,
                                 const RowMatrix& driver, const SkorokhodCheckOptions& options) {
    const Eigen::Index rows = traj.grid.steps() + 1;
    if (traj.states.rows() != rows || traj.regulator.rows() != rows || driver.rows() != rows) {
        std::ostringstream msg;
        msg << "grid mismatch: grid has " << rows << " points, states " << traj.states.rows()
            << ", regulator " << traj.regulator.rows() << ", driver " << driver.rows();
        throw std::invalid_argument(msg.str());
    }
    if (traj.states.cols() != domain.dim() || driver.cols() != domain.dim() ||
        traj.regulator.cols() != domain.dim()) {
        throw DimensionError("trajectory and domain dimensions differ");
    }
    const std::vector<Vector> samples = sample_points(
        domain, options.direction_samples, options.sample_seed, options.sample_radius);
    Matrix sample_matrix(domain.dim(), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        sample_matrix.col(static_cast<Eigen::Index>(j)) = samples[j];
    }

    SkorokhodReport report;
    Vector x(domain.dim());
    Vector push(domain.dim());
    for (Eigen::Index k = 0; k < rows; ++k) {
        x = traj.states.row(k).transpose();
        report.containment_violation = std::max(report.containment_violation, dist(domain, x));
        report.decomposition_residual =
            std::max(report.decomposition_residual,
                     (traj.states.row(k) - driver.row(k) - traj.regulator.row(k)).norm());
        if (k == 0) continue;
        push = (traj.regulator.row(k) - traj.regulator.row(k - 1)).transpose();
        const Scalar mass = push.norm();
        if (mass == 0.0) continue;
        if (boundary_distance(domain, x) > options.boundary_tol) {
            report.flatness_violation += mass;
        }
        if (mass > options.flat_tol && sample_matrix.cols() > 0) {
            // <y - X_k, u> >= 0 for every sampled y
            const Scalar worst =
                (push.transpose() / mass * sample_matrix).minCoeff() - x.dot(push) / mass;
            report.direction_violation = std::max(report.direction_violation, -worst);
        }
    }
    return report;
}

}  // namespace reflect
