#include "reflect/sweep.hpp"

#include "reflect/parallel.hpp"

#include <optional>
#include <sstream>

namespace reflect {

namespace {

Scalar sup_row_distance(const RowMatrix& a, Eigen::Index stride_a, const RowMatrix& b,
                        Eigen::Index stride_b, Eigen::Index rows) {
    Scalar worst = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) {
        worst = std::max(worst, (a.row(k * stride_a) - b.row(k * stride_b)).norm());
    }
    return worst;
}

}  // namespace

std::string to_string(ReferenceScheme scheme) {
    return scheme == ReferenceScheme::ProjectedEuler ? "projected_euler" : "halfline_map";
}

int SweepSpec::shared_log2_steps() const {
    if (reference.scheme == ReferenceScheme::HalflineMap) return log2_fine_steps;
    return std::min(reference.log2_steps, log2_fine_steps);
}

ReflectedTrajectory reference_trajectory(const SweepSpec& spec, const BrownianPath& fine_path) {
    if (spec.reference.scheme == ReferenceScheme::HalflineMap) {
        const auto* line = std::get_if<HalfLine>(&spec.domain.shape());
        if (line == nullptr) {
            throw DomainError("the half-line map reference needs a half-line domain");
        }
        return halfline_map_reference(spec.coeffs, fine_path, spec.x0(0), line->lower);
    }
    if (spec.reference.log2_steps > spec.log2_fine_steps) {
        throw std::invalid_argument("reference grid cannot be finer than the fine Brownian grid");
    }
    const Eigen::Index factor = Eigen::Index{1}
                                << (spec.log2_fine_steps - spec.reference.log2_steps);
    if (factor == 1) return projected_euler(spec.domain, spec.coeffs, fine_path, spec.x0);
    return projected_euler(spec.domain, spec.coeffs, coarsen(fine_path, factor), spec.x0);
}

std::vector<PathSample> run_sweep(const SweepSpec& spec) {
    const TimeGrid fine = spec.fine_grid();
    const int shared = spec.shared_log2_steps();
    const Eigen::Index approx_stride = Eigen::Index{1} << (spec.log2_fine_steps - shared);
    // the reference always lives on the shared grid
    const Eigen::Index ref_stride = 1;
    const Eigen::Index shared_rows = (Eigen::Index{1} << shared) + 1;

    std::vector<PathSample> results(spec.num_paths);
    parallel_for(spec.num_paths, spec.threads, [&](std::size_t i) {
        const BrownianPath path = sample_path(fine, spec.coeffs.dim, spec.master_seed, i);
        PathSample& out = results[i];
        std::optional<ReflectedTrajectory> ref;
        if (spec.with_reference) {
            try {
                ref = reference_trajectory(spec, path);
            } catch (const NumericalError& e) {
                std::ostringstream msg;
                msg << "reference failed on path " << i << ": " << e.what();
                throw SweepError(msg.str(), 0.0, i);
            }
            out.reference_terminal = ref->states.bottomRows(1).transpose();
        }
        out.levels.resize(spec.levels.size());
        for (std::size_t j = 0; j < spec.levels.size(); ++j) {
            const Scalar level = spec.levels[j];
            try {
                const PenalizedTrajectory traj = integrate_penalized(
                    spec.scheme, spec.domain, spec.coeffs, path, spec.x0, level, spec.substeps);
                LevelSample& sample = out.levels[j];
                sample.max_dist = traj.max_dist;
                sample.sup_norm = traj.states.rowwise().norm().maxCoeff();
                sample.terminal = traj.states.bottomRows(1).transpose();
                if (ref) {
                    sample.sup_error = sup_row_distance(traj.states, approx_stride, ref->states,
                                                        ref_stride, shared_rows);
                }
            } catch (const NumericalError& e) {
                std::ostringstream msg;
                msg << "integration failed at n = " << level << ", path " << i << ": "
                    << e.what();
                throw SweepError(msg.str(), level, i);
            }
        }
    });
    return results;
}

}  // namespace reflect
