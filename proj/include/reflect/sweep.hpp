#pragma once

#include "reflect/brownian.hpp"
#include "reflect/coefficients.hpp"
#include "reflect/geometry.hpp"
#include "reflect/penalized.hpp"
#include "reflect/reflected.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace reflect {

enum class ReferenceScheme { ProjectedEuler, HalflineMap };

std::string to_string(ReferenceScheme scheme);

struct ReferenceSpec {
    ReferenceScheme scheme = ReferenceScheme::ProjectedEuler;
    int log2_steps = 16;  // ignored by the half-line map, which runs on the fine grid
};

/// Monte Carlo sweep over penalization levels. Every level and the reference
/// run on grids derived from one fine Brownian path per path index, so errors
/// are measured under common random numbers.
struct SweepSpec {
    ConvexDomain domain;
    CoefficientField coeffs;
    Vector x0;
    Scalar horizon = 1.0;
    int log2_fine_steps = 16;
    std::uint64_t master_seed = 0;
    std::size_t num_paths = 100;
    std::vector<Scalar> levels;
    PenaltyScheme scheme = PenaltyScheme::Splitting;
    int substeps = 1;
    ReferenceSpec reference;
    bool with_reference = true;
    unsigned threads = 0;

    TimeGrid fine_grid() const { return TimeGrid(horizon, log2_fine_steps); }
    int shared_log2_steps() const;
};

struct LevelSample {
    Scalar max_dist = 0.0;   // sup_k dist(X^n_k, D) on the fine grid
    Scalar sup_error = 0.0;  // sup over the shared grid of |X^n - X|
    Scalar sup_norm = 0.0;   // sup_k |X^n_k|
    Vector terminal;         // X^n_T
};

struct PathSample {
    std::vector<LevelSample> levels;  // aligned with SweepSpec::levels
    Vector reference_terminal;        // X_T, empty without a reference
};

/// Integration failure tagged with the offending level and path.
class SweepError : public NumericalError {
public:
    SweepError(const std::string& what, Scalar level, std::size_t path_index)
        : NumericalError(what), level_(level), path_index_(path_index) {}
    Scalar level() const noexcept { return level_; }
    std::size_t path_index() const noexcept { return path_index_; }

private:
    Scalar level_;
    std::size_t path_index_;
};

/// Reference trajectory for one fine path according to spec.reference.
ReflectedTrajectory reference_trajectory(const SweepSpec& spec, const BrownianPath& fine_path);

/// Runs every (path, level) pair; results are indexed by path and independent
/// of the thread count.
std::vector<PathSample> run_sweep(const SweepSpec& spec);

}  // namespace reflect
