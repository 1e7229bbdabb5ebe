#pragma once

#include "reflect/geometry.hpp"

#include <array>
#include <cstdint>

namespace reflect {

/// Uniform dyadic grid on [0, T] with 2^log2_steps steps.
class TimeGrid {
public:
    TimeGrid(Scalar horizon, int log2_steps);

    Scalar horizon() const noexcept { return horizon_; }
    int log2_steps() const noexcept { return log2_steps_; }
    Eigen::Index steps() const noexcept { return Eigen::Index{1} << log2_steps_; }
    Scalar step() const noexcept { return horizon_ / static_cast<Scalar>(steps()); }
    Scalar time(Eigen::Index k) const noexcept { return static_cast<Scalar>(k) * step(); }

    /// Grid with factor-times fewer steps over the same horizon.
    TimeGrid coarsened(Eigen::Index factor) const;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    Scalar horizon_;
    int log2_steps_;
};

/// Philox4x32-10 counter-based generator (Salmon et al.). Stateless: every
/// (key, counter) pair maps to four independent 32-bit words.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter counter, Key key) noexcept;
};

/// Two independent N(0, 1) draws keyed by (seed, path, step, coordinate pair).
std::array<Scalar, 2> normal_pair(std::uint64_t master_seed, std::uint64_t path_index,
                                  std::uint64_t step, std::uint32_t pair_index) noexcept;

using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct BrownianPath {
    TimeGrid grid;
    RowMatrix increments;  // steps x d, row k is W(t_{k+1}) - W(t_k)
    RowMatrix values;      // (steps + 1) x d, W(t_k); row 0 is zero
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;

    Eigen::Index dim() const noexcept { return increments.cols(); }
};

BrownianPath sample_path(const TimeGrid& grid, Eigen::Index dim, std::uint64_t master_seed,
                         std::uint64_t path_index);

/// Same Brownian motion on a grid factor-times coarser. Values are the fine
/// values at the shared times (bitwise); increments are block sums formed by
/// repeated pairwise halving, so coarsening composes exactly. factor must be a
/// power of two dividing the number of steps.
BrownianPath coarsen(const BrownianPath& path, Eigen::Index factor);

/// Keeps every factor-th row of an (M+1)-row state array.
RowMatrix restrict_rows(const RowMatrix& states, Eigen::Index factor);

}  // namespace reflect
