#include "reflect/brownian.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace reflect {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// (0, 1] with 53 random bits
inline Scalar to_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32 | lo) >> 11;
    return (static_cast<Scalar>(bits) + 1.0) * 0x1.0p-53;
}

void require_power_of_two_divisor(Eigen::Index factor, Eigen::Index steps) {
    if (factor < 1 || !std::has_single_bit(static_cast<std::uint64_t>(factor)) ||
        steps % factor != 0) {
        std::ostringstream msg;
        msg << "coarsening factor " << factor << " must be a power of two dividing " << steps;
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

TimeGrid::TimeGrid(Scalar horizon, int log2_steps) : horizon_(horizon), log2_steps_(log2_steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("time horizon must be positive and finite");
    }
    if (log2_steps < 0 || log2_steps > 30) {
        throw std::invalid_argument("log2 of the step count must lie in [0, 30]");
    }
}

TimeGrid TimeGrid::coarsened(Eigen::Index factor) const {
    require_power_of_two_divisor(factor, steps());
    return TimeGrid(horizon_, log2_steps_ - std::countr_zero(static_cast<std::uint64_t>(factor)));
}

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::array<Scalar, 2> normal_pair(std::uint64_t master_seed, std::uint64_t path_index,
                                  std::uint64_t step, std::uint32_t pair_index) noexcept {
    // Counter: (step lo, step hi | pair, path lo, path hi); key: seed.
    const Philox4x32::Counter ctr{
        static_cast<std::uint32_t>(step),
        static_cast<std::uint32_t>(step >> 32) ^ (pair_index << 16),
        static_cast<std::uint32_t>(path_index),
        static_cast<std::uint32_t>(path_index >> 32),
    };
    const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed),
                              static_cast<std::uint32_t>(master_seed >> 32)};
    const auto words = Philox4x32::generate(ctr, key);
    // Box-Muller
    const Scalar u1 = to_unit(words[0], words[1]);
    const Scalar u2 = to_unit(words[2], words[3]);
    const Scalar radius = std::sqrt(-2.0 * std::log(u1));
    const Scalar angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

BrownianPath sample_path(const TimeGrid& grid, Eigen::Index dim, std::uint64_t master_seed,
                         std::uint64_t path_index) {
    if (dim < 1) throw DimensionError("Brownian dimension must be at least 1");
    const Eigen::Index steps = grid.steps();
    const Scalar scale = std::sqrt(grid.step());
    BrownianPath path{grid, RowMatrix(steps, dim), RowMatrix(steps + 1, dim), master_seed,
                      path_index};
    for (Eigen::Index k = 0; k < steps; ++k) {
        for (Eigen::Index j = 0; j < dim; j += 2) {
            const auto z = normal_pair(master_seed, path_index, static_cast<std::uint64_t>(k),
                                       static_cast<std::uint32_t>(j / 2));
            path.increments(k, j) = scale * z[0];
            if (j + 1 < dim) path.increments(k, j + 1) = scale * z[1];
        }
    }
    // partial sums, left to right
    path.values.row(0).setZero();
    for (Eigen::Index k = 0; k < steps; ++k) {
        path.values.row(k + 1) = path.values.row(k) + path.increments.row(k);
    }
    return path;
}

BrownianPath coarsen(const BrownianPath& path, Eigen::Index factor) {
    const Eigen::Index steps = path.grid.steps();
    require_power_of_two_divisor(factor, steps);
    if (factor == 1) return path;
    BrownianPath out{path.grid.coarsened(factor), path.increments,
                     restrict_rows(path.values, factor), path.master_seed, path.path_index};
    for (Eigen::Index width = factor; width > 1; width /= 2) {
        const Eigen::Index rows = out.increments.rows() / 2;
        RowMatrix halved(rows, out.increments.cols());
        for (Eigen::Index k = 0; k < rows; ++k) {
            halved.row(k) = out.increments.row(2 * k) + out.increments.row(2 * k + 1);
        }
        out.increments = std::move(halved);
    }
    return out;
}

RowMatrix restrict_rows(const RowMatrix& states, Eigen::Index factor) {
    if (states.rows() < 1) throw std::invalid_argument("empty state array");
    require_power_of_two_divisor(factor, states.rows() - 1);
    const Eigen::Index rows = (states.rows() - 1) / factor + 1;
    RowMatrix out(rows, states.cols());
    for (Eigen::Index k = 0; k < rows; ++k) out.row(k) = states.row(k * factor);
    return out;
}

}  // namespace reflect
