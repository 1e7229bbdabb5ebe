#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace reflect {

using Scalar = double;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ConstVectorRef = Eigen::Ref<const Vector>;
using VectorRef = Eigen::Ref<Vector>;

inline constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

/// Centralized tolerances. Every geometric query accepts an override.
struct GeometryTolerances {
    Scalar normal_unit = 1e-12;      // |a_i| - 1 for polyhedron normals
    Scalar projection_residual = 1e-10;
    Scalar iterate_change = 1e-12;   // Dykstra stopping criterion
    std::size_t max_iterations = 10'000;
};

inline const GeometryTolerances kDefaultTolerances{};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when the iterative polyhedral projection fails to reach the
/// residual tolerance within the iteration budget.
class ProjectionError : public std::runtime_error {
public:
    ProjectionError(const std::string& what, Scalar residual)
        : std::runtime_error(what), residual_(residual) {}
    Scalar residual() const noexcept { return residual_; }

private:
    Scalar residual_;
};

struct HalfLine {
    Scalar lower = 0.0;
};

/// Axis-aligned box; bounds may be infinite.
struct Box {
    Vector lower;
    Vector upper;
};

/// Intersection of halfspaces <normals.row(i), x> <= offsets(i), unit normals.
struct Polyhedron {
    Matrix normals;
    Vector offsets;
    Vector interior_point;  // strict interior witness found at construction
};

struct Ball {
    Vector center;
    Scalar radius = 1.0;
};

/// Closed convex set in R^d. Immutable after construction; validated by the
/// factory functions.
class ConvexDomain {
public:
    using Shape = std::variant<HalfLine, Box, Polyhedron, Ball>;

    static ConvexDomain half_line(Scalar lower);
    static ConvexDomain box(Vector lower, Vector upper);
    static ConvexDomain polyhedron(Matrix normals, Vector offsets,
                                   const GeometryTolerances& tol = kDefaultTolerances);
    static ConvexDomain ball(Vector center, Scalar radius);

    Eigen::Index dim() const noexcept { return dim_; }
    const Shape& shape() const noexcept { return shape_; }
    std::string kind() const;

    /// True for every variant whose boundary is piecewise flat.
    bool is_polyhedral() const noexcept { return !std::holds_alternative<Ball>(shape_); }

private:
    ConvexDomain(Shape shape, Eigen::Index dim) : shape_(std::move(shape)), dim_(dim) {}

    Shape shape_;
    Eigen::Index dim_;
};

struct NormalDirection {
    Vector direction;  // inward, unit length
    Vector anchor;     // boundary point the normal is attached to
};

/// Writes the metric projection of x onto the domain into out. out may alias x.
void project_into(const ConvexDomain& domain, ConstVectorRef x, VectorRef out,
                  const GeometryTolerances& tol = kDefaultTolerances);

Vector project(const ConvexDomain& domain, ConstVectorRef x,
               const GeometryTolerances& tol = kDefaultTolerances);

Scalar dist(const ConvexDomain& domain, ConstVectorRef x,
            const GeometryTolerances& tol = kDefaultTolerances);

bool contains(const ConvexDomain& domain, ConstVectorRef x, Scalar tol = 0.0);

NormalDirection normal_at(const ConvexDomain& domain, ConstVectorRef x_outside,
                          const GeometryTolerances& tol = kDefaultTolerances);

/// Distance from x to the boundary. For interior points this is the distance
/// to the nearest active constraint (nearest supporting halfspace for
/// polyhedra, r - |x - c| for balls); outside points return dist(x, D).
Scalar boundary_distance(const ConvexDomain& domain, ConstVectorRef x,
                         const GeometryTolerances& tol = kDefaultTolerances);

/// Distance from an outside point to the closed domain, computed without the
/// projection, one constraint at a time. Only available where a per-constraint
/// formula is exact (half-line, box, single halfspace, ball).
Scalar constraint_distance(const ConvexDomain& domain, ConstVectorRef x);

/// Points of the closed domain: uniform draws from a cube of half-width
/// radius around a reference point of the domain, then projected. Projected
/// draws put mass on the boundary, where containment-type checks are tightest.
std::vector<Vector> sample_points(const ConvexDomain& domain, std::size_t count,
                                  std::uint64_t seed, Scalar radius = 2.0);

/// Worst observed defects of the projection over random points: idempotence
/// |P(P(x)) - P(x)|, nonexpansiveness |P(x) - P(z)| - |x - z|, and the
/// variational inequality <y - P(x), x - P(x)> for y in the domain.
struct ProjectionDiagnostics {
    std::size_t samples = 0;
    Scalar idempotence = 0.0;
    Scalar nonexpansive_excess = 0.0;
    Scalar variational = 0.0;

    bool pass(Scalar idem_tol = 1e-10, Scalar lip_tol = 1e-10, Scalar vi_tol = 1e-9) const {
        return idempotence <= idem_tol && nonexpansive_excess <= lip_tol && variational <= vi_tol;
    }
};

ProjectionDiagnostics check_projection_properties(const ConvexDomain& domain,
                                                  std::size_t samples, std::uint64_t seed,
                                                  Scalar radius = 3.0);

}  // namespace reflect
