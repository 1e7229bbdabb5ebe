#include "reflect/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace reflect {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_dim(const ConvexDomain& domain, Eigen::Index got) {
    if (got != domain.dim()) {
        std::ostringstream msg;
        msg << "dimension mismatch: domain is " << domain.dim() << "-dimensional, point has "
            << got << " coordinates";
        throw DimensionError(msg.str());
    }
}

Scalar max_violation(const Polyhedron& poly, ConstVectorRef x) {
    Scalar worst = 0.0;
    for (Eigen::Index i = 0; i < poly.normals.rows(); ++i) {
        worst = std::max(worst, poly.normals.row(i).dot(x) - poly.offsets(i));
    }
    return worst;
}

// Plain cyclic projections onto {<a_i, x> <= c_i - margin}; finds a feasible
// point, not the nearest one.
bool find_feasible(const Matrix& normals, const Vector& offsets, Scalar margin,
                   std::size_t max_sweeps, Vector& x) {
    x.setZero(normals.cols());
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        Scalar worst = 0.0;
        for (Eigen::Index i = 0; i < normals.rows(); ++i) {
            const Scalar excess = normals.row(i).dot(x) - (offsets(i) - margin);
            if (excess > 0.0) {
                x -= excess * normals.row(i).transpose();
                worst = std::max(worst, excess);
            }
        }
        if (worst <= 1e-14) return true;
    }
    Scalar worst = 0.0;
    for (Eigen::Index i = 0; i < normals.rows(); ++i) {
        worst = std::max(worst, normals.row(i).dot(x) - (offsets(i) - margin));
    }
    return worst <= 1e-12;
}

// Dykstra's alternating projection with correction terms; converges to the
// metric projection onto the intersection.
void dykstra(const Polyhedron& poly, ConstVectorRef x0, VectorRef out,
             const GeometryTolerances& tol) {
    const Eigen::Index m = poly.normals.rows();
    const Eigen::Index d = poly.normals.cols();
    Matrix corrections = Matrix::Zero(d, m);
    Vector x = x0;
    Vector prev(d);
    Vector y(d);
    Scalar residual = max_violation(poly, x);
    for (std::size_t it = 0; it < tol.max_iterations; ++it) {
        prev = x;
        Scalar correction_change = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            y = x + corrections.col(i);
            const Scalar excess = poly.normals.row(i).dot(y) - poly.offsets(i);
            if (excess > 0.0) {
                x = y - excess * poly.normals.row(i).transpose();
            } else {
                x = y;
            }
            const Vector updated = y - x;
            correction_change += (updated - corrections.col(i)).squaredNorm();
            corrections.col(i) = updated;
        }
        residual = max_violation(poly, x);
        const Scalar change = (x - prev).norm();
        if (change < tol.iterate_change && std::sqrt(correction_change) < tol.iterate_change &&
            residual <= tol.projection_residual) {
            out = x;
            return;
        }
    }
    std::ostringstream msg;
    msg << "polyhedral projection did not converge after " << tol.max_iterations
        << " sweeps (residual " << residual << ")";
    throw ProjectionError(msg.str(), residual);
}

}  // namespace

ConvexDomain ConvexDomain::half_line(Scalar lower) {
    if (!std::isfinite(lower)) throw DomainError("half-line lower bound must be finite");
    return ConvexDomain(HalfLine{lower}, 1);
}

ConvexDomain ConvexDomain::box(Vector lower, Vector upper) {
    if (lower.size() == 0 || lower.size() != upper.size()) {
        throw DomainError("box bounds must be nonempty and of equal length");
    }
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (std::isnan(lower(i)) || std::isnan(upper(i)) || !(lower(i) < upper(i)) ||
            lower(i) == kInf || upper(i) == -kInf) {
            std::ostringstream msg;
            msg << "box axis " << i << " has invalid bounds [" << lower(i) << ", " << upper(i)
                << "]";
            throw DomainError(msg.str());
        }
    }
    const auto d = lower.size();
    return ConvexDomain(Box{std::move(lower), std::move(upper)}, d);
}

ConvexDomain ConvexDomain::polyhedron(Matrix normals, Vector offsets,
                                      const GeometryTolerances& tol) {
    if (normals.rows() == 0 || normals.cols() == 0 || normals.rows() != offsets.size()) {
        throw DomainError("polyhedron needs one offset per normal and at least one halfspace");
    }
    if (!normals.allFinite() || !offsets.allFinite()) {
        throw DomainError("polyhedron normals and offsets must be finite");
    }
    for (Eigen::Index i = 0; i < normals.rows(); ++i) {
        if (std::abs(normals.row(i).norm() - 1.0) > tol.normal_unit) {
            std::ostringstream msg;
            msg << "polyhedron normal " << i << " is not a unit vector (norm "
                << normals.row(i).norm() << ")";
            throw DomainError(msg.str());
        }
    }
    // Chebyshev-style interior check: shrink every halfspace by a margin and
    // look for a feasible point of the shrunken set.
    Vector witness;
    bool found = false;
    for (const Scalar margin : std::array<Scalar, 4>{1.0, 1e-2, 1e-4, 1e-6}) {
        if (find_feasible(normals, offsets, margin, tol.max_iterations, witness)) {
            found = true;
            break;
        }
    }
    if (!found) throw DomainError("polyhedron has empty interior");
    const auto d = normals.cols();
    return ConvexDomain(Polyhedron{std::move(normals), std::move(offsets), std::move(witness)},
                        d);
}

ConvexDomain ConvexDomain::ball(Vector center, Scalar radius) {
    if (center.size() == 0) throw DomainError("ball center must be nonempty");
    if (!center.allFinite()) throw DomainError("ball center must be finite");
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw DomainError("ball radius must be strictly positive and finite");
    }
    const auto d = center.size();
    return ConvexDomain(Ball{std::move(center), radius}, d);
}

std::string ConvexDomain::kind() const {
    return std::visit(Overloaded{[](const HalfLine&) { return std::string("halfline"); },
                                 [](const Box&) { return std::string("box"); },
                                 [](const Polyhedron&) { return std::string("polyhedron"); },
                                 [](const Ball&) { return std::string("ball"); }},
                      shape_);
}

void project_into(const ConvexDomain& domain, ConstVectorRef x, VectorRef out,
                  const GeometryTolerances& tol) {
    require_dim(domain, x.size());
    std::visit(
        Overloaded{
            [&](const HalfLine& h) { out(0) = std::max(x(0), h.lower); },
            [&](const Box& b) {
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    out(i) = std::clamp(x(i), b.lower(i), b.upper(i));
                }
            },
            [&](const Ball& b) {
                const Scalar r = (x - b.center).norm();
                if (r <= b.radius) {
                    out = x;
                } else {
                    out = b.center + (b.radius / r) * (x - b.center);
                }
            },
            [&](const Polyhedron& p) {
                if (max_violation(p, x) <= 0.0) {
                    out = x;
                } else if (p.normals.rows() == 1) {
                    const Scalar excess = p.normals.row(0).dot(x) - p.offsets(0);
                    out = x - excess * p.normals.row(0).transpose();
                } else {
                    dykstra(p, x, out, tol);
                }
            }},
        domain.shape());
}

Vector project(const ConvexDomain& domain, ConstVectorRef x, const GeometryTolerances& tol) {
    Vector out(x.size());
    project_into(domain, x, out, tol);
    return out;
}

Scalar dist(const ConvexDomain& domain, ConstVectorRef x, const GeometryTolerances& tol) {
    return (x - project(domain, x, tol)).norm();
}

bool contains(const ConvexDomain& domain, ConstVectorRef x, Scalar tol) {
    return dist(domain, x) <= tol;
}

NormalDirection normal_at(const ConvexDomain& domain, ConstVectorRef x_outside,
                          const GeometryTolerances& tol) {
    Vector anchor = project(domain, x_outside, tol);
    Vector direction = anchor - x_outside;
    const Scalar gap = direction.norm();
    if (gap <= 1e-12) {
        throw DomainError("normal direction is undefined for points in or near the domain");
    }
    direction /= gap;
    return {std::move(direction), std::move(anchor)};
}

Scalar boundary_distance(const ConvexDomain& domain, ConstVectorRef x,
                         const GeometryTolerances& tol) {
    require_dim(domain, x.size());
    const Scalar outside = dist(domain, x, tol);
    if (outside > 0.0) return outside;
    return std::visit(
        Overloaded{[&](const HalfLine& h) { return x(0) - h.lower; },
                   [&](const Box& b) {
                       Scalar best = kInf;
                       for (Eigen::Index i = 0; i < x.size(); ++i) {
                           best = std::min({best, x(i) - b.lower(i), b.upper(i) - x(i)});
                       }
                       return best;
                   },
                   [&](const Ball& b) { return b.radius - (x - b.center).norm(); },
                   [&](const Polyhedron& p) {
                       return (p.offsets - p.normals * x).minCoeff();
                   }},
        domain.shape());
}

Scalar constraint_distance(const ConvexDomain& domain, ConstVectorRef x) {
    require_dim(domain, x.size());
    return std::visit(
        Overloaded{[&](const HalfLine& h) { return std::max(h.lower - x(0), 0.0); },
                   [&](const Box& b) {
                       Scalar sq = 0.0;
                       for (Eigen::Index i = 0; i < x.size(); ++i) {
                           const Scalar gap =
                               std::max({b.lower(i) - x(i), x(i) - b.upper(i), 0.0});
                           sq += gap * gap;
                       }
                       return std::sqrt(sq);
                   },
                   [&](const Ball& b) { return std::max((x - b.center).norm() - b.radius, 0.0); },
                   [&](const Polyhedron& p) -> Scalar {
                       if (p.normals.rows() != 1) {
                           throw DomainError(
                               "per-constraint distance is only exact for a single halfspace");
                       }
                       return std::max(p.normals.row(0).dot(x) - p.offsets(0), 0.0);
                   }},
        domain.shape());
}

namespace {

Vector reference_point(const ConvexDomain& domain) {
    return std::visit(
        Overloaded{[](const HalfLine& h) -> Vector { return Vector::Constant(1, h.lower); },
                   [](const Box& b) {
                       Vector c(b.lower.size());
                       for (Eigen::Index i = 0; i < c.size(); ++i) {
                           const bool lo = std::isfinite(b.lower(i));
                           const bool hi = std::isfinite(b.upper(i));
                           c(i) = lo && hi ? 0.5 * (b.lower(i) + b.upper(i))
                                  : lo     ? b.lower(i)
                                  : hi     ? b.upper(i)
                                           : 0.0;
                       }
                       return c;
                   },
                   [](const Polyhedron& p) -> Vector { return p.interior_point; },
                   [](const Ball& b) -> Vector { return b.center; }},
        domain.shape());
}

}  // namespace

std::vector<Vector> sample_points(const ConvexDomain& domain, std::size_t count,
                                  std::uint64_t seed, Scalar radius) {
    const Vector anchor = reference_point(domain);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Scalar> u(-radius, radius);
    std::vector<Vector> points;
    points.reserve(count);
    Vector x(domain.dim());
    for (std::size_t k = 0; k < count; ++k) {
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = anchor(i) + u(rng);
        points.push_back(project(domain, x));
    }
    return points;
}

ProjectionDiagnostics check_projection_properties(const ConvexDomain& domain,
                                                  std::size_t samples, std::uint64_t seed,
                                                  Scalar radius) {
    const Vector anchor = reference_point(domain);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Scalar> u(-radius, radius);
    auto draw = [&] {
        Vector x(domain.dim());
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = anchor(i) + u(rng);
        return x;
    };
    ProjectionDiagnostics diag;
    diag.samples = samples;
    for (std::size_t k = 0; k < samples; ++k) {
        const Vector x = draw();
        const Vector z = draw();
        const Vector y = project(domain, draw());
        const Vector px = project(domain, x);
        const Vector pz = project(domain, z);
        diag.idempotence = std::max(diag.idempotence, (project(domain, px) - px).norm());
        diag.nonexpansive_excess =
            std::max(diag.nonexpansive_excess, (px - pz).norm() - (x - z).norm());
        diag.variational = std::max(diag.variational, (y - px).dot(x - px));
    }
    return diag;
}

}  // namespace reflect
