#pragma once

// Shared per-step machinery for the trajectory integrators. Hot loops are
// instantiated for d = 1, 2 with fixed-size Eigen storage and fall back to
// dynamic storage otherwise.

#include "reflect/brownian.hpp"
#include "reflect/coefficients.hpp"
#include "reflect/geometry.hpp"
#include "reflect/penalized.hpp"

#include <sstream>
#include <type_traits>

namespace reflect::detail {

template <int Dim>
struct StepBuffers {
    using Vec = Eigen::Matrix<Scalar, Dim, 1>;
    using Mat = Eigen::Matrix<Scalar, Dim, Dim>;

    explicit StepBuffers(Eigen::Index d)
        : x(d), pre(d), proj(d), drift(d), dw(d), sigma(d, d) {
        sigma.setZero();
        drift.setZero();
    }

    Vec x, pre, proj, drift, dw;
    Mat sigma;
};

/// pre = x + sigma(t, x) dw + b(t, x) h
template <int Dim, class Increment>
inline void diffusion_step_at(const CoefficientField& coeffs, Scalar t, Scalar h,
                              const Increment& dw, StepBuffers<Dim>& buf) {
    coeffs.sigma(t, buf.x, buf.sigma);
    coeffs.drift(t, buf.x, buf.drift);
    buf.dw = dw;
    buf.pre = buf.x;
    buf.pre.noalias() += buf.sigma * buf.dw;
    buf.pre += h * buf.drift;
}

template <int Dim>
inline void diffusion_step(const CoefficientField& coeffs, const BrownianPath& path,
                           Eigen::Index k, StepBuffers<Dim>& buf) {
    diffusion_step_at(coeffs, path.grid.time(k), path.grid.step(),
                      path.increments.row(k).transpose(), buf);
}

template <class Fn>
decltype(auto) dispatch_dim(Eigen::Index d, Fn&& fn) {
    switch (d) {
        case 1: return fn(std::integral_constant<int, 1>{});
        case 2: return fn(std::integral_constant<int, 2>{});
        default: return fn(std::integral_constant<int, Eigen::Dynamic>{});
    }
}

inline void require_compatible(const ConvexDomain& domain, const CoefficientField& coeffs,
                               const BrownianPath& path, ConstVectorRef x0) {
    if (domain.dim() != coeffs.dim || path.dim() != coeffs.dim || x0.size() != coeffs.dim) {
        std::ostringstream msg;
        msg << "dimension mismatch: domain " << domain.dim() << ", coefficients " << coeffs.dim
            << ", Brownian path " << path.dim() << ", initial point " << x0.size();
        throw DimensionError(msg.str());
    }
    if (!contains(domain, x0, 1e-12)) {
        throw DomainError("initial point must lie in the closed domain");
    }
}

template <class V>
inline void require_finite(const V& x, Eigen::Index step, const char* scheme) {
    if (!x.allFinite()) {
        std::ostringstream msg;
        msg << scheme << ": non-finite state at step " << step;
        throw IntegrationError(msg.str(), step);
    }
}

}  // namespace reflect::detail
