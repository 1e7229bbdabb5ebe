#include "reflect/rates.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace reflect;

namespace {

ErrorTable synthetic(const std::function<double(double)>& error) {
    ErrorTable t;
    for (int m = 4; m <= 12; ++m) {
        ErrorRow row;
        row.level = std::ldexp(1.0, m);
        row.num_paths = 1;
        row.value = error(row.level);
        t.rows.push_back(row);
    }
    return t;
}

PenalizedTrajectory as_penalized(const TimeGrid& grid, const RowMatrix& states) {
    PenalizedTrajectory t{grid, states, RowMatrix::Zero(states.rows(), states.cols())};
    return t;
}

}  // namespace

TEST_CASE("fit_rate recovers exact exponents") {
    for (double beta : {0.5, 0.25}) {
        const auto t = synthetic([beta](double n) { return std::pow(std::log(n) / n, beta); });
        const auto r = fit_rate(t, Regressor::LogLnNOverN);
        CHECK(std::abs(r.slope - beta) <= 1e-12);
        CHECK(r.residual <= 1e-12);
        CHECK(r.rows_used == 9);
    }
    const auto inv = synthetic([](double n) { return 3.0 / n; });
    CHECK(std::abs(fit_rate(inv, Regressor::LogInvN).slope - 1.0) <= 1e-12);
}

TEST_CASE("fit_rate on c n^{-1/2} against the (ln n)/n scale") {
    const auto t = synthetic([](double n) { return 0.7 / std::sqrt(n); });
    const auto r = fit_rate(t, Regressor::LogLnNOverN);
    // least-squares slope computed independently in extended precision
    CHECK(r.slope == doctest::Approx(0.618834357499639).epsilon(1e-12));
    CHECK(fit_rate(t, Regressor::LogInvN).slope == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fit_rate needs four positive rows and judges the band") {
    auto t = synthetic([](double n) { return 1.0 / n; });
    t.rows.resize(3);
    CHECK_THROWS(fit_rate(t, Regressor::LogInvN));
    auto z = synthetic([](double n) { return n > 100 ? 0.0 : 1.0 / n; });
    CHECK_THROWS(fit_rate(z, Regressor::LogInvN));
    auto ok = synthetic([](double n) { return 1.0 / n; });
    CHECK(fit_rate(ok, Regressor::LogInvN, SlopeBand{0.9, 1.1}).pass);
    CHECK_FALSE(fit_rate(ok, Regressor::LogInvN, SlopeBand{1.2, std::nullopt}).pass);
    CHECK_THROWS(regressor_value(Regressor::LogLnNOverN, 1.0));
}

TEST_CASE("error table validation") {
    auto t = synthetic([](double n) { return 1.0 / n; });
    CHECK_NOTHROW(t.validate());
    std::swap(t.rows[0], t.rows[1]);
    CHECK_THROWS(t.validate());
}

TEST_CASE("pooled norm") {
    const std::vector<double> powers{4.0, 4.0, 4.0};
    const auto n = pooled_norm(powers, 2.0);
    CHECK(n.value == doctest::Approx(2.0));
    CHECK(n.std_error == 0.0);
    const std::vector<double> spread{1.0, 9.0};
    CHECK(pooled_norm(spread, 2.0).value == doctest::Approx(std::sqrt(5.0)));
    CHECK(pooled_norm(spread, 2.0).std_error > 0.0);
}

TEST_CASE("decreasing checks") {
    auto t = synthetic([](double n) { return 1.0 / n; });
    CHECK(strictly_decreasing(t));
    CHECK(decreasing_within_noise(t));
    t.rows[4].value = t.rows[3].value * 1.01;
    CHECK_FALSE(strictly_decreasing(t));
    CHECK_FALSE(decreasing_within_noise(t));
    t.rows[4].std_error = t.rows[3].value;
    CHECK(decreasing_within_noise(t));
}

TEST_CASE("lp_sup_error: identity, offset, symmetry, triangle inequality") {
    const TimeGrid g(1.0, 8);
    const auto w = sample_path(g, 2, 3, 0).values;
    CHECK(lp_sup_error(w, w, 2.0) == 0.0);
    RowMatrix shifted = w;
    shifted.col(0).array() += 0.3;
    CHECK(lp_sup_error(w, shifted, 3.0) == doctest::Approx(0.027));

    std::mt19937_64 rng(2);
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto a = sample_path(g, 2, 10, i).values;
        const auto b = sample_path(g, 2, 11, i).values;
        const auto c = sample_path(g, 2, 12, i).values;
        REQUIRE(lp_sup_error(a, b, 2.0) == lp_sup_error(b, a, 2.0));
        const double ab = lp_sup_error(a, b, 1.0), bc = lp_sup_error(b, c, 1.0),
                     ac = lp_sup_error(a, c, 1.0);
        REQUIRE(ac <= ab + bc + 1e-15);
    }

    // trajectories on different dyadic grids are compared on the coarser one
    const auto fine = sample_path(TimeGrid(1.0, 10), 1, 4, 0);
    ReflectedTrajectory ref{fine.grid, fine.values, RowMatrix::Zero(fine.values.rows(), 1),
                            Vector::Zero(fine.values.rows()), fine.values};
    const auto coarse = coarsen(fine, 8);
    CHECK(lp_sup_error(ref, as_penalized(coarse.grid, coarse.values), 2.0) == 0.0);
}

TEST_CASE("modulus of continuity") {
    const TimeGrid g(1.0, 7);
    RowMatrix constant = RowMatrix::Constant(g.steps() + 1, 1, 2.5);
    CHECK(modulus_of_continuity(constant, g.step(), 0.1, 1.0) == 0.0);

    RowMatrix linear(101, 1);
    for (int k = 0; k <= 100; ++k) linear(k, 0) = 0.01 * k;
    CHECK(modulus_of_continuity(linear, 0.01, 0.1, 1.0) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(modulus_of_continuity(linear, 0.01, 0.1, 0.5) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK_THROWS(modulus_of_continuity(linear, 0.01, 2.0, 0.5));

    // d > 1 against a direct double loop
    const auto w = sample_path(TimeGrid(1.0, 8), 3, 5, 0);
    const double step = w.grid.step();
    double brute = 0.0;
    for (Eigen::Index i = 0; i < w.values.rows(); ++i) {
        for (Eigen::Index j = i; j < w.values.rows() && (j - i) * step <= 0.05 + 1e-12; ++j) {
            brute = std::max(brute, (w.values.row(j) - w.values.row(i)).norm());
        }
    }
    CHECK(modulus_of_continuity(w.values, step, 0.05, 1.0) == doctest::Approx(brute).epsilon(1e-14));
    const RowMatrix one = w.values.col(0);
    double brute1 = 0.0;
    for (Eigen::Index i = 0; i < one.rows(); ++i) {
        for (Eigen::Index j = i; j < one.rows() && (j - i) * step <= 0.05 + 1e-12; ++j) {
            brute1 = std::max(brute1, std::abs(one(j, 0) - one(i, 0)));
        }
    }
    CHECK(modulus_of_continuity(one, step, 0.05, 1.0) == brute1);
}

TEST_CASE("Brownian modulus scales like sqrt(delta ln(1/delta))") {
    const TimeGrid g(1.0, 14);
    ErrorTable t;
    std::vector<std::vector<double>> sq(7);
    for (std::uint64_t i = 0; i < 100; ++i) {
        const auto w = sample_path(g, 1, 77, i);
        for (int m = 4; m <= 10; ++m) {
            const double v = modulus_of_continuity(w.values, g.step(), std::ldexp(1.0, -m), 1.0);
            sq[m - 4].push_back(v * v);
        }
    }
    for (int m = 4; m <= 10; ++m) {
        const auto norm = pooled_norm(sq[m - 4], 2.0);
        t.rows.push_back({std::ldexp(1.0, m), 100, g.step(), 2.0, norm.value, norm.std_error});
    }
    const auto r = fit_rate(t, Regressor::LogLnNOverN);
    MESSAGE("modulus slope " << r.slope);
    CHECK(r.slope > 0.4);
    CHECK(r.slope < 0.6);
}

TEST_CASE("KS distance") {
    CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_distance({0, 0}, {1, 1}) == 1.0);
    CHECK(ks_distance({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}

TEST_CASE("weak comparison") {
    CHECK(parse_weak_functional("cdf_distance") == WeakFunctional::CdfDistance);
    CHECK_THROWS(parse_weak_functional("median"));

    SweepSpec still{ConvexDomain::half_line(0.0),
                    constant_field(Matrix::Zero(1, 1), Vector::Zero(1)), Vector::Constant(1, 0.4)};
    still.log2_fine_steps = 8;
    still.reference.log2_steps = 8;
    still.num_paths = 20;
    still.levels = {16, 64, 256};
    still.threads = 1;
    for (auto f : {WeakFunctional::Mean, WeakFunctional::SecondMoment, WeakFunctional::CdfDistance}) {
        for (const auto& row : weak_compare(still, f)) REQUIRE(row.distance == 0.0);
    }

    SweepSpec ou{ConvexDomain::half_line(0.0), make_catalog_entry("ou1d").field, Vector::Zero(1)};
    ou.log2_fine_steps = 14;
    ou.reference.log2_steps = 14;
    ou.num_paths = 400;
    ou.master_seed = 606;
    ou.levels = {16, 64, 256, 1024};
    ou.threads = 1;
    const auto mean_rows = weak_compare(ou, WeakFunctional::Mean);
    for (std::size_t j = 1; j < mean_rows.size(); ++j) {
        CHECK(mean_rows[j].distance < mean_rows[j - 1].distance);
    }

    SweepSpec schmidt{ConvexDomain::half_line(0.0), make_catalog_entry("schmidt1d").field,
                      Vector::Constant(1, 0.5)};
    schmidt.log2_fine_steps = 13;
    schmidt.reference.log2_steps = 13;
    schmidt.num_paths = 1000;
    schmidt.master_seed = 707;
    schmidt.levels = {16, 1024};
    schmidt.threads = 1;
    const auto cdf = weak_compare(schmidt, WeakFunctional::CdfDistance);
    MESSAGE("schmidt1d CDF distance " << cdf[0].distance << " -> " << cdf[1].distance);
    CHECK(cdf[1].distance < cdf[0].distance);
    CHECK(cdf[0].std_error > 0.0);
}
