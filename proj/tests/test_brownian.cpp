#include "reflect/brownian.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <vector>

using namespace reflect;

TEST_CASE("time grid") {
    const TimeGrid g(1.0, 10);
    CHECK(g.steps() == 1024);
    CHECK(std::abs(g.step() * g.steps() - 1.0) <= 1e-12);
    CHECK(g.coarsened(4).steps() == 256);
    CHECK_THROWS(TimeGrid(0.0, 3));
    CHECK_THROWS(TimeGrid(1.0, -1));
}

TEST_CASE("increments are N(0, h): pooled mean and variance") {
    const TimeGrid g(1.0, 12);
    const double h = g.step();
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t i = 0; count < 1'000'000; ++i) {
        const BrownianPath p = sample_path(g, 2, 99, i);
        for (Eigen::Index k = 0; k < p.increments.size() && count < 1'000'000; ++k, ++count) {
            const double v = p.increments.data()[k];
            sum += v;
            sum_sq += v * v;
        }
    }
    const double n = static_cast<double>(count);
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) <= 4.0 * std::sqrt(h / n));
    CHECK(std::abs(var / h - 1.0) <= 0.01);
}

TEST_CASE("sampling is deterministic and keyed by seed and index") {
    const TimeGrid g(1.0, 8);
    const BrownianPath a = sample_path(g, 3, 5, 42);
    const BrownianPath b = sample_path(g, 3, 5, 42);
    CHECK(a.increments == b.increments);
    CHECK(a.values == b.values);
    CHECK(a.increments != sample_path(g, 3, 5, 43).increments);
    CHECK(a.increments != sample_path(g, 3, 6, 42).increments);
    CHECK(a.values.row(0).isZero());
}

TEST_CASE("coarsen: identity, block sums, composition and shared values") {
    const TimeGrid g(1.0, 2);
    BrownianPath p = sample_path(g, 1, 1, 0);
    const double a = p.increments(0, 0), b = p.increments(1, 0), c = p.increments(2, 0),
                 d = p.increments(3, 0);
    const BrownianPath two = coarsen(p, 2);
    CHECK(two.increments.rows() == 2);
    CHECK(two.increments(0, 0) == a + b);
    CHECK(two.increments(1, 0) == c + d);
    const BrownianPath same = coarsen(p, 1);
    CHECK(same.increments == p.increments);
    CHECK(same.values == p.values);

    const BrownianPath fine = sample_path(TimeGrid(2.0, 10), 2, 3, 7);
    const BrownianPath twice = coarsen(coarsen(fine, 2), 2);
    const BrownianPath once = coarsen(fine, 4);
    CHECK(twice.increments == once.increments);
    CHECK(twice.values == once.values);
    CHECK(once.grid == fine.grid.coarsened(4));
    for (Eigen::Index k = 0; k < once.values.rows(); ++k) {
        REQUIRE(once.values.row(k) == fine.values.row(4 * k));
    }

    CHECK_THROWS(coarsen(fine, 3));
    CHECK_THROWS(coarsen(fine, 2048));
}

TEST_CASE("distributional sanity: KS against the standard normal (warning only)") {
    const TimeGrid g(1.0, 10);
    std::vector<double> z;
    for (std::uint64_t i = 0; z.size() < 100'000; ++i) {
        const BrownianPath p = sample_path(g, 1, 123, i);
        for (Eigen::Index k = 0; k < p.increments.rows() && z.size() < 100'000; ++k) {
            z.push_back(p.increments(k, 0) / std::sqrt(g.step()));
        }
    }
    std::sort(z.begin(), z.end());
    double d = 0.0;
    const double n = static_cast<double>(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double f = 0.5 * std::erfc(-z[i] / std::sqrt(2.0));
        d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
    }
    const double critical = 1.628 / std::sqrt(n);
    if (d >= critical) {
        std::cerr << "warning: KS statistic " << d << " above the 1% critical value " << critical
                  << '\n';
    }
    WARN(d < critical);
}
