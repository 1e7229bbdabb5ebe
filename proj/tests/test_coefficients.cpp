#include "reflect/coefficients.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace reflect;

namespace {

CoefficientField scalar_field(std::function<double(double)> s, std::function<double(double)> b) {
    CoefficientField f;
    f.name = "scalar";
    f.dim = 1;
    f.sigma = [s](Scalar, ConstVectorRef x, MatrixRef out) { out(0, 0) = s(x(0)); };
    f.drift = [b](Scalar, ConstVectorRef x, VectorRef out) { out(0) = b(x(0)); };
    return f;
}

SamplingBox box(std::size_t samples = 20'000, double radius = 10.0) {
    SamplingBox sb;
    sb.samples = samples;
    sb.box_radius = radius;
    sb.rng_seed = 17;
    return sb;
}

}  // namespace

TEST_CASE("linear growth examples") {
    auto constant = scalar_field([](double) { return 1.0; }, [](double) { return 0.0; });
    auto r1 = check_linear_growth(constant, 1.0, box());
    CHECK(r1.pass);
    CHECK(r1.max_ratio <= 1.0);

    auto linear = scalar_field([](double x) { return x; }, [](double) { return 0.0; });
    auto r2 = check_linear_growth(linear, 1.0, box());
    CHECK(r2.pass);
    CHECK(r2.max_ratio < 1.0);

    auto square = scalar_field([](double x) { return x * x; }, [](double) { return 0.0; });
    auto r3 = check_linear_growth(square, 1.0, box());
    CHECK_FALSE(r3.pass);
    REQUIRE(r3.violating_point.has_value());
    // ratio x^4 / (1 + x^2) peaks at the edge of the box
    CHECK(std::abs((*r3.violating_point)(0)) > 9.9);
    const double x = (*r3.violating_point)(0);
    CHECK(r3.max_ratio == doctest::Approx(x * x * x * x / (1 + x * x)));
}

TEST_CASE("Lipschitz examples") {
    auto sine = scalar_field([](double x) { return std::sin(x); }, [](double) { return 0.0; });
    CHECK(check_lipschitz(sine, 1.0, box()).pass);

    auto sign = scalar_field([](double x) { return x < 0 ? -1.0 : 1.0; }, [](double) { return 0.0; });
    // a jump of 2 refutes L once some pair straddles 0 closer than 2 / sqrt(L)
    for (double L : {1.0, 1e2, 1e4}) {
        CAPTURE(L);
        auto r = check_lipschitz(sign, L, box(100'000));
        CHECK_FALSE(r.pass);
        REQUIRE(r.violating_pair.has_value());
        CHECK(r.violating_pair->first(0) * r.violating_pair->second(0) < 0.0);
    }

    auto affine = scalar_field([](double x) { return 2.0 * x; }, [](double x) { return x; });
    auto q = check_lipschitz(affine, 5.0, box());
    CHECK(q.pass);
    CHECK(q.max_quotient == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("non-finite coefficient output is an error") {
    auto bad = scalar_field([](double x) { return x > 5 ? std::numeric_limits<double>::quiet_NaN() : 1.0; },
                            [](double) { return 0.0; });
    CHECK_THROWS_AS(check_linear_growth(bad, 1.0, box()), NumericalError);
}

TEST_CASE("catalog entries satisfy their declared constants") {
    SamplingBox sb = box(100'000, 10.0);
    for (const auto& [name, defaults] : catalog_defaults()) {
        CAPTURE(name);
        const CatalogEntry entry = make_catalog_entry(name);
        REQUIRE(entry.field.declared_growth_C.has_value());
        CHECK(check_linear_growth(entry.field, *entry.field.declared_growth_C, sb).pass);
        if (entry.has_tag(CoefficientTag::Lipschitz)) {
            REQUIRE(entry.field.declared_lipschitz_L.has_value());
            CHECK(check_lipschitz(entry.field, *entry.field.declared_lipschitz_L, sb).pass);
        }
    }
    CHECK(make_catalog_entry("schmidt1d").has_tag(CoefficientTag::Discontinuous));
    CHECK_FALSE(check_lipschitz(make_catalog_entry("schmidt1d").field, 1e3, sb).pass);
}

TEST_CASE("catalog rejects unknown names and parameters") {
    CHECK_THROWS_AS(make_catalog_entry("nope"), std::invalid_argument);
    CHECK_THROWS_AS(make_catalog_entry("ou1d", {{"kapa", 1.0}}), std::invalid_argument);
    const auto ou = make_catalog_entry("ou1d", {{"kappa", 2.0}});
    CHECK(ou.field.drift_at(0.0, Vector::Constant(1, 1.5))(0) == doctest::Approx(-3.0));
    const auto gbm = make_catalog_entry("gbm-box", {{"dim", 3.0}});
    CHECK(gbm.field.dim == 3);
}
