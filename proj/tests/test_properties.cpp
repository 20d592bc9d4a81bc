#include "doctest.h"
#include "property_suite.hpp"

using namespace growthflow;

TEST_CASE("growth bound inequalities") {
    for (const GrowthBound& h : props::built_in()) {
        CHECK(h(h(0.0)) / h(0.0) <= scaling_constant(h));
        for (const props::Result& r : {props::subadditivity(h), props::scaling(h), props::inverse_derivative(h)}) {
            CAPTURE(r.name);
            CHECK(r.cases >= 1000);
            CHECK(r.failures == 0);
        }
    }
}

TEST_CASE("mubar sub-scaling and product inequality") {
    const props::Result r = props::mubar_scaling();
    CHECK(r.failures == 0);
}

TEST_CASE("gamma_t semigroup in t") {
    for (const GrowthBound& h : {constant_bound(), power_bound(0.25), quarterlog_bound(), linear_bound()}) {
        const props::Result r = props::gamma_semigroup(h);
        CAPTURE(r.name);
        CHECK(r.failures == 0);
    }
}

TEST_CASE("piecewise definitions of mubar, chi_t and phi_alpha") {
    CHECK(props::piecewise().failures == 0);
    CHECK(mubar(props::kInvE) == doctest::Approx(props::kInvE).epsilon(1e-15));
    CHECK(chi_t(1.0, 1.0, 1.0) == 1.0);
}

TEST_CASE("chi_t scaling for a in [0, 1]") {
    const props::Result r = props::chi_scaling();
    CHECK(r.cases == 10000);
    CHECK(r.failures == 0);
}
