#include "helpers.hpp"

#include "fdkit/energy.hpp"
#include "fdkit/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdk;

TEST_SUITE("energy") {

TEST_CASE("published runtime to watt-hours") {
    EnergyReport r = energy(176.26, kDesktopCpu, 10);
    CHECK(r.wh == doctest::Approx(176.26 * 163 * 10 / 3600.0));
    CHECK(std::abs(r.wh - 79.81) / 79.81 < 0.005);
    CHECK(r.co2e_g == doctest::Approx(r.wh * 275 / 1000));
    CHECK(r.car_km == doctest::Approx(r.co2e_g / 122));
}

TEST_CASE("avoided energy to co2 and car km") {
    EnergyReport r = savings_report(21000);
    CHECK(r.co2e_g == doctest::Approx(5775));
    CHECK(r.car_km == doctest::Approx(47.336).epsilon(1e-4));
    CHECK(format_fixed(savings_report(35.2).co2e_g, 2) == "9.68");
    CHECK(format_fixed(savings_report(43306.56).co2e_g / 1000, 2) == "11.91");
    EnergyReport z = savings_report(0);
    CHECK(z.co2e_g == 0);
    CHECK(z.car_km == 0);
}

TEST_CASE("zero seconds is all zeros") {
    EnergyReport r = energy(0, kDesktopGpu);
    CHECK(r.wh == 0);
    CHECK(r.co2e_g == 0);
    CHECK(r.car_km == 0);
}

TEST_CASE("linearity in seconds") {
    Rng rng(2);
    for (int i = 0; i < 100; ++i) {
        double a = rng.uniform() * 1e4, b = rng.uniform() * 1e4, m = 1 + rng.below(10);
        auto ra = energy(a, kDesktopCpu, m), rb = energy(b, kDesktopCpu, m), rab = energy(a + b, kDesktopCpu, m);
        CHECK(rab.wh == doctest::Approx(ra.wh + rb.wh).epsilon(1e-12));
        CHECK(rab.co2e_g == doctest::Approx(ra.co2e_g + rb.co2e_g).epsilon(1e-12));
        CHECK(rab.car_km == doctest::Approx(ra.car_km + rb.car_km).epsilon(1e-12));
    }
}

TEST_CASE("custom constants and invalid input") {
    EnergyConstants k{500, 100};
    auto r = energy(3600, {"x", 1000}, 1, k);
    CHECK(r.wh == 1000);
    CHECK(r.co2e_g == 500);
    CHECK(r.car_km == 5);
    CHECK_THROWS_AS(energy(-1, kDesktopCpu), ValidationError);
    CHECK_THROWS_AS(energy(1, {"x", 0}), ValidationError);
    CHECK_THROWS_AS(energy(1, kDesktopCpu, 0.5), ValidationError);
    CHECK_THROWS_AS(savings_report(-1), ValidationError);
}

}
