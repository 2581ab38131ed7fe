#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rmslab/rng.hpp"
#include "rmslab/schedule.hpp"

using namespace rmslab;

TEST_CASE("derive_schedule computes eta, beta, v0 from the closed forms") {
    const Schedule s = derive_schedule(1.0, 1.0, 0.0, 100, 4, {0.5, 0.5, 0.5, 0.5});
    CHECK(s.eta == 0.05);   // 1/sqrt(400)
    CHECK(s.beta == 0.99);  // 1 - 1/100
    for (double v : s.v0) CHECK(v == 0.25);  // max(0.25, 1/400)

    CHECK(s.eta == s.gamma / std::sqrt(static_cast<double>(s.dim) * static_cast<double>(s.T)));
    CHECK(s.beta == 1.0 - 1.0 / static_cast<double>(s.T));
}

TEST_CASE("zero-variance coordinates fall back to the 1/(dT) floor") {
    const Schedule s = derive_schedule(1.0, 1.0, 0.0, 100, 4, {0.0, 0.0, 0.0, 0.0});
    for (double v : s.v0) {
        CHECK(v == 0.0025);  // 1/400
        CHECK(v > 0.0);
    }
}

TEST_CASE("mixed sigma takes the coordinate-wise max") {
    const Schedule s = derive_schedule(2.0, 0.5, 0.3, 1000, 2, {0.0, 1.0});
    CHECK(s.v0[0] == doctest::Approx(0.5 / 2000.0).epsilon(1e-15));
    CHECK(s.v0[1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("schedules outside the admissibility window are rejected") {
    // T >= e^2/lambda: 5 < e^2 ~ 7.389.
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, 0.0, 5, 4, {1, 1, 1, 1}), std::invalid_argument);
    // Boundary: T = 8 >= e^2 is fine.
    CHECK_NOTHROW(derive_schedule(1.0, 1.0, 0.0, 8, 4, {1, 1, 1, 1}));
    // Smaller lambda pushes the threshold up: e^2/0.5 ~ 14.8.
    CHECK_THROWS_AS(derive_schedule(1.0, 0.5, 0.0, 14, 1, {1}), std::invalid_argument);
    CHECK_NOTHROW(derive_schedule(1.0, 0.5, 0.0, 15, 1, {1}));

    CHECK_THROWS_AS(derive_schedule(0.0, 1.0, 0.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(-1.0, 1.0, 0.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 0.0, 0.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.5, 0.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, 1.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, -0.1, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, 0.0, 100, 1, {-0.5}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, 0.0, 100, 2, {1}), std::invalid_argument);
    const double nan = std::nan("");
    CHECK_THROWS_AS(derive_schedule(nan, 1.0, 0.0, 100, 1, {1}), std::invalid_argument);
    CHECK_THROWS_AS(derive_schedule(1.0, 1.0, 0.0, 100, 1, {nan}), std::invalid_argument);
}

TEST_CASE("derived schedules respect the theorem admissibility invariant") {
    auto rng = make_stream(11, Stream::probe);
    for (int rep = 0; rep < 200; ++rep) {
        const double lambda = 0.05 + 0.95 * rng.next_unit();
        const std::int64_t T =
            static_cast<std::int64_t>(std::ceil(std::numbers::e * std::numbers::e / lambda)) +
            static_cast<std::int64_t>(rng.next() % 5000);
        const std::size_t d = 1 + rng.next() % 8;
        std::vector<double> sigma(d);
        for (double& s : sigma) s = 2.0 * rng.next_unit();
        const Schedule s = derive_schedule(0.1 + rng.next_unit(), lambda,
                                           0.99 * rng.next_unit(), T, d, sigma);
        CHECK(static_cast<double>(s.T) >= std::numbers::e * std::numbers::e / s.lambda);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(s.v0[i] > 0.0);
            CHECK(s.v0[i] ==
                  s.lambda * std::max(sigma[i] * sigma[i],
                                      1.0 / (static_cast<double>(d) * static_cast<double>(T))));
        }
    }
}

TEST_CASE("sigma_s and min_sigma_sq aggregates") {
    const Schedule s = derive_schedule(1.0, 1.0, 0.0, 100, 3, {3.0, 0.0, 4.0});
    CHECK(s.sigma_s() == 5.0);
    CHECK(s.min_sigma_sq() == 0.0);
}

TEST_CASE("pytorch parameter mapping") {
    const TorchParams p0 = pytorch_param_map(0.0, 0.05);
    CHECK(p0.momentum == 0.0);
    CHECK(p0.lr == 0.05);

    const TorchParams p9 = pytorch_param_map(0.9, 0.1);
    CHECK(p9.momentum == 0.9);
    CHECK(p9.lr == doctest::Approx(0.01).epsilon(1e-15));

    CHECK_THROWS_AS(pytorch_param_map(1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(pytorch_param_map(0.5, 0.0), std::invalid_argument);
}

TEST_CASE("pytorch mapping round-trips") {
    // Exact for dyadic values...
    const TorchParams p = pytorch_param_map(0.5, 0.25);
    CHECK(p.lr / (1.0 - p.momentum) == 0.25);
    // ...and within one rounding otherwise.
    auto rng = make_stream(3, Stream::probe);
    for (int i = 0; i < 500; ++i) {
        const double theta = rng.next_unit() * 0.999;
        const double eta = 1e-4 + rng.next_unit();
        const TorchParams q = pytorch_param_map(theta, eta);
        CHECK(q.momentum == theta);
        CHECK(q.lr / (1.0 - q.momentum) == doctest::Approx(eta).epsilon(1e-15));
    }
}
