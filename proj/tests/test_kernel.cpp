#include <doctest.h>

#include <cmath>

#include "srl/errors.hpp"
#include "srl/kernel.hpp"
#include "srl/rng.hpp"
#include "support/oracles.hpp"

using namespace srl;

namespace {

std::vector<double> random_scores(std::uint64_t seed, int n, double scale = 2.0) {
    TrajectoryRng rng{seed, 2};
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = scale * rng.normal(0, i);
    return y;
}

std::vector<double> random_simplex(std::uint64_t seed, int n) {
    TrajectoryRng rng{seed, 3};
    std::vector<double> x(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = -std::log(rng.uniform(0, i));
        sum += x[i];
    }
    for (double& v : x) v /= sum;
    return x;
}

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

// A strictly convex separable kernel that is neither entropy nor quadratic:
// theta(z) = z^2/2 + z log z (steep, K = 1).
PenaltyKernel mixed_kernel() {
    return PenaltyKernel::separable(
        "quad-entropy",
        [](double z) { return 0.5 * z * z + (z > 0.0 ? z * std::log(z) : 0.0); },
        [](double z) { return z + 1.0 + std::log(z); },
        [](double z) { return 1.0 + 1.0 / z; },
        [](double z) { return -1.0 / (z * z); }, true, 1.0);
}

}  // namespace

TEST_CASE("logit choice map") {
    const PenaltyKernel k = PenaltyKernel::entropy();
    SUBCASE("symmetry") {
        const auto x = choice_map(k, {0.0, 0.0});
        CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(0.5).epsilon(1e-14));
    }
    SUBCASE("unit score gap") {
        const auto x = choice_map(k, {1.0, 0.0});
        CHECK(x[0] == doctest::Approx(0.7310585786300049).epsilon(1e-12));
        CHECK(x[1] == doctest::Approx(0.2689414213699951).epsilon(1e-12));
    }
    SUBCASE("overflow safety") {
        const auto x = choice_map(k, {900.0, 0.0});
        CHECK(x[0] == doctest::Approx(1.0));
        CHECK(std::isfinite(x[1]));
    }
    SUBCASE("non-finite input rejected") {
        CHECK_THROWS_AS(choice_map(k, {std::nan(""), 0.0}), SimulationError);
    }
}

TEST_CASE("projection choice map") {
    const PenaltyKernel k = PenaltyKernel::quadratic();
    SUBCASE("spec point") {
        const auto x = choice_map(k, {0.5, 0.2, -0.1});
        CHECK(x[0] == doctest::Approx(19.0 / 30.0).epsilon(1e-12));
        CHECK(x[1] == doctest::Approx(10.0 / 30.0).epsilon(1e-12));
        CHECK(x[2] == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
    }
    SUBCASE("matches the brute-force oracle") {
        for (std::uint64_t s = 0; s < 200; ++s) {
            const int n = 2 + static_cast<int>(s % 9);
            const auto y = random_scores(s, n);
            const auto x = choice_map(k, y);
            const auto ref = oracles::project_simplex_bruteforce(y);
            for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("generic separable solver") {
    SUBCASE("reproduces closed-form logit") {
        const PenaltyKernel entropy = PenaltyKernel::entropy();
        double worst = 0.0;
        for (std::uint64_t s = 0; s < 1000; ++s) {
            const int n = 2 + static_cast<int>(s % 7);
            const auto y = random_scores(s + 5000, n, 3.0);
            const auto direct = choice_map(entropy, y);
            const auto solved = choice_map_separable(entropy, y);
            for (int i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(direct[i] - solved[i]));
        }
        CHECK(worst <= 1e-10);
    }
    SUBCASE("reproduces the projection for the quadratic kernel") {
        const PenaltyKernel quad = PenaltyKernel::quadratic();
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto y = random_scores(s + 9000, 4);
            const auto direct = choice_map(quad, y);
            const auto solved = choice_map_separable(quad, y);
            for (int i = 0; i < 4; ++i)
                CHECK(solved[i] == doctest::Approx(direct[i]).epsilon(1e-10));
        }
    }
    SUBCASE("huge score spreads stay finite") {
        const auto x = choice_map_separable(PenaltyKernel::entropy(), {2000.0, 0.0, -3000.0});
        CHECK(x[0] == doctest::Approx(1.0));
    }
    SUBCASE("custom kernel goes through the solver") {
        const PenaltyKernel k = mixed_kernel();
        const auto x = choice_map(k, {0.4, -0.2, 0.1});
        double sum = 0.0;
        for (double v : x) {
            CHECK(v > 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        // KKT residual: y_a - theta'(x_a) equal across coordinates.
        const double z0 = 0.4 - k.theta_d1(x[0]);
        CHECK(-0.2 - k.theta_d1(x[1]) == doctest::Approx(z0).epsilon(1e-9));
        CHECK(0.1 - k.theta_d1(x[2]) == doctest::Approx(z0).epsilon(1e-9));
    }
    SUBCASE("malformed kernel reported") {
        // Decreasing "derivative" breaks the KKT monotonicity.
        const PenaltyKernel bad = PenaltyKernel::separable(
            "bad", [](double z) { return -z * z; }, [](double z) { return -2.0 * z; },
            [](double) { return -2.0; }, [](double) { return 0.0; }, false, 1.0);
        CHECK_THROWS_AS(choice_map_separable(bad, {0.3, -0.4, 0.1}), SimulationError);
    }
}

TEST_CASE("conjugate values") {
    const PenaltyKernel entropy = PenaltyKernel::entropy();
    const PenaltyKernel quad = PenaltyKernel::quadratic();
    SUBCASE("entropy log-sum-exp") {
        CHECK(conjugate_value(entropy, {0.0, 0.0}) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-14));
        CHECK(conjugate_value(entropy, {1000.0, 1000.0}) ==
              doctest::Approx(1000.0 + std::log(2.0)));
    }
    SUBCASE("quadratic at a vertex-forcing score") {
        CHECK(conjugate_value(quad, {10.0, 0.0, 0.0}) == doctest::Approx(9.5));
    }
    SUBCASE("fenchel inequality against random feasible points") {
        for (std::uint64_t s = 0; s < 100; ++s) {
            const auto y = random_scores(s + 200, 4);
            const auto x = random_simplex(s, 4);
            for (const auto& k : {entropy, quad}) {
                double lhs = -k.penalty(x);
                for (int i = 0; i < 4; ++i) lhs += y[i] * x[i];
                CHECK(conjugate_value(k, y) >= lhs - 1e-12);
            }
        }
    }
}

TEST_CASE("fenchel coupling") {
    const PenaltyKernel entropy = PenaltyKernel::entropy();
    SUBCASE("zero exactly at the choice point") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto y = random_scores(s + 300, 3);
            const auto q = choice_map(entropy, y);
            CHECK(fenchel_coupling(entropy, q, y) == doctest::Approx(0.0).epsilon(1e-9));
        }
    }
    SUBCASE("vertex benchmark at zero scores") {
        CHECK(fenchel_coupling(entropy, {1.0, 0.0}, {0.0, 0.0}) ==
              doctest::Approx(std::log(2.0)).epsilon(1e-14));
    }
    SUBCASE("strong-convexity lower bound") {
        for (const auto& k : {entropy, PenaltyKernel::quadratic()}) {
            double worst = 0.0;
            for (std::uint64_t s = 0; s < 10'000; ++s) {
                const int n = 2 + static_cast<int>(s % 5);
                const auto y = random_scores(s + 11'000, n);
                const auto p = random_simplex(s + 1, n);
                const auto q = choice_map(k, y);
                const double f = fenchel_coupling(k, p, y);
                const double half_dist =
                    0.5 * k.strong_convexity() * norm2(q, p) * norm2(q, p);
                worst = std::min(worst, f - half_dist);
            }
            CHECK(worst >= -1e-10);
        }
    }
    SUBCASE("off-simplex benchmark rejected") {
        CHECK_THROWS_AS(fenchel_coupling(entropy, {0.9, 0.3}, {0.0, 0.0}), ConfigError);
    }
    SUBCASE("state bundle carries the value") {
        const auto st = make_fenchel_state(entropy, {0.5, 0.5}, {0.3, -0.3});
        CHECK(st.value >= 0.0);
        CHECK(st.benchmark.size() == 2);
    }
}

TEST_CASE("conjugate hessian diagonal") {
    const PenaltyKernel entropy = PenaltyKernel::entropy();
    const PenaltyKernel quad = PenaltyKernel::quadratic();
    SUBCASE("entropy at zero scores gives x(1-x)") {
        const auto h = conjugate_hessian_diag(entropy, {0.0, 0.0});
        CHECK_FALSE(h.degenerate);
        CHECK(h.diag[0] == doctest::Approx(0.25).epsilon(1e-12));
        CHECK(h.diag[1] == doctest::Approx(0.25).epsilon(1e-12));
    }
    SUBCASE("projection on a full interior support gives 1 - 1/n") {
        const auto h = conjugate_hessian_diag(quad, {0.05, 0.0, -0.05});
        CHECK_FALSE(h.degenerate);
        for (double d : h.diag) CHECK(d == doctest::Approx(1.0 - 1.0 / 3.0).epsilon(1e-12));
    }
    SUBCASE("vertex support is degenerate") {
        const auto h = conjugate_hessian_diag(quad, {10.0, 0.0, 0.0});
        CHECK(h.degenerate);
        for (double d : h.diag) CHECK(d == 0.0);
    }
    SUBCASE("bounded by 1/K") {
        for (const auto& k : {entropy, quad, mixed_kernel()}) {
            for (std::uint64_t s = 0; s < 300; ++s) {
                const auto y = random_scores(s + 21'000, 5);
                for (double d : conjugate_hessian_diag(k, y).diag) {
                    CHECK(d >= -1e-12);
                    CHECK(d <= 1.0 / k.strong_convexity() + 1e-9);
                }
            }
        }
    }
    SUBCASE("matches central differences of the conjugate") {
        for (const auto& k : {entropy, mixed_kernel()}) {
            const std::vector<double> y = {0.3, -0.1, 0.2};
            const auto h = conjugate_hessian_diag(k, y);
            const double step = 1e-5;
            for (int i = 0; i < 3; ++i) {
                auto yp = y, ym = y;
                yp[i] += step;
                ym[i] -= step;
                const double fd = (conjugate_value(k, yp) - 2.0 * conjugate_value(k, y) +
                                   conjugate_value(k, ym)) /
                                  (step * step);
                CHECK(h.diag[i] == doctest::Approx(fd).epsilon(1e-4));
            }
        }
    }
}

TEST_CASE("choice map regularity properties") {
    const PenaltyKernel entropy = PenaltyKernel::entropy();
    const PenaltyKernel quad = PenaltyKernel::quadratic();
    SUBCASE("shift invariance") {
        for (const auto& k : {entropy, quad}) {
            for (std::uint64_t s = 0; s < 1000; ++s) {
                const auto y = random_scores(s + 31'000, 4);
                auto ys = y;
                const double c = 3.7 - static_cast<double>(s % 7);
                for (double& v : ys) v += c;
                const auto a = choice_map(k, y);
                const auto b = choice_map(k, ys);
                for (int i = 0; i < 4; ++i)
                    CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("1/K Lipschitz") {
        for (const auto& k : {entropy, quad}) {
            double worst = 0.0;
            for (std::uint64_t s = 0; s < 10'000; ++s) {
                const int n = 2 + static_cast<int>(s % 5);
                const auto y1 = random_scores(2 * s + 41'000, n);
                const auto y2 = random_scores(2 * s + 41'001, n);
                const double lhs = norm2(choice_map(k, y1), choice_map(k, y2));
                const double rhs = norm2(y1, y2) / k.strong_convexity();
                worst = std::max(worst, lhs - rhs);
            }
            CHECK(worst <= 1e-12);
        }
    }
    SUBCASE("gradient identity against finite differences") {
        const double step = 1e-5;
        for (const auto& k : {entropy, quad}) {
            int checked = 0;
            for (std::uint64_t s = 0; s < 200; ++s) {
                const auto y = random_scores(s + 51'000, 4);
                const auto x = choice_map(k, y);
                for (int i = 0; i < 4; ++i) {
                    auto yp = y, ym = y;
                    yp[i] += step;
                    ym[i] -= step;
                    // Central differences need a locally smooth conjugate; for
                    // the projection skip straddled support changes.
                    if (k.kind() == PenaltyKernel::Kind::Quadratic) {
                        const auto sp = choice_map(k, yp);
                        const auto sm = choice_map(k, ym);
                        bool same = true;
                        for (int j = 0; j < 4; ++j)
                            same = same && ((sp[j] > 0.0) == (sm[j] > 0.0));
                        if (!same) continue;
                    }
                    const double fd =
                        (conjugate_value(k, yp) - conjugate_value(k, ym)) / (2.0 * step);
                    CHECK(x[i] == doctest::Approx(fd).epsilon(1e-6));
                    ++checked;
                }
            }
            CHECK(checked > 500);
        }
    }
    SUBCASE("score collapse drives coordinates extinct") {
        const auto x = choice_map(entropy, {-1000.0, 0.0});
        CHECK(x[0] < 1e-12);
    }
}

TEST_CASE("kernel bookkeeping") {
    SUBCASE("penalty range over the simplex") {
        CHECK(PenaltyKernel::entropy().omega(2) == doctest::Approx(std::log(2.0)));
        CHECK(PenaltyKernel::entropy().omega(5) == doctest::Approx(std::log(5.0)));
        CHECK(PenaltyKernel::quadratic().omega(4) == doctest::Approx(0.5 - 0.125));
    }
    SUBCASE("curvature validation") {
        CHECK_NOTHROW(PenaltyKernel::entropy().validate());
        CHECK_NOTHROW(PenaltyKernel::quadratic().validate());
        CHECK_NOTHROW(mixed_kernel().validate());
        const PenaltyKernel weak = PenaltyKernel::separable(
            "weak", [](double z) { return 0.5 * z * z; }, [](double z) { return z; },
            [](double) { return 0.5; }, [](double) { return 0.0; }, false, 1.0);
        CHECK_THROWS_AS(weak.validate(), ConfigError);
    }
    SUBCASE("registry") {
        CHECK(kernel_by_name("entropy").kind() == PenaltyKernel::Kind::Entropy);
        CHECK(kernel_by_name("quadratic").kind() == PenaltyKernel::Kind::Quadratic);
        CHECK_THROWS_AS(kernel_by_name("nope"), ConfigError);
        register_kernel(mixed_kernel());
        CHECK(kernel_by_name("quad-entropy").steep());
    }
    SUBCASE("phi inverts the slope") {
        const PenaltyKernel entropy = PenaltyKernel::entropy();
        CHECK(entropy.phi(1.0) == doctest::Approx(1.0));
        CHECK(entropy.phi(1.0 + std::log(0.25)) == doctest::Approx(0.25));
        const PenaltyKernel k = mixed_kernel();
        for (double z : {0.1, 0.45, 0.9})
            CHECK(k.phi(k.theta_d1(z)) == doctest::Approx(z).epsilon(1e-10));
    }
}
