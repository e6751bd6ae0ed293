#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pinlab/error.hpp"
#include "pinlab/periodic_cell.hpp"

using namespace pinlab;
using std::numbers::pi;

namespace {

CellParams reference(double s = 0.75) { return make_cell_params(4.0, 0.6, 0.3, 1.0, s); }

// zeta by direct summation with an Euler-Maclaurin tail
double zeta_sum(double s)
{
    const int N = 100000;
    double acc = 0.0;
    for (int k = N - 1; k >= 1; --k) acc += std::pow(k, -s);
    const double n = N;
    return acc + std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1) / 12.0;
}

CellParams random_params(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double s = 0.5 + 0.45 * U(rng);
    const double a = 2.0 + 18.0 * U(rng);
    const double b = (0.05 + 0.9 * U(rng)) * a / 4.0;
    const double delta = (0.05 + 0.9 * U(rng)) * std::min(1.0, b);
    return make_cell_params(a, b, delta, 0.2 + U(rng), s);
}

}  // namespace

TEST_CASE("cell parameter formula and rejections")
{
    const auto p = reference();
    CHECK(p.rho == doctest::Approx(0.75));
    CHECK(p.F1 == doctest::Approx(3.0 / 13.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_cell_params(4.0, 1.0, 0.3, 1.0, 0.75), ConfigError);  // b >= a/4
    CHECK_THROWS_AS(make_cell_params(4.0, 0.5, 0.5, 1.0, 0.75), ConfigError);  // delta = b
    CHECK_THROWS_AS(make_cell_params(20.0, 3.0, 1.0, 1.0, 0.75), ConfigError);  // delta = 1
    CHECK_THROWS_AS(make_cell_params(4.0, 0.6, 0.3, 0.0, 0.75), ConfigError);
    CHECK_THROWS_AS(make_cell_params(4.0, 0.6, 0.3, 1.0, 0.4), ConfigError);
}

TEST_CASE("forcing: plateaus, periodicity, zero average")
{
    const auto p = reference();
    CHECK(eval_g_tilde(p, 0.7) == p.F2);
    CHECK(eval_g_tilde(p, 0.8) == -p.F1);
    CHECK(eval_g_tilde(p, 8.7) == p.F2);
    CHECK(eval_g(p, 0.0) == doctest::Approx(p.F2));
    CHECK(eval_g(p, 0.59) == doctest::Approx(p.F2));
    CHECK(eval_g(p, p.a) == doctest::Approx(-p.F1));
    CHECK(eval_g(p, 0.91) == doctest::Approx(-p.F1));
    CHECK(eval_g(p, -0.3) == doctest::Approx(eval_g(p, 0.3)));
    using boost::math::quadrature::gauss_kronrod;
    double total = 0.0;
    const double cuts[] = {-p.a, -p.b - p.delta, -p.b, p.b, p.b + p.delta, p.a};
    for (int i = 0; i + 1 < 6; ++i)
        total += gauss_kronrod<double, 61>::integrate([&](double x) { return eval_g(p, x); }, cuts[i], cuts[i + 1],
                                                      15, 1e-14);
    CHECK(std::fabs(total) < 1e-10);
}

TEST_CASE("coefficients solve the cell problem mode by mode")
{
    // A v = g_tilde with A = -(-Delta)^s: c_k = -G_k / (k pi / a)^{2s}, G_k from quadrature of g_tilde
    using boost::math::quadrature::gauss_kronrod;
    for (double s : {0.5, 0.8}) {
        const auto p = reference(s);
        const FourierProfile prof(p, 64);
        for (int k : {1, 2, 7, 40}) {
            auto g = [&](double x) { return eval_g_tilde(p, x) * std::cos(k * pi * x / p.a); };
            const double Gk = (gauss_kronrod<double, 61>::integrate(g, -p.a, -p.rho)
                               + gauss_kronrod<double, 61>::integrate(g, -p.rho, p.rho)
                               + gauss_kronrod<double, 61>::integrate(g, p.rho, p.a))
                              / p.a;
            const double ck = -Gk / std::pow(k * pi / p.a, 2.0 * s);
            CHECK(prof.coefficients()[k - 1] == doctest::Approx(ck).epsilon(1e-10));
        }
    }
}

TEST_CASE("profile symmetry, mean and grid sampling consistency")
{
    const auto p = reference();
    const FourierProfile prof(p, 2048);
    for (double x : {0.1, 0.75, 2.2, 3.9}) {
        CHECK(prof.v_tilde(x) == doctest::Approx(prof.v_tilde(-x)).epsilon(1e-13));
        CHECK(prof.v(x) == doctest::Approx(prof.v(x + 2 * p.a)).epsilon(1e-11));
    }
    const PeriodicGrid g(2 * p.a, 512, -p.a);
    const auto vt = prof.sample_v_tilde(g);
    CHECK(std::fabs(vt.mean()) < 1e-12);
    for (std::size_t i = 0; i < 512; i += 37) CHECK(vt[i] == doctest::Approx(prof.v_tilde(g.x(i))).epsilon(1e-11));
    const auto sl = prof.sample_v_slope(g);
    for (std::size_t i = 0; i < 512; i += 41) CHECK(sl[i] == doctest::Approx(prof.v_slope(g.x(i))).scale(1.0).epsilon(1e-10));
    CHECK_THROWS_AS(prof.sample_v(PeriodicGrid(3.0, 64)), ConfigError);
}

TEST_CASE("tail bound dominates the discarded series")
{
    const auto p = reference();
    const FourierProfile prof(p, 64);
    const double amp = 2.0 * std::pow(p.a, 1.5) * (p.F1 + p.F2) / std::pow(pi, 2.5);
    double rest = 0.0;
    for (int k = 65; k < 2000000; ++k) rest += amp * std::pow(k, -2.5);
    CHECK(rest <= prof.tail_bound());
    CHECK(prof.tail_bound() == doctest::Approx(amp * std::pow(64.0, -1.5) / 1.5));
    const auto m = modes_for_tail(p, 1e-6);
    CHECK((m & (m - 1)) == 0);
    CHECK(FourierProfile(p, m).tail_bound() < 1e-6);
    CHECK(FourierProfile(p, m / 2).tail_bound() >= 1e-6);
}

TEST_CASE("sup-norm bound: closed formula example and branch switch")
{
    const auto p = reference(0.75);
    const double expected = 2.0 * (16.0 / 13.0) / std::pow(pi, 1.5) * zeta_sum(1.5) * 2.0 * 0.75;
    CHECK(linf_bound(p) == doctest::Approx(expected).epsilon(1e-9));
    const auto h = reference(0.5);
    CHECK(linf_bound(h) == doctest::Approx(2.0 * (16.0 / 13.0) * 0.75 * (2.0 + std::log(4.0) - std::log(pi * 0.75)) / pi));
}

TEST_CASE("sup-norm bound holds on random parameters")
{
    std::mt19937_64 rng(21);
    for (int t = 0; t < 12; ++t) {
        const auto p = random_params(rng);
        const FourierProfile prof(p, 4096);
        const auto vt = prof.sample_v_tilde(PeriodicGrid(2 * p.a, 4096));
        const auto v = prof.sample_v(PeriodicGrid(2 * p.a, 4096));
        CHECK(v.max_abs() <= vt.max_abs() + 1e-12);
        CHECK(vt.max_abs() <= linf_bound(p));
    }
}

TEST_CASE("monotonicity on [0, a], reflection and flat endpoints")
{
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        const auto p = random_params(rng);
        const auto rep = check_monotone(FourierProfile(p, 8192), 2048);
        CHECK(rep.passed);
        CHECK(rep.min_slope_v_tilde > 0.0);
        CHECK(rep.max_reflection_error < 1e-12);
        CHECK(rep.endpoint_slope < 1e-8);
    }
    CHECK_THROWS_AS(check_monotone(FourierProfile(reference(), 64), 100), ConfigError);
}

TEST_CASE("second derivative sign: positive on the plateau set, negative off it")
{
    const auto p = reference(0.75);
    const FourierProfile prof(p, 1 << 16);
    const PeriodicGrid g(2 * p.a, 1 << 13, -p.a);
    const auto v = prof.sample_v_tilde(g);
    const double h = g.spacing();
    const double margin = 0.05;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
        const double x = std::fabs(g.x(i));
        const double d2 = (v[i + 1] - 2 * v[i] + v[i - 1]) / (h * h);
        if (x < p.rho - margin) CHECK(d2 > 0.0);
        else if (x > p.rho + margin) CHECK(d2 < 0.0);
    }
}

TEST_CASE("complementary-order operator of the forcing has the plateau sign")
{
    for (double s : {0.5, 0.75}) {
        const auto p = reference(s);
        PointwiseOptions opt;
        opt.period = 2 * p.a;
        opt.near_radius = 1e-3;
        const FractionalOrder comp = FractionalOrder(s).complement();
        auto g = [&](double x) { return eval_g_tilde(p, x); };
        CHECK(apply_pointwise_integral(g, 0.2, comp, opt).value > 0.0);
        CHECK(apply_pointwise_integral(g, 2.0, comp, opt).value < 0.0);
        CHECK(apply_pointwise_integral(g, p.a, comp, opt).value < 0.0);
    }
}

TEST_CASE("mollified profile solves the mollified cell problem on a resolving grid")
{
    const auto p = reference(0.75);
    const FourierProfile prof(p, 1 << 15);
    const auto r = cell_residual(prof, 8192, true);
    CHECK(r.passed);
    CHECK(r.max_error < 1e-6);
}

TEST_CASE("Hermite table reproduces the series")
{
    const auto p = reference(0.6);
    const FourierProfile prof(p, 4096);
    const ProfileTable t(prof, 1 << 14);
    for (double x = -9.0; x < 9.0; x += 0.173) {
        CHECK(t(x) == doctest::Approx(prof.v(x)).scale(1.0).epsilon(1e-9));
        CHECK(t.slope(x) == doctest::Approx(prof.v_slope(x)).scale(1.0).epsilon(1e-6));
    }
}

TEST_CASE("profile CSV layout")
{
    const FourierProfile prof(reference(), 128);
    std::stringstream ss;
    write_profile_csv(ss, prof, 64);
    std::string line;
    std::getline(ss, line);
    CHECK(line.rfind("# pinlab-profile v1", 0) == 0);
    std::getline(ss, line);
    CHECK(line == "x,v,g");
    int rows = 0;
    while (std::getline(ss, line)) ++rows;
    CHECK(rows == 64);
}
