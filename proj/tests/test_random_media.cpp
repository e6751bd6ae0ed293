#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/random_media.hpp"

using namespace pinlab;

namespace {
const BumpProfile bump(1.0, 1.5);

ObstacleField single(double x, double y, double strength, bool periodic = false)
{
    return ObstacleField({{x, y, strength, 0}}, bump, 1.0, {0.0, 10.0, 1.5, 5.0}, 0, StrengthLaw::point_mass(strength),
                         periodic);
}
}  // namespace

TEST_CASE("bump profile: plateau, support and range")
{
    CHECK_THROWS_AS(BumpProfile(1.0, 1.4), ConfigError);
    CHECK(bump(0.0, 0.0) == 1.0);
    CHECK(bump(1.0, -1.0) == 1.0);  // max-norm corner of the plateau
    CHECK(bump(1.5, 0.0) == 0.0);
    CHECK(bump(1.2, 1.2) == 0.0);
    for (double r = 0.0; r < 2.0; r += 0.01) {
        const double v = bump(r * 0.6, r * 0.8);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    // nonincreasing along rays once past the plateau
    double prev = 1.0;
    for (double r = std::sqrt(2.0); r <= 1.5; r += 1e-3) {
        const double v = bump(r / std::sqrt(2.0), r / std::sqrt(2.0));
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("smoothstep matches its derivative and is flat to third order at both ends")
{
    CHECK(BumpProfile::smoothstep(0.0) == 0.0);
    CHECK(BumpProfile::smoothstep(1.0) == 1.0);
    CHECK(BumpProfile::smoothstep(0.5) == doctest::Approx(0.5));
    for (double t = 0.05; t < 1.0; t += 0.05) {
        const double h = 1e-6;
        const double fd = (BumpProfile::smoothstep(t + h) - BumpProfile::smoothstep(t - h)) / (2 * h);
        CHECK(BumpProfile::smoothstep_slope(t) == doctest::Approx(fd).epsilon(1e-7));
    }
    CHECK(BumpProfile::smoothstep(1e-3) < 1e-10);
    CHECK(1.0 - BumpProfile::smoothstep(1.0 - 1e-3) < 1e-10);
}

TEST_CASE("vertical bump slope agrees with finite differences")
{
    for (double dx : {0.0, 0.3, 1.1}) {
        for (double dy = -1.45; dy < 1.45; dy += 0.07) {
            const double h = 1e-7;
            const double fd = (bump(dx, dy + h) - bump(dx, dy - h)) / (2 * h);
            CHECK(bump.slope_y(dx, dy) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
        }
    }
}

TEST_CASE("force is continuous across the transition radii")
{
    const auto f = single(5.0, 3.0, 2.0);
    for (double r : {std::sqrt(2.0), 1.5}) {
        const double x = 5.0 + r / std::sqrt(2.0), y = 3.0 + r / std::sqrt(2.0);
        const double h = 1e-7;
        CHECK(std::fabs(f.force(x + h, y) - f.force(x - h, y)) < 1e-6);
        const double d1 = (f.force(x + 2 * h, y) - f.force(x + h, y)) / h;
        const double d0 = (f.force(x - h, y) - f.force(x - 2 * h, y)) / h;
        CHECK(std::fabs(d1 - d0) < 1e-6);
    }
}

TEST_CASE("eval_obstacle_force examples")
{
    const auto f = single(5.0, 3.0, 2.0);
    CHECK(eval_obstacle_force(f, 5.0, 3.0) == 2.0);
    CHECK(eval_obstacle_force(f, 5.0, 4.6) == 0.0);
    const ObstacleField two({{5.0, 3.0, 1.0, 0}, {5.0, 3.0, 2.0, 1}}, bump, 1.0, {0.0, 10.0, 1.5, 5.0}, 0,
                            StrengthLaw::uniform(1.0, 2.0));
    CHECK(two.force(5.0, 3.0) == 3.0);
}

TEST_CASE("periodic fields wrap horizontally")
{
    const auto f = single(9.8, 3.0, 1.0, true);
    CHECK(f.force(0.2, 3.0) == 1.0);
    CHECK(f.force(10.2, 3.0) == 1.0);
    const auto g = single(9.8, 3.0, 1.0, false);
    CHECK(g.force(0.2, 3.0) == 0.0);
}

TEST_CASE("sampling: empty at zero intensity, deterministic, inside the window")
{
    const Window w{-50.0, 50.0, 1.5, 21.5};
    const auto law = StrengthLaw::uniform(0.5, 2.0);
    CHECK(sample_obstacles(0.0, w, law, bump, 3).obstacles().empty());
    const auto a = sample_obstacles(0.2, w, law, bump, 7);
    const auto b = sample_obstacles(0.2, w, law, bump, 7);
    REQUIRE(a.obstacles().size() == b.obstacles().size());
    for (std::size_t i = 0; i < a.obstacles().size(); ++i) {
        CHECK(a.obstacles()[i].x == b.obstacles()[i].x);
        CHECK(a.obstacles()[i].y == b.obstacles()[i].y);
        CHECK(a.obstacles()[i].strength == b.obstacles()[i].strength);
        CHECK(w.contains(a.obstacles()[i].x, a.obstacles()[i].y));
        CHECK(a.obstacles()[i].strength >= 0.5);
        CHECK(a.obstacles()[i].strength <= 2.0);
    }
    CHECK_THROWS_AS(sample_obstacles(0.2, {0.0, 1.0, 1.0, 2.0}, law, bump, 1), ConfigError);
}

TEST_CASE("Poisson count statistics over 1000 seeds")
{
    const Window w{-50.0, 50.0, 1.5, 21.5};
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 1000; ++s)
        sum += static_cast<double>(sample_obstacles(0.2, w, StrengthLaw::point_mass(1.0), bump, s).obstacles().size());
    const double mean = sum / 1000.0;
    CHECK(std::fabs(mean - 400.0) < 3.0 * std::sqrt(400.0) / std::sqrt(1000.0));
}

TEST_CASE("strength law tail and strong-obstacle filter")
{
    const auto u = StrengthLaw::uniform(1.0, 3.0);
    CHECK(u.tail(0.5) == 1.0);
    CHECK(u.tail(2.0) == doctest::Approx(0.5));
    CHECK(u.tail(3.5) == 0.0);
    CHECK(StrengthLaw::point_mass(2.0).tail(2.0) == 1.0);
    CHECK_THROWS_AS(StrengthLaw::point_mass(0.0), ConfigError);

    const auto f = sample_obstacles(0.5, {0.0, 20.0, 1.5, 6.0}, u, bump, 4);
    CHECK(strong_obstacles(f, 1e-12).size() == f.obstacles().size());
    CHECK(strong_obstacles(f, 3.1).empty());
    const auto strong = strong_obstacles(f, 2.0);
    for (std::size_t i = 1; i < strong.size(); ++i) CHECK(strong[i - 1].id < strong[i].id);
    for (const auto& o : strong) CHECK(o.strength >= 2.0);
    const auto pm = sample_obstacles(0.5, {0.0, 20.0, 1.5, 6.0}, StrengthLaw::point_mass(1.0), bump, 4);
    CHECK(strong_obstacles(pm, 1.0).size() == pm.obstacles().size());
}

TEST_CASE("upper bound dominates sampled forces")
{
    const auto f = sample_obstacles(1.0, {0.0, 20.0, 1.5, 6.0}, StrengthLaw::uniform(0.5, 1.5), bump, 9, true);
    const double ub = f.force_upper_bound();
    double seen = 0.0;
    for (double x = 0.0; x < 20.0; x += 0.05)
        for (double y = 0.0; y < 8.0; y += 0.05) seen = std::max(seen, f.force(x, y));
    CHECK(seen <= ub);
    CHECK(seen > 0.0);
}

TEST_CASE("restriction keeps interior forces")
{
    const auto f = sample_obstacles(1.0, {0.0, 30.0, 1.5, 10.0}, StrengthLaw::point_mass(1.0), bump, 5);
    const Window sub{5.0, 25.0, 2.0, 9.0};
    const auto g = f.restrict_to(sub);
    for (const auto& o : g.obstacles()) CHECK(sub.contains(o.x, o.y));
    // points at least r1 + r1 inside: every obstacle that can reach them lies in the sub-window
    for (double x = 8.0; x <= 22.0; x += 0.37)
        for (double y = 5.0; y <= 6.0; y += 0.25) CHECK(g.force(x, y) == doctest::Approx(f.force(x, y)));
}

TEST_CASE("obstacle file round trip is exact")
{
    const auto f = sample_obstacles(0.7, {-3.0, 4.0, 1.5, 3.5}, StrengthLaw::uniform(0.5, 2.0), bump, 12, true);
    std::stringstream ss;
    write_obstacles(ss, f);
    const auto g = read_obstacles(ss);
    REQUIRE(g.obstacles().size() == f.obstacles().size());
    for (std::size_t i = 0; i < f.obstacles().size(); ++i) {
        CHECK(g.obstacles()[i].x == f.obstacles()[i].x);
        CHECK(g.obstacles()[i].y == f.obstacles()[i].y);
        CHECK(g.obstacles()[i].strength == f.obstacles()[i].strength);
    }
    CHECK(g.periodic_x());
    CHECK(g.seed() == 12);
    CHECK(g.intensity() == f.intensity());
    CHECK(g.window().x_lo == -3.0);
    std::stringstream bad("# something else\n");
    CHECK_THROWS_AS(read_obstacles(bad), ConfigError);
}
