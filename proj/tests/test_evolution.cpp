#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/evolution.hpp"

using namespace pinlab;

namespace {

const Window kWindow{0.0, 20.0, 1.0, 9.0};

ObstacleField empty_field()
{
    return ObstacleField({}, BumpProfile(0.5, 1.0), 0.0, kWindow, 0, StrengthLaw::point_mass(1.0), true);
}

ObstacleField dense_field(std::uint64_t seed, double intensity = 1.0)
{
    return sample_obstacles(intensity, kWindow, StrengthLaw::uniform(0.5, 1.0), BumpProfile(0.5, 1.0), seed, true);
}

EvolutionConfig config(const ObstacleField& field, double F, double s = 0.75, std::size_t n = 512)
{
    return make_evolution_config(PeriodicGrid(20.0, n), FractionalOrder(s), F, field, 200.0);
}

GridFunction random_profile(const PeriodicGrid& g, std::uint64_t seed, double amp)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    GridFunction u(g);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = amp * U(rng);
    return u;
}

}  // namespace

TEST_CASE("obstacle-free dynamics: uniform translation and mean preservation")
{
    const auto field = empty_field();
    const auto cfg = config(field, 0.3);
    GridFunction u(cfg.grid);
    for (int k = 0; k < 50; ++k) u = step(u, cfg, field);
    for (std::size_t i = 0; i < u.size(); ++i) CHECK(u[i] == doctest::Approx(0.3 * 50 * cfg.dt).epsilon(1e-12));

    // the zero mode moves by F dt per step, other modes only decay
    auto w = random_profile(cfg.grid, 1, 0.5);
    const double m0 = w.mean(), spread0 = w.max() - w.min();
    for (int k = 0; k < 20; ++k) w = step(w, cfg, field);
    CHECK(w.mean() == doctest::Approx(m0 + 0.3 * 20 * cfg.dt).epsilon(1e-12));
    CHECK(w.max() - w.min() < spread0);
}

TEST_CASE("zero data and zero force stay at rest")
{
    const auto field = dense_field(2);
    const auto cfg = config(field, 0.0);
    GridFunction u(cfg.grid);
    for (int k = 0; k < 20; ++k) u = step(u, cfg, field);
    CHECK(u.max_abs() == 0.0);
    const auto v = run(cfg, field);
    CHECK(v.outcome == Outcome::Pinned);
    CHECK(v.steps == cfg.pin_window);
    CHECK(v.final_profile.max_abs() == 0.0);
}

TEST_CASE("time stepping is first order")
{
    const auto field = dense_field(3, 0.3);
    auto cfg = config(field, 0.4, 0.75, 256);
    const double T = 2.0;
    auto solve = [&](double dt) {
        Stepper st(cfg, field);
        std::vector<double> u(cfg.grid.size(), 0.0);
        const auto n = static_cast<long>(std::llround(T / dt));
        for (long k = 0; k < n; ++k) st.advance(u, dt);
        return u;
    };
    const double dt = 0.02;
    const auto u1 = solve(dt), u2 = solve(dt / 2), u4 = solve(dt / 4);
    double e12 = 0.0, e24 = 0.0;
    for (std::size_t i = 0; i < u1.size(); ++i) {
        e12 = std::max(e12, std::fabs(u1[i] - u2[i]));
        e24 = std::max(e24, std::fabs(u2[i] - u4[i]));
    }
    REQUIRE(e24 > 0.0);
    const double order = std::log2(e12 / e24);
    CHECK(order > 0.8);
    CHECK(order < 1.3);
}

TEST_CASE("resolvent kernel is nonnegative at the default step")
{
    for (double s : {0.5, 0.6, 0.75})
        for (std::size_t n : {512u, 4096u, 16384u}) {
            const PeriodicGrid g(100.0, n);
            const FractionalOrder ord(s);
            CHECK(resolvent_min_weight(g, ord, default_time_step(g, ord)) >= 0.0);
        }
    // a much smaller step loses monotonicity of the implicit part
    const PeriodicGrid g(100.0, 4096);
    const FractionalOrder ord(0.75);
    CHECK(resolvent_min_weight(g, ord, 0.1 * std::pow(g.spacing(), 1.5)) < 0.0);
}

TEST_CASE("discrete comparison principle")
{
    // weak obstacles keep the explicit part monotone at the default step
    const auto field = sample_obstacles(1.0, kWindow, StrengthLaw::uniform(0.01, 0.02), BumpProfile(0.5, 1.0), 4, true);
    for (double s : {0.5, 0.75}) {
        const auto cfg = config(field, 0.05, s);
        REQUIRE(resolvent_min_weight(cfg.grid, cfg.s, cfg.dt) >= 0.0);
        auto u = random_profile(cfg.grid, 5, 0.5);
        auto w = u;
        const auto bump = random_profile(cfg.grid, 6, 0.5);
        for (std::size_t i = 0; i < w.size(); ++i) w[i] += std::fabs(bump[i]);
        Stepper st(cfg, field);
        for (int k = 0; k < 300; ++k) {
            st.advance(u.values, cfg.dt);
            st.advance(w.values, cfg.dt);
            double gap = 1e300;
            for (std::size_t i = 0; i < u.size(); ++i) gap = std::min(gap, w[i] - u[i]);
            REQUIRE(gap >= -1e-12);
        }
    }
}

TEST_CASE("zero data with nonnegative forcing stays nonnegative")
{
    const auto field = dense_field(7);
    auto cfg = config(field, 0.2);
    cfg.snapshot_every = 1;
    double lowest = 0.0;
    const auto v = run(cfg, field, [&](double, const GridFunction& u) { lowest = std::min(lowest, u.min()); });
    CHECK(lowest >= -1e-12);
    CHECK(v.outcome != Outcome::Escaped);
}

TEST_CASE("pinned and escaped verdicts honour their definitions")
{
    const auto field = dense_field(8);
    const auto pinned = run(config(field, 0.05), field);
    REQUIRE(pinned.outcome == Outcome::Pinned);
    CHECK(pinned.max_velocity_at_end < config(field, 0.05).pin_tolerance());

    const double F = 10.0 * field.force_upper_bound();
    const auto cfg = config(field, F);
    const auto esc = run(cfg, field);
    REQUIRE(esc.outcome == Outcome::Escaped);
    CHECK(esc.final_profile.min() > cfg.escape_height);
    // never slower than the translation with the maximal obstacle force removed
    CHECK(esc.t_final <= cfg.escape_height / (F - field.force_upper_bound()) + cfg.dt);

    auto short_cfg = config(field, 0.05);
    short_cfg.t_max = 10 * short_cfg.dt;
    CHECK(run(short_cfg, field).outcome == Outcome::Undecided);
}

TEST_CASE("observer sees the requested snapshots")
{
    const auto field = dense_field(9);
    auto cfg = config(field, 0.05);
    cfg.snapshot_every = 25;
    std::vector<double> times;
    const auto v = run(cfg, field, [&](double t, const GridFunction&) { times.push_back(t); });
    REQUIRE(times.size() >= 2);
    CHECK(times.front() == 0.0);
    CHECK(times.back() == doctest::Approx(v.t_final));
}

TEST_CASE("threshold scan")
{
    const auto free_field = empty_field();
    auto cfg = config(free_field, 0.0);
    cfg.t_max = 1e4;
    const auto free_scan = threshold_scan(free_field, cfg, 0.0, 1.0, 8);
    CHECK(free_scan.F_lo == 0.0);
    CHECK(free_scan.F_hi == doctest::Approx(1.0 / 256));
    CHECK(free_scan.records.size() == 10);

    const auto field = dense_field(10);
    CHECK_THROWS_AS(threshold_scan(field, config(field, 0.0), 0.0, 0.01, 3), BracketError);
    CHECK_THROWS_AS(threshold_scan(field, config(field, 0.0), 0.5, 0.5, 3), BracketError);
    const double top = 10.0 * field.force_upper_bound();
    CHECK_THROWS_AS(threshold_scan(field, config(field, 0.0), top / 2, top, 3), BracketError);

    const auto scan = threshold_scan(field, config(field, 0.0), 0.0, top, 6);
    CHECK(scan.F_hi - scan.F_lo == doctest::Approx(top / 64));
    // pinned at F means pinned at every smaller tested F
    double max_pinned = -1.0, min_other = 1e300;
    for (const auto& r : scan.records) {
        if (r.outcome == Outcome::Pinned) max_pinned = std::max(max_pinned, r.F);
        else min_other = std::min(min_other, r.F);
    }
    CHECK(max_pinned < min_other);
}

TEST_CASE("pinning is monotone in the force on a fixed field")
{
    const auto field = dense_field(11);
    bool seen_free = false;
    for (double F = 0.02; F < 10.0 * field.force_upper_bound(); F *= 1.5) {
        const bool pinned = run(config(field, F, 0.5, 256), field).outcome == Outcome::Pinned;
        CHECK((!pinned || !seen_free));
        seen_free = seen_free || !pinned;
    }
    CHECK(seen_free);
}

TEST_CASE("configuration and input errors")
{
    const auto field = dense_field(12);
    auto cfg = config(field, 0.1);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(run(cfg, field), ConfigError);
    cfg = config(field, 0.1);
    cfg.escape_height = 2.0;
    CHECK_THROWS_AS(run(cfg, field), ConfigError);
    cfg = config(field, 0.1);
    cfg.pin_tol = 0.0;
    CHECK_THROWS_AS(run(cfg, field), ConfigError);
    cfg = config(field, 0.1);
    GridFunction bad(cfg.grid);
    bad[4] = std::nan("");
    CHECK_THROWS_AS(step(bad, cfg, field), NumericError);
    CHECK_THROWS_AS(step(GridFunction(PeriodicGrid(20.0, 64)), cfg, field), ConfigError);
    CHECK(config(field, 0.0).pin_tolerance() == 1e-14);
    CHECK(config(field, -2.0).pin_tolerance() == doctest::Approx(2e-8));
}

TEST_CASE("trajectory and verdict text")
{
    const auto field = dense_field(13);
    const auto cfg = config(field, 0.05);
    std::stringstream t;
    write_trajectory_header(t);
    write_snapshot_csv(t, 0.5, GridFunction(cfg.grid), 128);
    CHECK(t.str().rfind("# pinlab-trajectory v1\nt,x,u\n", 0) == 0);
    std::string line;
    int rows = -2;
    while (std::getline(t, line)) ++rows;
    CHECK(rows == 4);

    const auto v = run(cfg, field);
    std::stringstream out;
    write_verdict(out, v, cfg);
    CHECK(out.str().rfind("# pinlab-verdict v1\n", 0) == 0);
    CHECK(out.str().find("outcome = " + std::string(to_string(v.outcome))) != std::string::npos);
}
