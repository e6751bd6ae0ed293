#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace pinlab {

// Radial bump: 1 on the max-norm ball of radius r0, 0 beyond Euclidean
// radius r1, degree-7 smoothstep in between.
class BumpProfile {
public:
    BumpProfile(double r0, double r1);

    double r0() const { return r0_; }
    double r1() const { return r1_; }
    double operator()(double dx, double dy) const;
    // partial derivative in dy
    double slope_y(double dx, double dy) const;

    static double smoothstep(double t);
    static double smoothstep_slope(double t);

private:
    double r0_, r1_;
};

struct Obstacle {
    double x;
    double y;
    double strength;
    std::size_t id;
};

struct Window {
    double x_lo, x_hi, y_lo, y_hi;
    double width() const { return x_hi - x_lo; }
    double height() const { return y_hi - y_lo; }
    double area() const { return width() * height(); }
    bool contains(double x, double y) const { return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi; }
};

class StrengthLaw {
public:
    static StrengthLaw point_mass(double value);
    static StrengthLaw uniform(double lo, double hi);

    bool is_point_mass() const { return lo_ == hi_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    // P{strength >= q}
    double tail(double q) const;

    template <class Rng>
    double sample(Rng& rng) const;

private:
    StrengthLaw(double lo, double hi) : lo_(lo), hi_(hi) {}
    double lo_, hi_;
};

class ObstacleField {
public:
    ObstacleField(std::vector<Obstacle> obstacles, BumpProfile bump, double intensity, Window window,
                  std::uint64_t seed, StrengthLaw law, bool periodic_x = false);

    const std::vector<Obstacle>& obstacles() const { return obstacles_; }
    const BumpProfile& bump() const { return bump_; }
    double intensity() const { return intensity_; }
    const Window& window() const { return window_; }
    std::uint64_t seed() const { return seed_; }
    const StrengthLaw& strength_law() const { return law_; }
    // obstacles repeat with period window().width() in x
    bool periodic_x() const { return periodic_x_; }

    double force(double x, double y) const;
    // upper bound on sup_{x,y} force(x, y)
    double force_upper_bound() const;
    // obstacles whose support can touch the vertical line through x, sorted by id
    std::vector<std::size_t> near_column(double x) const;

    ObstacleField restrict_to(const Window& sub) const;

private:
    template <class Fn>
    void for_each_near(double x, double reach, Fn&& fn) const;

    std::vector<Obstacle> obstacles_;
    std::vector<std::size_t> by_x_;
    BumpProfile bump_;
    double intensity_;
    Window window_;
    std::uint64_t seed_;
    StrengthLaw law_;
    bool periodic_x_;
};

ObstacleField sample_obstacles(double intensity, const Window& window, const StrengthLaw& law,
                               const BumpProfile& bump, std::uint64_t seed, bool periodic_x = false);

double eval_obstacle_force(const ObstacleField& field, double x, double y);

std::vector<Obstacle> strong_obstacles(const ObstacleField& field, double q);

void write_obstacles(std::ostream& os, const ObstacleField& field);
ObstacleField read_obstacles(std::istream& is);

}  // namespace pinlab
