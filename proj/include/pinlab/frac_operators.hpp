#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinlab {

class PeriodicGrid {
public:
    PeriodicGrid(double period, std::size_t n_points, double origin = 0.0);

    double period() const { return period_; }
    std::size_t size() const { return n_; }
    double spacing() const { return period_ / static_cast<double>(n_); }
    double origin() const { return origin_; }
    double x(std::size_t i) const { return origin_ + spacing() * static_cast<double>(i); }
    // angular wavenumber of the i-th half-complex mode
    double wavenumber(std::size_t i) const;

    bool operator==(const PeriodicGrid&) const = default;

private:
    double period_;
    std::size_t n_;
    double origin_;
};

struct GridFunction {
    PeriodicGrid grid;
    std::vector<double> values;

    GridFunction(PeriodicGrid g, std::vector<double> v);
    explicit GridFunction(PeriodicGrid g) : GridFunction(g, std::vector<double>(g.size(), 0.0)) {}

    static GridFunction sample(PeriodicGrid g, const std::function<double(double)>& f);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
    double mean() const;
    double max() const;
    double min() const;
    double max_abs() const;
};

// Exponent of (-Delta)^s. Any s in (0, 1] is representable so that the
// complementary order 1 - s can be expressed too; model-level inputs go
// through model_order(), which restricts to [1/2, 1).
class FractionalOrder {
public:
    explicit FractionalOrder(double s);
    double value() const { return s_; }
    FractionalOrder complement() const { return FractionalOrder(1.0 - s_); }

private:
    double s_;
};

FractionalOrder model_order(double s);

// Classical exp(-1/(1-t^2)) bump scaled to [-radius, radius], unit mass.
class Mollifier {
public:
    explicit Mollifier(double radius);

    double radius() const { return radius_; }
    double kernel(double x) const;
    double kernel_derivative(double x) const;
    // mass of the kernel on (-inf, x]
    double cdf(double x) const;
    // int kernel(x) cos(omega x) dx
    double symbol(double omega) const;

    // normalizing constant of the unit-radius bump
    static double unit_normalizer();
    // sup |d/dt kernel| of the unit-radius kernel
    static double unit_max_slope();

private:
    double radius_;
};

GridFunction apply_spectral(const GridFunction& f, FractionalOrder order);

struct PointwiseOptions {
    double near_radius = 1e-3;
    double far_cut = 1e4;
    // > 0: f is treated as periodic with this period and the tail is summed exactly
    double period = 0.0;
    double abs_tol = 1e-11;
    double rel_tol = 1e-10;
    // |f(y)| <= growth_constant * (1 + |y|)^growth_exponent, used for the tail bound
    double growth_constant = 1.0;
    double growth_exponent = 0.0;
    std::size_t max_intervals = 20000;
};

struct PointwiseResult {
    double value;
    double error_bound;
};

// (-Delta)^s f(x) from the singular integral; the caller negates for A.
PointwiseResult apply_pointwise_integral(const std::function<double(double)>& f, double x,
                                         FractionalOrder order, const PointwiseOptions& opt = {});

GridFunction mollify(const GridFunction& f, const Mollifier& m);

void write_csv(std::ostream& os, const GridFunction& f);
GridFunction read_grid_csv(std::istream& is);

struct OperatorSelfTest {
    bool passed = false;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    std::size_t cases = 0;
};

// Spectral vs singular-integral agreement on random trigonometric polynomials.
OperatorSelfTest operator_self_test(std::uint64_t seed, std::size_t n_polys = 4,
                                    std::size_t n_points = 8, double tolerance = 1e-6);

}  // namespace pinlab
