#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pinlab/frac_operators.hpp"

namespace pinlab {

struct CellParams {
    double a;      // half-period
    double b;      // plateau half-width
    double delta;  // mollification width
    double F2;     // force on the plateau
    double F1;     // compensating force elsewhere
    double rho;    // b + delta/2
    FractionalOrder s;
};

CellParams make_cell_params(double a, double b, double delta, double F2, double s);

// Piecewise-constant forcing: F2 on [-rho, rho], -F1 elsewhere, period 2a.
double eval_g_tilde(const CellParams& p, double x);
// g_tilde mollified at radius delta/2
double eval_g(const CellParams& p, double x);

class FourierProfile {
public:
    FourierProfile(CellParams p, std::size_t n_modes);

    const CellParams& params() const { return p_; }
    std::size_t n_modes() const { return coef_.size(); }
    // coefficient of cos(k pi x / a), k = 1..n_modes (index k-1)
    const std::vector<double>& coefficients() const { return coef_; }
    const std::vector<double>& mollified_coefficients() const { return coef_v_; }
    double tail_bound() const { return tail_; }

    double v_tilde(double x) const { return series(coef_, x, false); }
    double v(double x) const { return series(coef_v_, x, false); }
    double v_tilde_slope(double x) const { return series(coef_, x, true); }
    double v_slope(double x) const { return series(coef_v_, x, true); }

    // exact samples of the truncated series on a grid whose period is 2a
    GridFunction sample_v_tilde(const PeriodicGrid& grid) const { return sample(coef_, grid, false); }
    GridFunction sample_v(const PeriodicGrid& grid) const { return sample(coef_v_, grid, false); }
    GridFunction sample_v_slope(const PeriodicGrid& grid) const { return sample(coef_v_, grid, true); }

private:
    double series(const std::vector<double>& c, double x, bool slope) const;
    GridFunction sample(const std::vector<double>& c, const PeriodicGrid& grid, bool slope) const;

    CellParams p_;
    std::vector<double> coef_;
    std::vector<double> coef_v_;
    double tail_;
};

FourierProfile build_v_profile(const CellParams& p, std::size_t n_modes);

// smallest power-of-two mode count whose tail bound is below target
std::size_t modes_for_tail(const CellParams& p, double target);

double linf_bound(const CellParams& p);

struct MonotoneReport {
    bool passed = false;
    double min_slope_v_tilde = 0.0;
    double min_slope_v = 0.0;
    double endpoint_slope = 0.0;  // max |derivative| at 0 and a, both profiles
    double max_reflection_error = 0.0;
    std::string detail;
};

MonotoneReport check_monotone(const FourierProfile& profile, std::size_t grid_n);

struct CellResidual {
    double max_error = 0.0;
    double tolerance = 0.0;
    double worst_x = 0.0;
    bool passed = false;
};

// max |(-(-Delta)^s) w - forcing| on grid points farther than exclusion*spacing
// from the forcing's jumps; w = v_tilde against g_tilde, or v against g.
CellResidual cell_residual(const FourierProfile& profile, std::size_t grid_n, bool mollified,
                           double exclusion = 3.0);

// Cubic Hermite table of v over one period, for fast evaluation far from the series.
class ProfileTable {
public:
    ProfileTable(const FourierProfile& profile, std::size_t nodes);
    double operator()(double x) const;
    double slope(double x) const;
    double period() const { return period_; }

private:
    double period_;
    double h_;
    std::vector<double> val_, slope_;
};

void write_profile_csv(std::ostream& os, const FourierProfile& profile, std::size_t grid_n);

}  // namespace pinlab
