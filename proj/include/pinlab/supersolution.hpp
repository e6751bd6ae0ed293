#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pinlab/box_layout.hpp"
#include "pinlab/frac_operators.hpp"
#include "pinlab/percolation.hpp"
#include "pinlab/periodic_cell.hpp"
#include "pinlab/random_media.hpp"

namespace pinlab {

struct ScalingInputs {
    double s = 0.75;
    double r0 = 1.0;
    double r1 = 1.5;
    double q = 1.0;
    double V = 1e-4;
    double F2 = 0.5;
    double C_a = 6.0;
    double C_delta = 0.5;
    double alpha = 0.5;
    double a_factor = 1.5;  // a = a_factor * l, within [3/2, C_a]
};

struct ScalingParams {
    ScalingInputs in;
    double C_infinity = 0.0;  // s > 1/2 only
    double C_rho = 0.0;       // s = 1/2 only
    double C0 = 0.0, C1 = 0.0, C2 = 0.0;
    std::vector<double> l_bounds;
    double l = 0.0, d = 0.0, a = 0.0, b = 0.0, delta = 0.0, h = 0.0, epsilon = 0.0;
    double F1 = 0.0;
    double F_star = 0.0;
};

struct Inequality {
    std::string name;
    double lhs;
    double rhs;
    bool strict = true;
    bool holds() const { return strict ? lhs < rhs : lhs <= rhs * (1.0 + 1e-12); }
};

ScalingParams choose_params(const ScalingInputs& in);
// the numbered conclusions for the given branch, evaluated on the returned values
std::vector<Inequality> check_conclusions(const ScalingParams& p);
// pinning force of the branch formula at an arbitrary box width l
double pinning_force(const ScalingParams& p, double l);
// C1 (d/2+l/2)^{2-2s} h / d^2 + C2 h / (d/2+l/2)^{2s}
double step_operator_bound(const ScalingParams& p);
CellParams cell_params(const ScalingParams& p);

struct SelectedObstacle {
    std::size_t box;
    std::size_t index;  // position in field.obstacles()
    double x;
    double y;
    double strength;
    long lambda;
};

struct PinnedSelection {
    std::vector<SelectedObstacle> entries;  // one per box, in box order
    bool periodic = false;
    double period = 0.0;
};

PinnedSelection select_pinned(const ObstacleField& field, const EmbeddedLattice& lattice,
                              const LambdaField& lambda);

// Pointwise minimum of the shifted cell profiles, each restricted to
// distance l + d/2 from its obstacle.
class UFlat {
public:
    UFlat(PinnedSelection selection, const FourierProfile& cell, const BoxLayout& layout,
          std::size_t table_nodes = 1 << 16);

    struct Hit {
        double value;
        std::size_t box;
        double center;  // obstacle abscissa, including the periodic image shift
    };

    double operator()(double x) const { return eval(x).value; }
    Hit eval(double x) const;
    // full 2a-periodic profile centred at `center`
    double profile(double center, double x) const { return table_(x - center); }
    double profile_slope(double center, double x) const { return table_.slope(x - center); }
    const PinnedSelection& selection() const { return sel_; }
    const BoxLayout& layout() const { return layout_; }
    double cell_half_period() const { return table_.period() / 2.0; }

private:
    PinnedSelection sel_;
    BoxLayout layout_;
    ProfileTable table_;
};

UFlat build_u_flat(const PinnedSelection& selection, const FourierProfile& cell, const BoxLayout& layout);

// Gap pairs (a_k, b_k), measured as distances to the left of xi, between the
// crossings of the profile active at xi with u_flat, up to distance `range`.
std::vector<std::pair<double, double>> intersection_gaps(const UFlat& u_flat, double xi, double range);
std::vector<std::pair<double, double>> intersection_gaps(const PinnedSelection& selection,
                                                         const FourierProfile& cell, const BoxLayout& layout,
                                                         double xi);

struct Kink {
    double x;
    double slope_jump;
};
std::vector<Kink> find_kinks(const UFlat& u_flat, const PeriodicGrid& grid);

class GFlat {
public:
    GFlat(const PinnedSelection& selection, const BoxLayout& layout, double q, double epsilon);
    double operator()(double x) const;
    // eta_epsilon * g_flat evaluated exactly
    double smooth(double x) const;
    GFlat with_half_width(double w) const {
        GFlat g = *this;
        g.half_width_ = w;
        return g;
    }

private:
    template <class Fn>
    double over_plateaus(double x, double reach, Fn&& fn) const;
    std::vector<double> centers_;
    double period_;
    bool periodic_;
    double half_width_;
    double q_;
    Mollifier moll_;
};

GFlat build_g_flat(const PinnedSelection& selection, const BoxLayout& layout, double q, double r0,
                   double epsilon);

struct SmoothPair {
    GridFunction u_smooth;
    GridFunction g_smooth;
};
SmoothPair build_smooth(const UFlat& u_flat, const GFlat& g_flat, double epsilon, const PeriodicGrid& grid);

// Mollified (radius d/2) staircase equal to heights[k] on Q_k.
class StepFunction {
public:
    StepFunction(std::vector<double> heights, const BoxLayout& layout, bool periodic);
    double operator()(double x) const;
    const std::vector<double>& heights() const { return heights_; }

private:
    double height(long k) const;
    std::vector<double> heights_;
    BoxLayout layout_;
    bool periodic_;
    Mollifier moll_;
};

// sup of |second derivative| * d^2 / h for a mollified step with jumps up to 2h
double step_curvature_constant();

GridFunction build_u_step(const LambdaField& lambda, const BoxLayout& layout, const PeriodicGrid& grid);
// heights must satisfy |y_i - y_j| <= 2h |i-j|^alpha
StepFunction make_step(const std::vector<double>& heights, const BoxLayout& layout, bool periodic,
                       double alpha);

struct VerifyOptions {
    std::size_t grid_points = 1 << 14;  // over the whole field period
    std::size_t table_nodes = 1 << 16;
    std::optional<double> force;  // defaults to F*
    double tolerance_factor = 1e-3;  // of F*
};

struct ResidualReport {
    bool passed = false;
    double tolerance = 0.0;
    double force = 0.0;
    double max_residual = 0.0;
    double worst_x = 0.0;
    double max_smooth_residual = 0.0;
    double max_abs_step_operator = 0.0;
    double step_bound = 0.0;
    double min_force_margin = 0.0;  // min of f(x, u) - g_smooth
    double min_u_total = 0.0;
    double max_composition_excess = 0.0;
    bool smooth_ok = false, step_ok = false, force_ok = false, nonnegative = false, composition_ok = false;
    std::size_t grid_points = 0;
};

struct SupersolutionBundle {
    PinnedSelection selection;
    ScalingParams params;
    BoxLayout layout;
    FourierProfile cell;
    GridFunction u_flat;
    GridFunction u_smooth;
    GridFunction g_smooth;
    GridFunction u_step;
    GridFunction u_total;
    GridFunction residual;
    double F_star;
    ResidualReport verification;
    std::uint64_t seed;
};

struct CertificateField {
    ObstacleField field;
    BoxLayout layout;
    double closed_probability;
};

// Periodic obstacle field sized for the certificate: n_boxes boxes, `rows`
// cell rows, intensity tuned so a cell is empty of strong obstacles with
// probability closed_fraction * q_max.
CertificateField sample_certificate_field(const ScalingParams& p, std::size_t n_boxes, std::size_t rows,
                                          double closed_fraction, std::uint64_t seed);

BoxLayout layout_for_field(const ScalingParams& p, const ObstacleField& field);

SupersolutionBundle compose_and_verify(const ScalingParams& params, const ObstacleField& field,
                                       std::uint64_t seed, const VerifyOptions& opt = {});

void write_bundle_csv(std::ostream& os, const SupersolutionBundle& bundle, std::size_t stride = 1);
void write_bundle_summary(std::ostream& os, const SupersolutionBundle& bundle);

}  // namespace pinlab
