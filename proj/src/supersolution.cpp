#include "pinlab/supersolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/special.hpp"

namespace pinlab {

using std::numbers::pi;

namespace {

long floor_div(long a, long b)
{
    long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::size_t wrap_index(long c, std::size_t n)
{
    const long m = static_cast<long>(n);
    return static_cast<std::size_t>(((c % m) + m) % m);
}

// sqrt(pi r0^3 / (48 e^2 (36 F2 / (17 pi))^3))
double half_order_root(double r0, double F2)
{
    const double k = 36.0 * F2 / (17.0 * pi);
    return std::sqrt(pi * r0 * r0 * r0 / (48.0 * std::exp(2.0) * k * k * k));
}

}  // namespace

// ---------------------------------------------------------------- parameters

double step_curvature_constant() { return 8.0 * Mollifier::unit_max_slope(); }

ScalingParams choose_params(const ScalingInputs& in)
{
    const double s = model_order(in.s).value();
    if (!(in.F2 > 0.0 && in.F2 < in.q)) throw ConfigError("need 0 < F2 < q");
    if (!(in.r0 > 0.0 && in.r1 > std::sqrt(2.0) * in.r0)) throw ConfigError("need r1 > sqrt(2) r0 > 0");
    if (!(in.C_a > 5.0)) throw ConfigError("need C_a > 5");
    if (!(in.C_delta > 0.0 && in.C_delta < 1.0)) throw ConfigError("need 0 < C_delta < 1");
    if (!(in.V > 0.0)) throw ConfigError("need V > 0");
    if (!(in.alpha > 0.0 && in.alpha < 1.0)) throw ConfigError("need 0 < alpha < 1");
    if (!(in.a_factor >= 1.5 && in.a_factor <= in.C_a)) throw ConfigError("need 3/2 <= a_factor <= C_a");

    ScalingParams p;
    p.in = in;
    const double r0 = in.r0, r1 = in.r1, q = in.q, V = in.V, F2 = in.F2, Ca = in.C_a;
    p.C0 = step_curvature_constant();
    p.C1 = std::pow(3.0, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) * p.C0;
    p.C2 = 12.0 / (2.0 * s - in.alpha) * std::pow(3.0, 2.0 * s - in.alpha) / std::pow(2.0, in.alpha);
    const double CC = p.C1 + p.C2;

    if (s > 0.5) {
        const double Cinf = 2.0 * riemann_zeta(2.0 * s) / std::pow(pi, 2.0 * s);
        p.C_infinity = Cinf;
        p.l_bounds = {
            4.0 * r1,
            std::pow(CC * V / (r1 * (q - F2)), 1.0 / (2.0 * s)),
            std::pow(12.0 * CC * V * r0, 1.0 / (2.0 * s)),
            (1.0 + 2.0 * F2 * r0 * r1 + 12.0 * F2 * CC * V * Cinf * std::pow(Ca, 2.0 * s)) / (F2 * r0),
            std::pow(Cinf * std::pow(2.0 / 3.0, 2.0 * s - 1.0) * F2, -1.0 / (2.0 * s - 1.0)),
        };
    } else {
        p.C_rho = 0.5 * half_order_root(r0, F2) / std::pow(Ca, 1.5);
        const double t = 2.0 * V * CC / (F2 * p.C_rho);
        p.l_bounds = {
            CC * V / (r1 * (q - F2)),
            t * t + 4.0 * r1,
            12.0 * CC * Ca * V / r0 + 2.0 * r1,
        };
    }
    p.l = *std::max_element(p.l_bounds.begin(), p.l_bounds.end()) * (1.0 + 1e-9);
    p.d = p.l;
    p.a = in.a_factor * p.l;
    if (s > 0.5)
        p.b = p.a * r0 / (6.0 * (p.C_infinity * F2 * std::pow(p.a, 2.0 * s) + r0));
    else
        p.b = 0.5 * std::min(half_order_root(r0, F2) / std::sqrt(p.a), r0 / 3.0);
    p.delta = in.C_delta * p.b / 2.0;
    p.h = V / (p.l - 2.0 * r1);
    p.epsilon = std::min(0.25 * r0, 0.5 * (r0 - p.b - p.delta)) * (1.0 - 1e-9);
    const double rho = p.b + 0.5 * p.delta;
    p.F1 = rho * F2 / (p.a - rho);
    p.F_star = pinning_force(p, p.l);

    for (const auto& c : check_conclusions(p))
        if (!c.holds())
            throw ConsistencyError("parameter inequality failed: " + c.name + " (" + std::to_string(c.lhs)
                                   + " vs " + std::to_string(c.rhs) + ")");
    return p;
}

double pinning_force(const ScalingParams& p, double l)
{
    const double s = p.in.s, F2 = p.in.F2, r0 = p.in.r0, Ca = p.in.C_a;
    if (s > 0.5)
        return 0.5 * std::min(p.in.q - F2,
                              r0 * F2 / (6.0 * (p.C_infinity * std::pow(Ca, 2.0 * s) * F2 * std::pow(l, 2.0 * s) + r0)));
    return 0.5 * std::min(p.in.q - F2, F2 * std::min(p.C_rho * std::pow(l, -1.5), r0 / (6.0 * Ca * l)));
}

double step_operator_bound(const ScalingParams& p)
{
    const double s = p.in.s;
    const double m = 0.5 * p.d + 0.5 * p.l;
    return p.C1 * std::pow(m, 2.0 - 2.0 * s) * p.h / (p.d * p.d) + p.C2 * p.h / std::pow(m, 2.0 * s);
}

CellParams cell_params(const ScalingParams& p)
{
    return make_cell_params(p.a, p.b, p.delta, p.in.F2, p.in.s);
}

std::vector<Inequality> check_conclusions(const ScalingParams& p)
{
    const double s = p.in.s, r0 = p.in.r0, r1 = p.in.r1, q = p.in.q, F2 = p.in.F2, Ca = p.in.C_a, V = p.in.V;
    const double CC = p.C1 + p.C2;
    const double rho = p.b + 0.5 * p.delta;
    const double l = p.l;
    const double step = CC * V / (std::pow(l, 2.0 * s) * (l - 2.0 * r1));
    const double vbound = linf_bound(cell_params(p));
    std::vector<Inequality> out;
    if (s > 0.5) {
        const double denom = p.C_infinity * std::pow(Ca, 2.0 * s) * F2 * std::pow(l, 2.0 * s) + r0;
        out.push_back({"(i) rho < r0/3", rho, r0 / 3.0});
        out.push_back({"(i) r0/3 < a/18", r0 / 3.0, p.a / 18.0});
        out.push_back({"(ii) step term < (q-F2)/2", step, 0.5 * (q - F2)});
        out.push_back({"(iii) step term < r0 F2 / (12 (...))", step, r0 * F2 / (12.0 * denom)});
        out.push_back({"(iv) |v|_inf bound < r0/2", vbound, 0.5 * r0});
        out.push_back({"(v) r0 F2 / (6 (...)) <= F1", r0 * F2 / (6.0 * denom), p.F1, false});
    } else {
        const double m = F2 * std::min(p.C_rho * std::pow(l, -1.5), r0 / (6.0 * Ca * l));
        out.push_back({"(i) 4 r1 < l", 4.0 * r1, l});
        out.push_back({"(ii) b + delta < r0/3", p.b + p.delta, r0 / 3.0});
        out.push_back({"(ii) r0/3 < a/18", r0 / 3.0, p.a / 18.0});
        out.push_back({"(iii) step term < (q-F2)/2", step, 0.5 * (q - F2)});
        out.push_back({"(iv) step term < F2 min{...} / 2", step, 0.5 * m});
        out.push_back({"(v) |v|_inf bound < r0/2", vbound, 0.5 * r0});
        out.push_back({"(vi) F2 min{...} <= F1", m, p.F1, false});
    }
    out.push_back({"d + 2l <= 2a", p.d + 2.0 * l, 2.0 * p.a, false});
    out.push_back({"a <= C_a l", p.a, Ca * l, false});
    out.push_back({"4b < a", 4.0 * p.b, p.a});
    out.push_back({"delta < min{1, b}", p.delta, std::min(1.0, p.b)});
    out.push_back({"epsilon < r0/4", p.epsilon, 0.25 * r0});
    out.push_back({"b + delta < r0 - 2 epsilon", p.b + p.delta, r0 - 2.0 * p.epsilon});
    out.push_back({"2 r1 < l", 2.0 * r1, l});
    out.push_back({"0 < F*", 0.0, p.F_star});
    return out;
}

// ---------------------------------------------------------------- selection

PinnedSelection select_pinned(const ObstacleField& field, const EmbeddedLattice& lattice, const LambdaField& lambda)
{
    if (lambda.status != LambdaStatus::Constructed)
        throw OverflowError("percolation surface overflowed; enlarge rows or intensity");
    PinnedSelection sel;
    sel.periodic = lattice.lattice.periodic();
    sel.period = field.window().width();
    const std::size_t K = lattice.lattice.width();
    for (std::size_t k = 0; k < K; ++k) {
        const long lam = lambda.lambda[k];
        const auto& slot = lattice.at(k, static_cast<std::size_t>(lam));
        if (!slot) throw ConsistencyError("surface site without obstacle at box " + std::to_string(k));
        const Obstacle& o = field.obstacles()[*slot];
        sel.entries.push_back({k, *slot, o.x, o.y, o.strength, lam});
    }
    return sel;
}

// ---------------------------------------------------------------- u_flat

UFlat::UFlat(PinnedSelection selection, const FourierProfile& cell, const BoxLayout& layout, std::size_t table_nodes)
    : sel_(std::move(selection)), layout_(layout), table_(cell, table_nodes)
{
    if (sel_.entries.empty()) throw ConfigError("u_flat needs a nonempty selection");
    if (sel_.entries.size() != layout.n_boxes) throw ConfigError("selection does not match layout");
    if (2.0 * cell.params().a < layout.d + 2.0 * layout.l - 1e-12 * layout.l)
        throw ConfigError("u_flat needs 2a >= d + 2l");
}

UFlat::Hit UFlat::eval(double x) const
{
    const double pitch = layout_.pitch();
    const double lo = layout_.span().lo;
    const auto K = layout_.n_boxes;
    const long kf = static_cast<long>(std::floor((x - lo) / pitch));
    const double reach = layout_.l + 0.5 * layout_.d;
    Hit best{std::numeric_limits<double>::infinity(), 0, 0.0};
    for (long c = kf - 1; c <= kf + 1; ++c) {
        std::size_t k;
        double center;
        if (sel_.periodic) {
            k = wrap_index(c, K);
            center = sel_.entries[k].x + sel_.period * static_cast<double>(floor_div(c, static_cast<long>(K)));
        } else {
            if (c < 0 || c >= static_cast<long>(K)) continue;
            k = static_cast<std::size_t>(c);
            center = sel_.entries[k].x;
        }
        if (std::fabs(x - center) > reach) continue;
        const double v = table_(x - center);
        if (v < best.value) best = {v, k, center};
    }
    if (!std::isfinite(best.value)) {  // outside a finite layout: nearest profile
        const std::size_t k = kf < 0 ? 0 : K - 1;
        best = {table_(x - sel_.entries[k].x), k, sel_.entries[k].x};
    }
    return best;
}

UFlat build_u_flat(const PinnedSelection& selection, const FourierProfile& cell, const BoxLayout& layout)
{
    return UFlat(selection, cell, layout);
}

std::vector<std::pair<double, double>> intersection_gaps(const UFlat& u_flat, double xi, double range)
{
    const double center = u_flat.eval(xi).center;
    const double a = u_flat.cell_half_period();
    const double tau = 1e-12 * std::max(1.0, std::fabs(u_flat(xi)));
    // -1: u_i0 below u_flat, 0: equal, +1: above
    auto cls = [&](double y) {
        const double x = xi - y;
        const double dv = u_flat.profile(center, x) - u_flat(x);
        return dv > tau ? 1 : (dv < -tau ? -1 : 0);
    };
    auto refine = [&](double lo, double hi, auto pred_lo) {
        while (hi - lo > 1e-10 * a) {
            const double mid = 0.5 * (lo + hi);
            if (pred_lo(cls(mid))) lo = mid; else hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double step = a / 2048.0;
    std::vector<std::pair<double, double>> gaps;
    std::optional<double> open_a;
    int prev = cls(0.0);
    for (double y = step; y <= range; y += step) {
        const int cur = cls(y);
        if (!open_a && prev <= 0 && cur > 0) {
            open_a = refine(y - step, y, [](int c) { return c <= 0; });
        } else if (open_a && prev > 0 && cur < 0) {
            gaps.emplace_back(*open_a, refine(y - step, y, [](int c) { return c > 0; }));
            open_a.reset();
        } else if (open_a && prev > 0 && cur == 0) {
            // u_flat meets the profile again from above without crossing below
            gaps.emplace_back(*open_a, refine(y - step, y, [](int c) { return c > 0; }));
            open_a.reset();
        }
        prev = cur;
    }
    return gaps;
}

std::vector<std::pair<double, double>> intersection_gaps(const PinnedSelection& selection, const FourierProfile& cell,
                                                         const BoxLayout& layout, double xi)
{
    const UFlat u(selection, cell, layout);
    return intersection_gaps(u, xi, 8.0 * cell.params().a);
}

std::vector<Kink> find_kinks(const UFlat& u_flat, const PeriodicGrid& grid)
{
    std::vector<Kink> out;
    auto prev = u_flat.eval(grid.x(0));
    for (std::size_t i = 1; i <= grid.size(); ++i) {
        const double x = grid.x(0) + grid.spacing() * static_cast<double>(i);
        const auto cur = u_flat.eval(x);
        if (cur.center != prev.center) {
            double lo = x - grid.spacing(), hi = x;
            const double c_left = prev.center;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (u_flat.eval(mid).center == c_left) lo = mid; else hi = mid;
            }
            const double xs = 0.5 * (lo + hi);
            out.push_back({xs, u_flat.profile_slope(cur.center, xs) - u_flat.profile_slope(c_left, xs)});
        }
        prev = cur;
    }
    return out;
}

// ---------------------------------------------------------------- g_flat

GFlat::GFlat(const PinnedSelection& selection, const BoxLayout& layout, double q, double epsilon)
    : period_(selection.period), periodic_(selection.periodic),
      half_width_(0.0), q_(q), moll_(epsilon)
{
    (void)layout;
    for (const auto& e : selection.entries) centers_.push_back(e.x);
}

template <class Fn>
double GFlat::over_plateaus(double x, double reach, Fn&& fn) const
{
    double acc = 0.0;
    for (double c : centers_) {
        if (periodic_) {
            const double shift = period_ * std::round((x - c) / period_);
            for (double img : {c + shift - period_, c + shift, c + shift + period_})
                if (std::fabs(x - img) <= reach) acc += fn(x - img);
        } else if (std::fabs(x - c) <= reach) {
            acc += fn(x - c);
        }
    }
    return acc;
}

double GFlat::operator()(double x) const
{
    const double v = over_plateaus(x, half_width_, [](double) { return 1.0; });
    return v > 0.0 ? q_ : 0.0;
}

double GFlat::smooth(double x) const
{
    const double hw = half_width_;
    return q_ * over_plateaus(x, hw + moll_.radius(), [&](double t) {
        return moll_.cdf(t + hw) - moll_.cdf(t - hw);
    });
}

GFlat build_g_flat(const PinnedSelection& selection, const BoxLayout& layout, double q, double r0, double epsilon)
{
    if (!(epsilon > 0.0 && epsilon < 0.25 * r0)) throw ConfigError("need 0 < epsilon < r0/4");
    GFlat g(selection, layout, q, epsilon);
    return g.with_half_width(r0 - 1.5 * epsilon);
}

SmoothPair build_smooth(const UFlat& u_flat, const GFlat& g_flat, double epsilon, const PeriodicGrid& grid)
{
    const auto uf = GridFunction::sample(grid, [&](double x) { return u_flat(x); });
    return {mollify(uf, Mollifier(epsilon)),
            GridFunction::sample(grid, [&](double x) { return g_flat.smooth(x); })};
}

// ---------------------------------------------------------------- u_step

StepFunction::StepFunction(std::vector<double> heights, const BoxLayout& layout, bool periodic)
    : heights_(std::move(heights)), layout_(layout), periodic_(periodic), moll_(0.5 * layout.d)
{
    if (heights_.size() != layout.n_boxes) throw ConfigError("one height per box required");
}

double StepFunction::height(long k) const
{
    if (periodic_) return heights_[wrap_index(k, heights_.size())];
    const long last = static_cast<long>(heights_.size()) - 1;
    return heights_[static_cast<std::size_t>(std::clamp(k, 0L, last))];
}

double StepFunction::operator()(double x) const
{
    const double pitch = layout_.pitch();
    const double lo = layout_.span().lo;
    const long c = static_cast<long>(std::floor((x - lo) / pitch));
    const double left_mid = lo + static_cast<double>(c) * pitch;
    const double right_mid = left_mid + pitch;
    const double yc = height(c);
    return yc + (height(c + 1) - yc) * moll_.cdf(x - right_mid)
           + (height(c - 1) - yc) * (1.0 - moll_.cdf(x - left_mid));
}

StepFunction make_step(const std::vector<double>& heights, const BoxLayout& layout, bool periodic, double alpha)
{
    const std::size_t K = heights.size();
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) {
            long dist = static_cast<long>(j - i);
            if (periodic) dist = std::min(dist, static_cast<long>(K) - dist);
            const double allowed = 2.0 * layout.h * std::pow(static_cast<double>(dist), alpha);
            if (std::fabs(heights[i] - heights[j]) > allowed * (1.0 + 1e-12))
                throw ConfigError("step heights violate the growth bound between boxes " + std::to_string(i)
                                  + " and " + std::to_string(j));
        }
    return StepFunction(heights, layout, periodic);
}

GridFunction build_u_step(const LambdaField& lambda, const BoxLayout& layout, const PeriodicGrid& grid)
{
    std::vector<double> heights;
    for (long v : lambda.lambda) heights.push_back(static_cast<double>(v) * layout.h);
    const double alpha = lambda.H.alpha().value_or(1.0);
    const auto step = make_step(heights, layout, lambda.lattice.periodic(), alpha);
    return GridFunction::sample(grid, [&](double x) { return step(x); });
}

// ---------------------------------------------------------------- certificate

CertificateField sample_certificate_field(const ScalingParams& p, std::size_t n_boxes, std::size_t rows,
                                          double closed_fraction, std::uint64_t seed)
{
    if (!(closed_fraction > 0.0 && closed_fraction <= 1.0)) throw ConfigError("closed_fraction must lie in (0,1]");
    const auto cb = counting_bound(GrowthFunction::power(p.in.alpha), 1);
    const double qc = closed_fraction * cb.q_max;
    const double intensity = std::log(1.0 / qc) / p.in.V;
    BoxLayout layout{p.l, p.d, p.h, p.in.r1, 0.0, p.in.r1, n_boxes, rows};
    layout.origin = 0.5 * layout.pitch();
    validate(layout);
    const Window w{0.0, layout.period(), p.in.r1, p.in.r1 + static_cast<double>(rows) * p.h};
    auto field = sample_obstacles(intensity, w, StrengthLaw::point_mass(p.in.q), BumpProfile(p.in.r0, p.in.r1),
                                  seed, true);
    return {std::move(field), layout, qc};
}

BoxLayout layout_for_field(const ScalingParams& p, const ObstacleField& field)
{
    const Window& w = field.window();
    const double pitch = p.l + p.d;
    const double boxes = w.width() / pitch;
    const auto K = static_cast<std::size_t>(std::llround(boxes));
    if (K < 1 || std::fabs(boxes - static_cast<double>(K)) > 1e-9 * boxes)
        throw ConfigError("field width is not a whole number of boxes");
    const auto rows = static_cast<std::size_t>(std::floor(w.height() / p.h + 1e-9));
    if (rows < 1) throw ConfigError("field window shorter than one cell row");
    BoxLayout layout{p.l, p.d, p.h, p.in.r1, w.x_lo + 0.5 * pitch, w.y_lo, K, rows};
    validate(layout);
    return layout;
}

SupersolutionBundle compose_and_verify(const ScalingParams& params, const ObstacleField& field, std::uint64_t seed,
                                       const VerifyOptions& opt)
{
    if (!field.periodic_x()) throw ConfigError("certificate needs a horizontally periodic obstacle field");
    const BoxLayout layout = layout_for_field(params, field);
    const auto H = GrowthFunction::power(params.in.alpha);
    const auto emb = embed_obstacle_lattice(field, layout, params.in.q);
    const auto lam = build_lambda(emb.lattice, H);
    if (lam.status == LambdaStatus::Overflow)
        throw OverflowError("percolation surface overflowed; retry with more rows or higher intensity");
    auto sel = select_pinned(field, emb, lam);

    const CellParams cp = cell_params(params);
    const FourierProfile cell = build_v_profile(cp, opt.table_nodes / 2);
    const double P = layout.period();
    const std::size_t n = opt.grid_points;
    if (n < 8 || n % 2 != 0) throw ConfigError("grid_points must be even and at least 8");
    const PeriodicGrid grid(P, n, field.window().x_lo);

    const UFlat u_flat(sel, cell, layout, opt.table_nodes);
    const GFlat g_flat = build_g_flat(sel, layout, params.in.q, params.in.r0, params.epsilon);
    auto smooth = build_smooth(u_flat, g_flat, params.epsilon, grid);

    std::vector<double> heights;
    for (const auto& e : sel.entries) heights.push_back(e.y);
    const auto step = make_step(heights, layout, sel.periodic, params.in.alpha);
    auto u_step = GridFunction::sample(grid, [&](double x) { return step(x); });

    GridFunction u_total(grid);
    for (std::size_t i = 0; i < n; ++i) u_total[i] = smooth.u_smooth[i] + u_step[i];
    const FractionalOrder ord(params.in.s);
    const auto lap_smooth = apply_spectral(smooth.u_smooth, ord);
    const auto lap_step = apply_spectral(u_step, ord);

    ResidualReport rep;
    rep.force = opt.force.value_or(params.F_star);
    rep.tolerance = opt.tolerance_factor * params.F_star;
    rep.step_bound = step_operator_bound(params);
    rep.grid_points = n;
    const double gain = std::min(params.in.q - params.in.F2, params.F1);
    rep.max_residual = rep.max_smooth_residual = rep.max_composition_excess = -std::numeric_limits<double>::infinity();
    rep.min_force_margin = rep.min_u_total = std::numeric_limits<double>::infinity();
    GridFunction residual(grid);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double Au_s = -lap_smooth[i], Au_st = -lap_step[i];
        const double f = field.force(x, u_total[i]);
        const double r = Au_s + Au_st - f + rep.force;
        residual[i] = r;
        if (r > rep.max_residual) {
            rep.max_residual = r;
            rep.worst_x = x;
        }
        rep.max_smooth_residual = std::max(rep.max_smooth_residual, Au_s - smooth.g_smooth[i] + gain);
        rep.max_abs_step_operator = std::max(rep.max_abs_step_operator, std::fabs(Au_st));
        rep.min_force_margin = std::min(rep.min_force_margin, f - smooth.g_smooth[i]);
        rep.min_u_total = std::min(rep.min_u_total, u_total[i]);
        rep.max_composition_excess = std::max(rep.max_composition_excess,
                                              r - (Au_s - smooth.g_smooth[i] + rep.force + std::fabs(Au_st)));
    }
    rep.smooth_ok = rep.max_smooth_residual <= rep.tolerance;
    rep.step_ok = rep.max_abs_step_operator <= rep.step_bound;
    rep.force_ok = rep.min_force_margin >= -1e-12;
    rep.nonnegative = rep.min_u_total >= 0.0;
    rep.composition_ok = rep.max_composition_excess <= 1e-9;
    rep.passed = rep.max_residual <= rep.tolerance;

    auto uf = GridFunction::sample(grid, [&](double x) { return u_flat(x); });
    return SupersolutionBundle{std::move(sel), params, layout, cell, std::move(uf), std::move(smooth.u_smooth),
                               std::move(smooth.g_smooth), std::move(u_step), std::move(u_total),
                               std::move(residual), params.F_star, rep, seed};
}

// ---------------------------------------------------------------- io

void write_bundle_csv(std::ostream& os, const SupersolutionBundle& b, std::size_t stride)
{
    if (stride == 0) stride = 1;
    os.precision(17);
    os << "# pinlab-bundle v1 seed=" << b.seed << '\n';
    os << "x,u_flat,u_smooth,u_step,u_total,residual\n";
    const auto& g = b.u_total.grid;
    for (std::size_t i = 0; i < g.size(); i += stride)
        os << g.x(i) << ',' << b.u_flat[i] << ',' << b.u_smooth[i] << ',' << b.u_step[i] << ',' << b.u_total[i]
           << ',' << b.residual[i] << '\n';
}

void write_bundle_summary(std::ostream& os, const SupersolutionBundle& b)
{
    const auto& p = b.params;
    const auto& r = b.verification;
    os.precision(17);
    os << "# pinlab-bundle-summary v1\n";
    os << "seed = " << b.seed << '\n';
    os << "s = " << p.in.s << "\nr0 = " << p.in.r0 << "\nr1 = " << p.in.r1 << "\nq = " << p.in.q
       << "\nV = " << p.in.V << "\nF2 = " << p.in.F2 << "\nF1 = " << p.F1 << '\n';
    os << "l = " << p.l << "\nd = " << p.d << "\na = " << p.a << "\nb = " << p.b << "\ndelta = " << p.delta
       << "\nh = " << p.h << "\nepsilon = " << p.epsilon << '\n';
    os << "C0 = " << p.C0 << "\nC1 = " << p.C1 << "\nC2 = " << p.C2 << '\n';
    os << "F_star = " << b.F_star << "\nforce = " << r.force << '\n';
    os << "boxes = " << b.layout.n_boxes << "\nrows = " << b.layout.rows << "\ngrid_points = " << r.grid_points << '\n';
    os << "max_residual = " << r.max_residual << "\nworst_x = " << r.worst_x << "\ntolerance = " << r.tolerance << '\n';
    os << "max_smooth_residual = " << r.max_smooth_residual << "\nmax_abs_step_operator = " << r.max_abs_step_operator
       << "\nstep_bound = " << r.step_bound << "\nmin_force_margin = " << r.min_force_margin
       << "\nmin_u_total = " << r.min_u_total << "\nmax_composition_excess = " << r.max_composition_excess << '\n';
    os << "certified = " << (r.passed ? "true" : "false") << '\n';
}

}  // namespace pinlab
