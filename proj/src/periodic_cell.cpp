#include "pinlab/periodic_cell.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "pinlab/error.hpp"
#include "pinlab/fft.hpp"
#include "pinlab/special.hpp"

namespace pinlab {

using std::numbers::pi;

CellParams make_cell_params(double a, double b, double delta, double F2, double s)
{
    const FractionalOrder order = model_order(s);
    if (!(b > 0.0)) throw ConfigError("cell: b > 0 violated");
    if (!(a > 4.0 * b)) throw ConfigError("cell: a > 4b violated");
    if (!(delta > 0.0)) throw ConfigError("cell: delta > 0 violated");
    if (!(delta < std::min(1.0, b))) throw ConfigError("cell: delta < min{1, b} violated");
    if (!(F2 > 0.0)) throw ConfigError("cell: F2 > 0 violated");
    const double rho = b + 0.5 * delta;
    return CellParams{a, b, delta, F2, rho * F2 / (a - rho), rho, order};
}

namespace {

// representative of x in [-a, a)
double reduce(double x, double a)
{
    const double p = 2.0 * a;
    return x - p * std::floor((x + a) / p);
}

}  // namespace

double eval_g_tilde(const CellParams& p, double x)
{
    const double y = reduce(x, p.a);
    return std::fabs(y) <= p.rho ? p.F2 : -p.F1;
}

double eval_g(const CellParams& p, double x)
{
    const double y = reduce(x, p.a);
    const Mollifier m(0.5 * p.delta);
    return -p.F1 + (p.F1 + p.F2) * (m.cdf(y + p.rho) - m.cdf(y - p.rho));
}

FourierProfile::FourierProfile(CellParams p, std::size_t n_modes) : p_(p)
{
    if (n_modes < 16) throw ConfigError("profile needs at least 16 modes");
    const double s = p.s.value();
    const double amp = 2.0 * std::pow(p.a, 2.0 * s) * (p.F1 + p.F2) / std::pow(pi, 1.0 + 2.0 * s);
    const Mollifier m(0.5 * p.delta);
    coef_.resize(n_modes);
    coef_v_.resize(n_modes);
    int negligible = 0;
    for (std::size_t k = 1; k <= n_modes; ++k) {
        const double kd = static_cast<double>(k);
        coef_[k - 1] = -amp * std::sin(kd * pi * p.rho / p.a) / std::pow(kd, 1.0 + 2.0 * s);
        if (negligible < 64) {
            // the quadrature symbol bottoms out at round-off near 1e-16
            const double sym = m.symbol(kd * pi / p.a);
            negligible = std::fabs(sym) < 1e-15 ? negligible + 1 : 0;
            coef_v_[k - 1] = coef_[k - 1] * sym;
        }
    }
    tail_ = amp * std::pow(static_cast<double>(n_modes), -2.0 * s) / (2.0 * s);
}

double FourierProfile::series(const std::vector<double>& c, double x, bool slope) const
{
    const double theta = pi * x / p_.a;
    const std::complex<double> step = std::polar(1.0, theta);
    std::complex<double> z = step;
    double acc = 0.0;
    for (std::size_t k = 1; k <= c.size(); ++k) {
        if (k % 128 == 0) z = std::polar(1.0, std::fmod(static_cast<double>(k) * theta, 2.0 * pi));
        if (c[k - 1] != 0.0)
            acc += slope ? -c[k - 1] * (static_cast<double>(k) * pi / p_.a) * z.imag()
                         : c[k - 1] * z.real();
        z *= step;
    }
    return acc;
}

GridFunction FourierProfile::sample(const std::vector<double>& c, const PeriodicGrid& grid,
                                    bool slope) const
{
    if (std::fabs(grid.period() - 2.0 * p_.a) > 1e-12 * 2.0 * p_.a)
        throw ConfigError("profile sampling grid must have period 2a");
    const std::size_t n = grid.size();
    std::vector<std::complex<double>> spec(n / 2 + 1);
    const double phase0 = pi * grid.origin() / p_.a;
    const double nd = static_cast<double>(n);
    for (std::size_t k = 1; k <= c.size(); ++k) {
        if (c[k - 1] == 0.0) continue;
        const double kd = static_cast<double>(k);
        std::complex<double> amp = c[k - 1] * std::polar(1.0, std::fmod(kd * phase0, 2.0 * pi));
        if (slope) amp *= std::complex<double>(0.0, kd * pi / p_.a);
        const std::size_t m = k % n;
        if (m == 0 || 2 * m == n) spec[m] += nd * amp.real();
        else if (2 * m < n) spec[m] += 0.5 * nd * amp;
        else spec[n - m] += 0.5 * nd * std::conj(amp);
    }
    return GridFunction(grid, irfft(spec, n));
}

FourierProfile build_v_profile(const CellParams& p, std::size_t n_modes) { return FourierProfile(p, n_modes); }

std::size_t modes_for_tail(const CellParams& p, double target)
{
    const double s = p.s.value();
    const double amp = 2.0 * std::pow(p.a, 2.0 * s) * (p.F1 + p.F2) / std::pow(pi, 1.0 + 2.0 * s);
    const double n = std::pow(amp / (2.0 * s * target), 1.0 / (2.0 * s));
    std::size_t m = 16;
    while (static_cast<double>(m) < n) m *= 2;
    return m;
}

double linf_bound(const CellParams& p)
{
    const double s = p.s.value();
    const double f = p.F1 + p.F2;
    if (s == 0.5)
        return 2.0 * f * p.rho * (2.0 + std::log(p.a) - std::log(pi * p.rho)) / pi;
    return 2.0 * f / std::pow(pi, 2.0 * s) * riemann_zeta(2.0 * s) * std::pow(p.a, 2.0 * s - 1.0) * p.rho;
}

MonotoneReport check_monotone(const FourierProfile& profile, std::size_t grid_n)
{
    if (grid_n < 256) throw ConfigError("monotonicity check needs grid_n >= 256");
    const auto& p = profile.params();
    const PeriodicGrid grid(2.0 * p.a, 2 * grid_n, 0.0);
    const auto vt = profile.sample_v_tilde(grid);
    const auto v = profile.sample_v(grid);
    const double dx = grid.spacing();
    MonotoneReport rep;
    rep.min_slope_v_tilde = rep.min_slope_v = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < grid_n; ++j) {
        rep.min_slope_v_tilde = std::min(rep.min_slope_v_tilde, (vt[j + 1] - vt[j]) / dx);
        rep.min_slope_v = std::min(rep.min_slope_v, (v[j + 1] - v[j]) / dx);
    }
    for (std::size_t j = 1; j < grid_n; ++j) {
        rep.max_reflection_error = std::max(rep.max_reflection_error, std::fabs(vt[2 * grid_n - j] - vt[j]));
        rep.max_reflection_error = std::max(rep.max_reflection_error, std::fabs(v[2 * grid_n - j] - v[j]));
    }
    for (double x : {0.0, p.a})
        rep.endpoint_slope = std::max({rep.endpoint_slope, std::fabs(profile.v_tilde_slope(x)),
                                       std::fabs(profile.v_slope(x))});
    const double tol = -1e-12;
    rep.passed = rep.min_slope_v_tilde > tol && rep.min_slope_v > tol;
    std::ostringstream os;
    os << "min slope v_tilde " << rep.min_slope_v_tilde << ", v " << rep.min_slope_v;
    rep.detail = os.str();
    return rep;
}

CellResidual cell_residual(const FourierProfile& profile, std::size_t grid_n, bool mollified,
                           double exclusion)
{
    const auto& p = profile.params();
    const PeriodicGrid grid(2.0 * p.a, grid_n, -p.a);
    const auto w = mollified ? profile.sample_v(grid) : profile.sample_v_tilde(grid);
    const auto lap = apply_spectral(w, p.s);
    const double gap = exclusion * grid.spacing();
    CellResidual r;
    r.tolerance = 10.0 * profile.tail_bound();
    for (std::size_t i = 0; i < grid_n; ++i) {
        const double x = grid.x(i);
        if (std::fabs(std::fabs(x) - p.rho) <= gap) continue;
        const double target = mollified ? eval_g(p, x) : eval_g_tilde(p, x);
        const double err = std::fabs(-lap[i] - target);
        if (err > r.max_error) {
            r.max_error = err;
            r.worst_x = x;
        }
    }
    r.passed = r.max_error < r.tolerance;
    return r;
}

ProfileTable::ProfileTable(const FourierProfile& profile, std::size_t nodes)
    : period_(2.0 * profile.params().a), h_(period_ / static_cast<double>(nodes))
{
    const PeriodicGrid grid(period_, nodes, 0.0);
    val_ = profile.sample_v(grid).values;
    slope_ = profile.sample_v_slope(grid).values;
}

double ProfileTable::operator()(double x) const
{
    double y = x - period_ * std::floor(x / period_);
    double pos = y / h_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= val_.size()) i = val_.size() - 1;
    const std::size_t j = i + 1 == val_.size() ? 0 : i + 1;
    const double u = pos - static_cast<double>(i);
    const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
    const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
    return h00 * val_[i] + h10 * h_ * slope_[i] + h01 * val_[j] + h11 * h_ * slope_[j];
}

double ProfileTable::slope(double x) const
{
    double y = x - period_ * std::floor(x / period_);
    double pos = y / h_;
    auto i = static_cast<std::size_t>(pos);
    if (i >= val_.size()) i = val_.size() - 1;
    const std::size_t j = i + 1 == val_.size() ? 0 : i + 1;
    const double u = pos - static_cast<double>(i);
    const double d00 = 6 * u * u - 6 * u, d10 = 3 * u * u - 4 * u + 1;
    const double d01 = -d00, d11 = 3 * u * u - 2 * u;
    return (d00 * val_[i] + d01 * val_[j]) / h_ + d10 * slope_[i] + d11 * slope_[j];
}

void write_profile_csv(std::ostream& os, const FourierProfile& profile, std::size_t grid_n)
{
    const auto& p = profile.params();
    const PeriodicGrid grid(2.0 * p.a, grid_n, -p.a);
    const auto v = profile.sample_v(grid);
    os.precision(17);
    os << "# pinlab-profile v1 a=" << p.a << " b=" << p.b << " delta=" << p.delta << " F2=" << p.F2
       << " s=" << p.s.value() << " n_modes=" << profile.n_modes() << '\n';
    os << "x,v,g\n";
    for (std::size_t i = 0; i < grid_n; ++i)
        os << grid.x(i) << ',' << v[i] << ',' << eval_g(p, grid.x(i)) << '\n';
}

}  // namespace pinlab
