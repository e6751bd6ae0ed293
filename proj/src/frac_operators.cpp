#include "pinlab/frac_operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "pinlab/error.hpp"
#include "pinlab/fft.hpp"
#include "pinlab/special.hpp"

namespace pinlab {

// ---------------------------------------------------------------- grid

PeriodicGrid::PeriodicGrid(double period, std::size_t n_points, double origin)
    : period_(period), n_(n_points), origin_(origin)
{
    if (!(period > 0.0) || !std::isfinite(period))
        throw ConfigError("grid period must be positive");
    if (n_points < 8 || n_points % 2 != 0)
        throw ConfigError("grid size must be even and at least 8");
}

double PeriodicGrid::wavenumber(std::size_t i) const
{
    return 2.0 * std::numbers::pi * static_cast<double>(i) / period_;
}

GridFunction::GridFunction(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v))
{
    if (values.size() != grid.size())
        throw ConfigError("grid function length does not match grid");
}

GridFunction GridFunction::sample(PeriodicGrid g, const std::function<double(double)>& f)
{
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.x(i));
    return GridFunction(g, std::move(v));
}

double GridFunction::mean() const
{
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(values.size());
}

double GridFunction::max() const { return *std::max_element(values.begin(), values.end()); }
double GridFunction::min() const { return *std::min_element(values.begin(), values.end()); }

double GridFunction::max_abs() const
{
    double m = 0.0;
    for (double v : values) m = std::max(m, std::fabs(v));
    return m;
}

FractionalOrder::FractionalOrder(double s) : s_(s)
{
    if (!(s > 0.0 && s <= 1.0))
        throw ConfigError("fractional order must lie in (0, 1]");
}

FractionalOrder model_order(double s)
{
    if (!(s >= 0.5 && s < 1.0))
        throw ConfigError("s must lie in [1/2, 1)");
    return FractionalOrder(s);
}

// ---------------------------------------------------------------- mollifier

namespace {

double raw_bump(double t)
{
    const double u = 1.0 - t * t;
    return u > 0.0 ? std::exp(-1.0 / u) : 0.0;
}

using Gauss20 = boost::math::quadrature::gauss<double, 20>;

struct UnitBump {
    static constexpr std::size_t cdf_panels = 4096;
    static constexpr std::size_t symbol_panels = 64;

    double norm = 0.0;
    double max_slope = 0.0;
    std::vector<double> cum;  // normalized cdf at panel edges
    std::vector<double> sym_t, sym_w;  // nodes on [0,1] with weight*kernel folded in

    UnitBump() {
        const double h = 2.0 / cdf_panels;
        cum.assign(cdf_panels + 1, 0.0);
        for (std::size_t i = 0; i < cdf_panels; ++i) {
            const double lo = -1.0 + h * static_cast<double>(i);
            cum[i + 1] = cum[i] + Gauss20::integrate(raw_bump, lo, lo + h);
        }
        norm = cum.back();
        for (double& c : cum) c /= norm;

        const double w = 1.0 / symbol_panels;
        for (std::size_t p = 0; p < symbol_panels; ++p) {
            const double lo = w * static_cast<double>(p);
            const double mid = lo + 0.5 * w;
            const auto& xs = Gauss20::abscissa();
            const auto& ws = Gauss20::weights();
            for (std::size_t j = 0; j < xs.size(); ++j) {
                for (int sgn : {-1, 1}) {
                    if (j == 0 && sgn == 1 && xs.size() % 2 == 1) continue;
                    const double t = mid + sgn * 0.5 * w * xs[j];
                    sym_t.push_back(t);
                    sym_w.push_back(0.5 * w * ws[j] * raw_bump(t) / norm);
                }
            }
        }

        // sup |eta'| on (0,1): dense scan then golden-section refinement
        auto slope = [this](double t) {
            const double u = 1.0 - t * t;
            return raw_bump(t) * 2.0 * t / (u * u) / norm;
        };
        double best_t = 0.0, best = 0.0;
        const int n = 20000;
        for (int i = 1; i < n; ++i) {
            const double t = static_cast<double>(i) / n;
            if (slope(t) > best) { best = slope(t); best_t = t; }
        }
        double lo = best_t - 1.0 / n, hi = best_t + 1.0 / n;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double m1 = hi - gr * (hi - lo), m2 = lo + gr * (hi - lo);
            if (slope(m1) < slope(m2)) lo = m1; else hi = m2;
        }
        max_slope = slope(0.5 * (lo + hi));
    }

    double cdf(double t) const {
        if (t <= -1.0) return 0.0;
        if (t >= 1.0) return 1.0;
        const double h = 2.0 / cdf_panels;
        auto i = static_cast<std::size_t>((t + 1.0) / h);
        if (i >= cdf_panels) i = cdf_panels - 1;
        const double t0 = -1.0 + h * static_cast<double>(i);
        const double u = (t - t0) / h;
        const double d0 = raw_bump(t0) / norm * h, d1 = raw_bump(t0 + h) / norm * h;
        const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
        const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
        return h00 * cum[i] + h10 * d0 + h01 * cum[i + 1] + h11 * d1;
    }

    double symbol(double omega) const {
        omega = std::fabs(omega);
        if (omega > 1e5) return 0.0;  // below exp(-400)
        const std::size_t panels = std::max<std::size_t>(symbol_panels,
                                                          static_cast<std::size_t>(omega / 2.0) + 1);
        if (panels == symbol_panels) {
            double acc = 0.0;
            for (std::size_t i = 0; i < sym_t.size(); ++i) acc += sym_w[i] * std::cos(omega * sym_t[i]);
            return 2.0 * acc;
        }
        const double w = 1.0 / static_cast<double>(panels);
        double acc = 0.0;
        for (std::size_t p = 0; p < panels; ++p) {
            const double lo = w * static_cast<double>(p);
            acc += Gauss20::integrate([&](double t) { return raw_bump(t) * std::cos(omega * t); },
                                      lo, lo + w);
        }
        return 2.0 * acc / norm;
    }
};

const UnitBump& unit_bump()
{
    static const UnitBump b;
    return b;
}

}  // namespace

Mollifier::Mollifier(double radius) : radius_(radius)
{
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw ConfigError("mollifier radius must be positive");
}

double Mollifier::kernel(double x) const
{
    return raw_bump(x / radius_) / (unit_bump().norm * radius_);
}

double Mollifier::kernel_derivative(double x) const
{
    const double t = x / radius_;
    const double u = 1.0 - t * t;
    if (u <= 0.0) return 0.0;
    return -raw_bump(t) * 2.0 * t / (u * u) / (unit_bump().norm * radius_ * radius_);
}

double Mollifier::cdf(double x) const { return unit_bump().cdf(x / radius_); }

double Mollifier::symbol(double omega) const { return unit_bump().symbol(omega * radius_); }

double Mollifier::unit_normalizer() { return unit_bump().norm; }

double Mollifier::unit_max_slope() { return unit_bump().max_slope; }

// ---------------------------------------------------------------- spectral

GridFunction apply_spectral(const GridFunction& f, FractionalOrder order)
{
    for (double v : f.values)
        if (!std::isfinite(v)) throw NumericError("apply_spectral: non-finite input");
    auto spec = rfft(f.values);
    const double s2 = 2.0 * order.value();
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] *= i == 0 ? 0.0 : std::pow(f.grid.wavenumber(i), s2);
    return GridFunction(f.grid, irfft(spec, f.size()));
}

// ---------------------------------------------------------------- singular integral

namespace {

struct Integrand {
    std::function<double(double)> fn;
    static double call(double t, void* p) { return static_cast<Integrand*>(p)->fn(t); }
};

struct Workspace {
    explicit Workspace(std::size_t n) : w(gsl_integration_workspace_alloc(n)), limit(n) {}
    ~Workspace() { gsl_integration_workspace_free(w); }
    Workspace(const Workspace&) = delete;
    Workspace& operator=(const Workspace&) = delete;
    gsl_integration_workspace* w;
    std::size_t limit;
};

// Adaptive integral over [lo, hi] split at dyadic points measured from lo0.
void dyadic_integrate(Integrand& g, double lo, double hi, const PointwiseOptions& opt,
                      Workspace& ws, double& value, double& error)
{
    gsl_function gf{&Integrand::call, &g};
    double a = lo;
    while (a < hi) {
        const double b = std::min(hi, 2.0 * a);
        double r = 0.0, e = 0.0;
        const int status = gsl_integration_qag(&gf, a, b, opt.abs_tol, opt.rel_tol, ws.limit,
                                               GSL_INTEG_GAUSS21, ws.w, &r, &e);
        value += r;
        error += e;
        if (status != GSL_SUCCESS && e > 10.0 * std::max(opt.abs_tol, opt.rel_tol * std::fabs(r)))
            throw NumericError("singular integral did not converge on [" + std::to_string(a) + ", "
                                   + std::to_string(b) + "]",
                               value, error);
        a = b;
    }
}

}  // namespace

PointwiseResult apply_pointwise_integral(const std::function<double(double)>& f, double x,
                                         FractionalOrder order, const PointwiseOptions& opt)
{
    const double s = order.value();
    if (s >= 1.0) throw ConfigError("singular-integral form needs s < 1");
    const double sigma = 1.0 + 2.0 * s;
    const double rho = opt.near_radius;
    if (!(rho > 0.0)) throw ConfigError("near_radius must be positive");

    const double f0 = f(x);
    auto second_diff = [&](double t) { return 2.0 * f0 - f(x + t) - f(x - t); };

    // near field: D(t) = -f''(x) t^2 - f''''(x) t^4 / 12 + O(t^6)
    const double d2_h = -second_diff(rho) / (rho * rho);
    const double d2_h2 = -second_diff(0.5 * rho) / (0.25 * rho * rho);
    const double fpp = (4.0 * d2_h2 - d2_h) / 3.0;
    const double f4 = 16.0 * (d2_h - d2_h2) / (rho * rho);
    const double near2 = std::pow(rho, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    const double near4 = std::pow(rho, 4.0 - 2.0 * s) / (12.0 * (4.0 - 2.0 * s));
    double value = -fpp * near2 - f4 * near4;
    double error = std::fabs(f4 * near4) * 0.1 + 1e-15 * std::fabs(f0) * std::pow(rho, -2.0 * s);

    Workspace ws(opt.max_intervals);
    if (opt.period > 0.0) {
        const double P = opt.period;
        if (rho >= 0.5 * P) throw ConfigError("near_radius must be below half the period");
        const double scale = std::pow(P, -sigma);
        Integrand g{[&](double t) {
            return second_diff(t) * scale * (hurwitz_zeta(sigma, t / P) + hurwitz_zeta(sigma, 1.0 - t / P));
        }};
        dyadic_integrate(g, rho, 0.5 * P, opt, ws, value, error);
        // images of the near interval
        value += Gauss20::integrate([&](double t) {
            return second_diff(t) * scale * (hurwitz_zeta(sigma, 1.0 - t / P) + hurwitz_zeta(sigma, 1.0 + t / P));
        }, 0.0, rho);
    } else {
        const double T = opt.far_cut;
        if (!(T > rho)) throw ConfigError("far_cut must exceed near_radius");
        Integrand g{[&](double t) { return second_diff(t) * std::pow(t, -sigma); }};
        dyadic_integrate(g, rho, T, opt, ws, value, error);
        value += 2.0 * f0 * std::pow(T, -2.0 * s) / (2.0 * s);
        const double al = opt.growth_exponent;
        if (al >= 2.0 * s) throw ConfigError("growth exponent must be below 2s");
        error += 2.0 * opt.growth_constant * std::pow(1.0 + (std::fabs(x) + 1.0) / T, al)
                 * std::pow(T, al - 2.0 * s) / (2.0 * s - al);
    }
    const double c = frac_laplacian_constant(s);
    return {c * value, c * error};
}

// ---------------------------------------------------------------- mollification

GridFunction mollify(const GridFunction& f, const Mollifier& m)
{
    const PeriodicGrid& g = f.grid;
    if (!(m.radius() < 0.5 * g.period()))
        throw ConfigError("mollifier radius must be below half the period");
    const std::size_t n = g.size();
    const double dx = g.spacing();
    std::vector<double> ker(n, 0.0);
    const auto reach = static_cast<std::size_t>(std::floor(m.radius() / dx));
    double mass = 0.0;
    for (std::size_t j = 0; j <= reach && j < n / 2; ++j) {
        const double w = m.kernel(static_cast<double>(j) * dx);
        ker[j] += w;
        mass += w;
        if (j > 0) {
            ker[n - j] += w;
            mass += w;
        }
    }
    if (mass == 0.0) {  // radius below one spacing
        ker[0] = 1.0;
        mass = 1.0;
    }
    for (double& w : ker) w /= mass;
    auto fs = rfft(f.values);
    const auto ks = rfft(ker);
    for (std::size_t i = 0; i < fs.size(); ++i) fs[i] *= ks[i].real();  // even kernel
    return GridFunction(g, irfft(fs, n));
}

// ---------------------------------------------------------------- io

void write_csv(std::ostream& os, const GridFunction& f)
{
    os << "# pinlab-grid v1 period=" << f.grid.period() << " n=" << f.grid.size()
       << " origin=" << f.grid.origin() << '\n';
    os << "x,value\n";
    os.precision(17);
    for (std::size_t i = 0; i < f.size(); ++i) os << f.grid.x(i) << ',' << f.values[i] << '\n';
}

GridFunction read_grid_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line.rfind("# pinlab-grid v1", 0) != 0)
        throw ConfigError("grid csv: missing version header");
    double period = 0.0, origin = 0.0;
    std::size_t n = 0;
    std::istringstream hs(line.substr(16));
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "period") period = std::stod(val);
        else if (key == "n") n = std::stoul(val);
        else if (key == "origin") origin = std::stod(val);
    }
    std::getline(is, line);  // column names
    std::vector<double> v;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ConfigError("grid csv: malformed row");
        v.push_back(std::stod(line.substr(comma + 1)));
    }
    return GridFunction(PeriodicGrid(period, n, origin), std::move(v));
}

// ---------------------------------------------------------------- self test

OperatorSelfTest operator_self_test(std::uint64_t seed, std::size_t n_polys, std::size_t n_points,
                                    double tolerance)
{
    OperatorSelfTest rep;
    rep.tolerance = tolerance;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    const double P = 2.0 * std::numbers::pi;
    const std::size_t modes = 16;
    for (double s : {0.5, 0.6, 0.75, 0.9}) {
        const FractionalOrder ord(s);
        for (std::size_t k = 0; k < n_polys; ++k) {
            std::vector<double> ca(modes + 1), cb(modes + 1);
            for (std::size_t j = 1; j <= modes; ++j) { ca[j] = coef(rng); cb[j] = coef(rng); }
            auto poly = [&](double x) {
                double acc = 0.0;
                for (std::size_t j = 1; j <= modes; ++j)
                    acc += ca[j] * std::cos(j * x) + cb[j] * std::sin(j * x);
                return acc;
            };
            const PeriodicGrid grid(P, 64);
            const auto spec = apply_spectral(GridFunction::sample(grid, poly), ord);
            const double scale = spec.max_abs();
            PointwiseOptions opt;
            opt.period = P;
            const std::size_t stride = grid.size() / n_points;
            for (std::size_t i = 0; i < grid.size(); i += stride) {
                const auto r = apply_pointwise_integral(poly, grid.x(i), ord, opt);
                rep.max_rel_error = std::max(rep.max_rel_error, std::fabs(r.value - spec[i]) / scale);
                ++rep.cases;
            }
        }
    }
    rep.passed = rep.max_rel_error < tolerance;
    return rep;
}

}  // namespace pinlab
