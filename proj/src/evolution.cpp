#include "pinlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <ostream>

#include "pinlab/error.hpp"
#include "pinlab/fft.hpp"

namespace pinlab {

double EvolutionConfig::pin_tolerance() const
{
    if (pin_tol) return *pin_tol;
    return F == 0.0 ? 1e-14 : 1e-8 * std::fabs(F);
}

double default_time_step(const PeriodicGrid& grid, FractionalOrder s)
{
    // large enough that the resolvent kernel stays nonnegative for s <= 3/4
    return 10.0 * std::pow(grid.spacing(), 2.0 * s.value());
}

EvolutionConfig make_evolution_config(const PeriodicGrid& grid, FractionalOrder s, double F,
                                      const ObstacleField& field, double t_max)
{
    EvolutionConfig cfg{.grid = grid, .s = s, .pin_tol = std::nullopt};
    cfg.F = F;
    cfg.dt = default_time_step(grid, s);
    cfg.t_max = t_max;
    cfg.escape_height = field.window().y_hi + field.bump().r1();
    return cfg;
}

void validate(const EvolutionConfig& cfg, const ObstacleField& field)
{
    if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (!(cfg.t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (!(cfg.pin_tolerance() > 0.0)) throw ConfigError("pin_tol must be positive");
    if (!(cfg.stiffness_cap > 0.0)) throw ConfigError("stiffness_cap must be positive");
    if (cfg.pin_window == 0) throw ConfigError("pin_window must be at least 1");
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& o : field.obstacles()) top = std::max(top, o.y);
    if (!field.obstacles().empty() && !(cfg.escape_height > top))
        throw ConfigError("escape_height must exceed every obstacle height");
}

double resolvent_min_weight(const PeriodicGrid& grid, FractionalOrder s, double dt)
{
    const std::size_t n = grid.size();
    std::vector<std::complex<double>> spec(n / 2 + 1);
    for (std::size_t i = 0; i < spec.size(); ++i)
        spec[i] = 1.0 / (1.0 + dt * std::pow(grid.wavenumber(i), 2.0 * s.value()));
    const auto kernel = irfft(spec, n);
    const auto [lo, hi] = std::minmax_element(kernel.begin(), kernel.end());
    return *lo / *hi;
}

std::string_view to_string(Outcome o)
{
    switch (o) {
    case Outcome::Pinned: return "Pinned";
    case Outcome::Escaped: return "Escaped";
    case Outcome::Undecided: break;
    }
    return "Undecided";
}

// ---------------------------------------------------------------- force columns

ColumnForce::ColumnForce(const ObstacleField& field, const PeriodicGrid& grid) : bump_(field.bump())
{
    const double P = field.window().width();
    offsets_.reserve(grid.size() + 1);
    offsets_.push_back(0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.x(i);
        for (std::size_t id : field.near_column(x)) {
            const Obstacle& o = field.obstacles()[id];
            double dx = x - o.x;
            if (field.periodic_x()) dx -= P * std::round(dx / P);
            if (std::fabs(dx) < bump_.r1()) entries_.push_back({dx, o.y, o.strength});
        }
        offsets_.push_back(entries_.size());
    }
}

double ColumnForce::at(std::size_t i, double y) const
{
    double acc = 0.0;
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
        const Entry& en = entries_[e];
        acc += en.strength * bump_(en.dx, y - en.y);
    }
    return acc;
}

void ColumnForce::eval(const std::vector<double>& u, std::vector<double>& out) const
{
    out.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = at(i, u[i]);
}

double ColumnForce::eval_with_slope(const std::vector<double>& u, std::vector<double>& out) const
{
    out.resize(u.size());
    double best = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        double acc = 0.0, slope = 0.0;
        for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e) {
            const Entry& en = entries_[e];
            acc += en.strength * bump_(en.dx, u[i] - en.y);
            slope += en.strength * bump_.slope_y(en.dx, u[i] - en.y);
        }
        out[i] = acc;
        best = std::max(best, std::fabs(slope));
    }
    return best;
}

// ---------------------------------------------------------------- stepping

Stepper::Stepper(const EvolutionConfig& cfg, const ObstacleField& field) : cfg_(cfg), force_(field, cfg.grid)
{
    const std::size_t n = cfg.grid.size();
    symbol_.resize(n / 2 + 1);
    for (std::size_t i = 0; i < symbol_.size(); ++i)
        symbol_[i] = std::pow(cfg.grid.wavenumber(i), 2.0 * cfg.s.value());
    work_.resize(n);
}

namespace {
void check_finite(const std::vector<double>& u)
{
    for (double v : u)
        if (!std::isfinite(v)) throw NumericError("evolution produced a non-finite value");
}
}  // namespace

void Stepper::advance(std::vector<double>& u, double dt)
{
    force_.eval(u, f_);
    implicit_part(u, dt);
}

double Stepper::advance_capped(std::vector<double>& u, double dt_max)
{
    const double L = force_.eval_with_slope(u, f_);
    const double dt = L * dt_max > cfg_.stiffness_cap ? cfg_.stiffness_cap / L : dt_max;
    implicit_part(u, dt);
    return dt;
}

void Stepper::implicit_part(std::vector<double>& u, double dt)
{
    for (std::size_t i = 0; i < u.size(); ++i) work_[i] = u[i] + dt * (cfg_.F - f_[i]);
    auto spec = rfft(work_);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] /= 1.0 + dt * symbol_[i];
    irfft(spec, u);
    check_finite(u);
}

GridFunction step(const GridFunction& u, const EvolutionConfig& cfg, const ObstacleField& field)
{
    if (!(u.grid == cfg.grid)) throw ConfigError("profile grid does not match the evolution grid");
    for (double v : u.values)
        if (!std::isfinite(v)) throw NumericError("non-finite input profile");
    Stepper st(cfg, field);
    GridFunction out = u;
    st.advance(out.values, cfg.dt);
    return out;
}

PinningVerdict run_from(GridFunction u, const EvolutionConfig& cfg, const ObstacleField& field,
                        const SnapshotObserver& observer)
{
    validate(cfg, field);
    if (!(u.grid == cfg.grid)) throw ConfigError("initial profile grid does not match the evolution grid");
    Stepper st(cfg, field);
    const double tol = cfg.pin_tolerance();
    PinningVerdict v{Outcome::Undecided, u};
    v.min_dt = cfg.dt;
    std::vector<double> prev;
    std::size_t quiet = 0;
    double t = 0.0;
    if (observer) observer(t, u);
    while (t < cfg.t_max) {
        prev = u.values;
        const double dt = st.advance_capped(u.values, std::min(cfg.dt, cfg.t_max - t));
        t += dt;
        ++v.steps;
        v.min_dt = std::min(v.min_dt, dt);
        double vel = 0.0;
        for (std::size_t i = 0; i < prev.size(); ++i) vel = std::max(vel, std::fabs(u[i] - prev[i]) / dt);
        v.max_velocity_at_end = vel;
        if (observer && cfg.snapshot_every && v.steps % cfg.snapshot_every == 0) observer(t, u);
        quiet = vel < tol ? quiet + 1 : 0;
        if (quiet >= cfg.pin_window) {
            v.outcome = Outcome::Pinned;
            break;
        }
        if (u.min() > cfg.escape_height) {
            v.outcome = Outcome::Escaped;
            break;
        }
    }
    if (observer && cfg.snapshot_every && v.steps % cfg.snapshot_every != 0) observer(t, u);
    v.t_final = t;
    v.final_profile = std::move(u);
    return v;
}

PinningVerdict run(const EvolutionConfig& cfg, const ObstacleField& field, const SnapshotObserver& observer)
{
    return run_from(GridFunction(cfg.grid), cfg, field, observer);
}

ThresholdScan threshold_scan(const ObstacleField& field, const EvolutionConfig& cfg_base, double F_lo, double F_hi,
                             std::size_t n_bisect)
{
    if (!(F_lo >= 0.0 && F_hi > F_lo)) throw BracketError("need 0 <= F_lo < F_hi");
    ThresholdScan out{F_lo, F_hi, {}};
    auto at = [&](double F) {
        EvolutionConfig cfg = cfg_base;
        cfg.F = F;
        const auto v = run(cfg, field);
        out.records.push_back({F, v.outcome, v.t_final});
        return v.outcome;
    };
    if (at(F_lo) != Outcome::Pinned) throw BracketError("lower force does not pin");
    if (at(F_hi) != Outcome::Escaped) throw BracketError("upper force does not escape");
    for (std::size_t k = 0; k < n_bisect; ++k) {
        const double mid = 0.5 * (out.F_lo + out.F_hi);
        if (at(mid) == Outcome::Pinned) out.F_lo = mid; else out.F_hi = mid;
    }
    return out;
}

// ---------------------------------------------------------------- io

void write_trajectory_header(std::ostream& os)
{
    os << "# pinlab-trajectory v1\n" << "t,x,u\n";
}

void write_snapshot_csv(std::ostream& os, double t, const GridFunction& u, std::size_t stride)
{
    if (stride == 0) stride = 1;
    os.precision(17);
    for (std::size_t i = 0; i < u.size(); i += stride) os << t << ',' << u.grid.x(i) << ',' << u[i] << '\n';
}

void write_verdict(std::ostream& os, const PinningVerdict& v, const EvolutionConfig& cfg)
{
    os.precision(17);
    os << "# pinlab-verdict v1\n";
    os << "outcome = " << to_string(v.outcome) << '\n';
    os << "F = " << cfg.F << "\ns = " << cfg.s.value() << "\ndt = " << cfg.dt << "\nmin_dt = " << v.min_dt
       << "\nt_max = " << cfg.t_max << "\npin_tol = " << cfg.pin_tolerance()
       << "\nescape_height = " << cfg.escape_height << '\n';
    os << "t_final = " << v.t_final << "\nsteps = " << v.steps
       << "\nmax_velocity_at_end = " << v.max_velocity_at_end << '\n';
    os << "final_min = " << v.final_profile.min() << "\nfinal_max = " << v.final_profile.max() << '\n';
}

}  // namespace pinlab
