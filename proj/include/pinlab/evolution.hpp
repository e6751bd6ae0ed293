#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "pinlab/frac_operators.hpp"
#include "pinlab/random_media.hpp"

namespace pinlab {

struct EvolutionConfig {
    PeriodicGrid grid;
    FractionalOrder s;
    double F = 0.0;
    double dt = 0.0;
    double t_max = 0.0;
    // unset: 1e-8 F, or 1e-14 when F = 0
    std::optional<double> pin_tol;
    double escape_height = 0.0;
    std::size_t pin_window = 100;
    // the explicit obstacle term is stepped with dt * |df/du| <= this
    double stiffness_cap = 0.5;
    // call the observer every this many steps (0: never)
    std::size_t snapshot_every = 0;

    double pin_tolerance() const;
};

// Defaults tied to a field: dt from default_time_step, escape height just
// above every obstacle support.
EvolutionConfig make_evolution_config(const PeriodicGrid& grid, FractionalOrder s, double F,
                                      const ObstacleField& field, double t_max);

void validate(const EvolutionConfig& cfg, const ObstacleField& field);

double default_time_step(const PeriodicGrid& grid, FractionalOrder s);

// Smallest entry of the discrete resolvent kernel of 1/(1 + dt |k|^{2s})
// relative to its largest; nonnegative means the implicit part is monotone.
double resolvent_min_weight(const PeriodicGrid& grid, FractionalOrder s, double dt);

enum class Outcome { Pinned, Escaped, Undecided };
std::string_view to_string(Outcome o);

struct PinningVerdict {
    Outcome outcome = Outcome::Undecided;
    GridFunction final_profile;
    double t_final = 0.0;
    double max_velocity_at_end = 0.0;
    std::size_t steps = 0;
    double min_dt = 0.0;
};

// Obstacle force sampled along the vertical lines of a grid, with each
// column's nearby obstacles cached.
class ColumnForce {
public:
    ColumnForce(const ObstacleField& field, const PeriodicGrid& grid);

    double at(std::size_t i, double y) const;
    void eval(const std::vector<double>& u, std::vector<double>& out) const;
    // fills out with the force at y = u_i and returns max_i |d/dy force|
    double eval_with_slope(const std::vector<double>& u, std::vector<double>& out) const;

private:
    struct Entry {
        double dx, y, strength;
    };
    BumpProfile bump_;
    std::vector<std::size_t> offsets_;
    std::vector<Entry> entries_;
};

class Stepper {
public:
    Stepper(const EvolutionConfig& cfg, const ObstacleField& field);

    // one semi-implicit step of size dt
    void advance(std::vector<double>& u, double dt);
    // one step of size min(dt_max, stiffness_cap / |df/du|); returns the size used
    double advance_capped(std::vector<double>& u, double dt_max);
    const ColumnForce& force() const { return force_; }

private:
    void implicit_part(std::vector<double>& u, double dt);
    EvolutionConfig cfg_;
    ColumnForce force_;
    std::vector<double> work_, f_;
    std::vector<double> symbol_;
};

GridFunction step(const GridFunction& u, const EvolutionConfig& cfg, const ObstacleField& field);

using SnapshotObserver = std::function<void(double t, const GridFunction& u)>;

// From u = 0 until pinned, escaped or t_max.
PinningVerdict run(const EvolutionConfig& cfg, const ObstacleField& field, const SnapshotObserver& observer = {});
PinningVerdict run_from(GridFunction u0, const EvolutionConfig& cfg, const ObstacleField& field,
                        const SnapshotObserver& observer = {});

struct ScanRecord {
    double F;
    Outcome outcome;
    double t_final;
};

struct ThresholdScan {
    double F_lo, F_hi;
    std::vector<ScanRecord> records;
};

// Undecided counts as not pinned.
ThresholdScan threshold_scan(const ObstacleField& field, const EvolutionConfig& cfg_base, double F_lo, double F_hi,
                             std::size_t n_bisect);

void write_trajectory_header(std::ostream& os);
void write_snapshot_csv(std::ostream& os, double t, const GridFunction& u, std::size_t stride = 1);
void write_verdict(std::ostream& os, const PinningVerdict& v, const EvolutionConfig& cfg);

}  // namespace pinlab
