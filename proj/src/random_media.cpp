#include "pinlab/random_media.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "pinlab/error.hpp"

namespace pinlab {

BumpProfile::BumpProfile(double r0, double r1) : r0_(r0), r1_(r1)
{
    if (!(r0 > 0.0) || !(r1 > std::sqrt(2.0) * r0))
        throw ConfigError("bump needs r1 > sqrt(2) r0 > 0");
}

double BumpProfile::smoothstep(double t)
{
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double t2 = t * t;
    return t2 * t2 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

double BumpProfile::smoothstep_slope(double t)
{
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double w = t * (1.0 - t);
    return 140.0 * w * w * w;
}

double BumpProfile::operator()(double dx, double dy) const
{
    const double r2 = dx * dx + dy * dy;
    if (r2 >= r1_ * r1_) return 0.0;
    if (std::max(std::fabs(dx), std::fabs(dy)) <= r0_) return 1.0;
    return smoothstep((r1_ - std::sqrt(r2)) / (r1_ - std::sqrt(2.0) * r0_));
}

double BumpProfile::slope_y(double dx, double dy) const
{
    const double r2 = dx * dx + dy * dy;
    if (r2 >= r1_ * r1_) return 0.0;
    if (std::max(std::fabs(dx), std::fabs(dy)) <= r0_) return 0.0;
    const double r = std::sqrt(r2);
    const double w = r1_ - std::sqrt(2.0) * r0_;
    return -smoothstep_slope((r1_ - r) / w) * dy / (r * w);
}

StrengthLaw StrengthLaw::point_mass(double value)
{
    if (!(value > 0.0)) throw ConfigError("strength must be positive");
    return StrengthLaw(value, value);
}

StrengthLaw StrengthLaw::uniform(double lo, double hi)
{
    if (!(lo > 0.0) || !(hi >= lo)) throw ConfigError("uniform strength law needs 0 < lo <= hi");
    return StrengthLaw(lo, hi);
}

double StrengthLaw::tail(double q) const
{
    if (q <= lo_) return 1.0;
    if (q > hi_) return 0.0;
    if (is_point_mass()) return 1.0;
    return (hi_ - q) / (hi_ - lo_);
}

template <class Rng>
double StrengthLaw::sample(Rng& rng) const
{
    if (is_point_mass()) return lo_;
    boost::random::uniform_real_distribution<double> u(lo_, hi_);
    return u(rng);
}

ObstacleField::ObstacleField(std::vector<Obstacle> obstacles, BumpProfile bump, double intensity,
                             Window window, std::uint64_t seed, StrengthLaw law, bool periodic_x)
    : obstacles_(std::move(obstacles)), bump_(bump), intensity_(intensity), window_(window),
      seed_(seed), law_(law), periodic_x_(periodic_x)
{
    if (!(window.x_hi > window.x_lo) || !(window.y_hi > window.y_lo))
        throw ConfigError("obstacle window is degenerate");
    if (window.y_lo < bump.r1())
        throw ConfigError("obstacle window must satisfy y_lo >= r1");
    for (const auto& o : obstacles_) {
        if (!(o.strength > 0.0)) throw ConfigError("obstacle strength must be positive");
        if (!window.contains(o.x, o.y)) throw ConfigError("obstacle outside window");
    }
    by_x_.resize(obstacles_.size());
    for (std::size_t i = 0; i < by_x_.size(); ++i) by_x_[i] = i;
    std::stable_sort(by_x_.begin(), by_x_.end(),
                     [&](std::size_t a, std::size_t b) { return obstacles_[a].x < obstacles_[b].x; });
}

template <class Fn>
void ObstacleField::for_each_near(double x, double reach, Fn&& fn) const
{
    auto scan = [&](double xq, double shift) {
        auto lo = std::lower_bound(by_x_.begin(), by_x_.end(), xq - reach,
                                   [&](std::size_t i, double v) { return obstacles_[i].x < v; });
        for (auto it = lo; it != by_x_.end() && obstacles_[*it].x <= xq + reach; ++it)
            fn(obstacles_[*it], shift);
    };
    if (!periodic_x_) {
        scan(x, 0.0);
        return;
    }
    const double P = window_.width();
    double xr = x - P * std::floor((x - window_.x_lo) / P);  // into [x_lo, x_hi)
    scan(xr, xr - x);
    if (xr - reach < window_.x_lo) scan(xr + P, xr + P - x);
    if (xr + reach > window_.x_hi) scan(xr - P, xr - P - x);
}

double ObstacleField::force(double x, double y) const
{
    double acc = 0.0;
    for_each_near(x, bump_.r1(), [&](const Obstacle& o, double shift) {
        // query point expressed in the obstacle's frame: x + shift
        acc += o.strength * bump_(x + shift - o.x, y - o.y);
    });
    return acc;
}

double ObstacleField::force_upper_bound() const
{
    double best = 0.0;
    const double reach = 2.0 * bump_.r1();
    for (const auto& o : obstacles_) {
        double acc = 0.0;
        for_each_near(o.x, reach, [&](const Obstacle& p, double shift) {
            if (std::hypot(o.x + shift - p.x, o.y - p.y) < reach) acc += p.strength;
        });
        best = std::max(best, acc);
    }
    return best;
}

std::vector<std::size_t> ObstacleField::near_column(double x) const
{
    std::vector<std::size_t> ids;
    for_each_near(x, bump_.r1(), [&](const Obstacle& o, double) { ids.push_back(o.id); });
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

ObstacleField ObstacleField::restrict_to(const Window& sub) const
{
    std::vector<Obstacle> kept;
    for (const auto& o : obstacles_)
        if (sub.contains(o.x, o.y)) kept.push_back(o);
    for (std::size_t i = 0; i < kept.size(); ++i) kept[i].id = i;
    return ObstacleField(std::move(kept), bump_, intensity_, sub, seed_, law_, false);
}

ObstacleField sample_obstacles(double intensity, const Window& window, const StrengthLaw& law,
                               const BumpProfile& bump, std::uint64_t seed, bool periodic_x)
{
    if (!(intensity >= 0.0)) throw ConfigError("intensity must be nonnegative");
    if (!(window.x_hi > window.x_lo) || !(window.y_hi > window.y_lo))
        throw ConfigError("obstacle window is degenerate");
    if (window.y_lo < bump.r1()) throw ConfigError("obstacle window must satisfy y_lo >= r1");
    std::mt19937_64 rng(seed);
    std::size_t count = 0;
    const double mean = intensity * window.area();
    if (mean > 0.0) {
        boost::random::poisson_distribution<std::size_t, double> pois(mean);
        count = pois(rng);
    }
    boost::random::uniform_real_distribution<double> ux(window.x_lo, window.x_hi);
    boost::random::uniform_real_distribution<double> uy(window.y_lo, window.y_hi);
    std::vector<Obstacle> obs;
    obs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        obs.push_back({x, y, law.sample(rng), i});
    }
    return ObstacleField(std::move(obs), bump, intensity, window, seed, law, periodic_x);
}

double eval_obstacle_force(const ObstacleField& field, double x, double y) { return field.force(x, y); }

std::vector<Obstacle> strong_obstacles(const ObstacleField& field, double q)
{
    std::vector<Obstacle> out;
    for (const auto& o : field.obstacles())
        if (o.strength >= q) out.push_back(o);
    return out;
}

void write_obstacles(std::ostream& os, const ObstacleField& field)
{
    os.precision(17);
    const auto& w = field.window();
    const auto& law = field.strength_law();
    os << "# pinlab-obstacles v1\n";
    os << "intensity " << field.intensity() << '\n';
    os << "window " << w.x_lo << ' ' << w.x_hi << ' ' << w.y_lo << ' ' << w.y_hi << '\n';
    os << "seed " << field.seed() << '\n';
    os << "bump " << field.bump().r0() << ' ' << field.bump().r1() << '\n';
    os << "law " << law.lo() << ' ' << law.hi() << '\n';
    os << "periodic " << (field.periodic_x() ? 1 : 0) << '\n';
    os << "count " << field.obstacles().size() << '\n';
    for (const auto& o : field.obstacles()) os << o.x << ' ' << o.y << ' ' << o.strength << '\n';
}

ObstacleField read_obstacles(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != "# pinlab-obstacles v1")
        throw ConfigError("obstacle file: missing version header");
    double intensity = 0.0, r0 = 0.0, r1 = 0.0, lo = 0.0, hi = 0.0;
    Window w{};
    std::uint64_t seed = 0;
    int periodic = 0;
    std::size_t count = 0;
    auto expect = [&](const char* key) -> std::istringstream {
        if (!std::getline(is, line)) throw ConfigError(std::string("obstacle file: missing ") + key);
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) throw ConfigError(std::string("obstacle file: expected ") + key);
        return ls;
    };
    expect("intensity") >> intensity;
    expect("window") >> w.x_lo >> w.x_hi >> w.y_lo >> w.y_hi;
    expect("seed") >> seed;
    expect("bump") >> r0 >> r1;
    expect("law") >> lo >> hi;
    expect("periodic") >> periodic;
    expect("count") >> count;
    std::vector<Obstacle> obs;
    obs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Obstacle o{0, 0, 0, i};
        if (!(is >> o.x >> o.y >> o.strength)) throw ConfigError("obstacle file: truncated");
        obs.push_back(o);
    }
    const auto law = lo == hi ? StrengthLaw::point_mass(lo) : StrengthLaw::uniform(lo, hi);
    return ObstacleField(std::move(obs), BumpProfile(r0, r1), intensity, w, seed, law, periodic != 0);
}

}  // namespace pinlab
