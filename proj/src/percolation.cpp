#include "pinlab/percolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "pinlab/error.hpp"

namespace pinlab {

void validate(const BoxLayout& layout)
{
    if (!(layout.l > 2.0 * layout.r1)) throw ConfigError("layout: l > 2 r1 violated");
    if (!(layout.d > 0.0)) throw ConfigError("layout: d > 0 violated");
    if (!(layout.h > 0.0)) throw ConfigError("layout: h > 0 violated");
    if (layout.n_boxes < 1 || layout.rows < 1) throw ConfigError("layout: empty");
}

// ---------------------------------------------------------------- growth

GrowthFunction GrowthFunction::power(double alpha, long check_limit)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("growth exponent alpha must lie in (0,1)");
    auto fn = [alpha](long k) -> long {
        if (k <= 0) return 0;
        return static_cast<long>(std::floor(std::pow(static_cast<double>(k), alpha) + 1e-9));
    };
    if (fn(0) != 0 || fn(1) < 1) throw ConfigError("growth function needs H(0)=0, H(1)>=1");
    long prev = fn(1);
    for (long k = 2; k <= check_limit; ++k) {
        const long cur = fn(k);
        if (cur < prev || cur > prev + 1)
            throw ConfigError("growth function violates H(k) <= H(k+1) <= H(k)+1 at k=" + std::to_string(k));
        prev = cur;
    }
    if (check_limit > 2 && !(static_cast<double>(prev) / std::log(static_cast<double>(check_limit)) > 0.0))
        throw ConfigError("growth function too slow");
    std::ostringstream name;
    name << "floor(k^" << alpha << ")";
    return GrowthFunction(fn, alpha, name.str());
}

GrowthFunction GrowthFunction::custom(std::function<long(long)> fn, std::string name)
{
    return GrowthFunction(std::move(fn), std::nullopt, std::move(name));
}

// ---------------------------------------------------------------- lattice

SiteLattice::SiteLattice(std::size_t n, std::size_t width, std::size_t height, double p,
                         std::uint64_t seed, bool periodic)
    : n_(n), width_(width), height_(height), p_(p), seed_(seed), periodic_(periodic)
{
    if (n < 1 || width < 1 || height < 1) throw ConfigError("lattice extents must be positive");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("open probability must lie in [0,1]");
    base_count_ = 1;
    for (std::size_t i = 0; i < n; ++i) base_count_ *= width;
    open_.assign(base_count_ * height, 0);
}

long SiteLattice::distance(std::size_t a, std::size_t b) const
{
    long acc = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        const long ca = static_cast<long>(a % width_), cb = static_cast<long>(b % width_);
        long dd = std::labs(ca - cb);
        if (periodic_) dd = std::min(dd, static_cast<long>(width_) - dd);
        acc += dd;
        a /= width_;
        b /= width_;
    }
    return acc;
}

std::size_t SiteLattice::open_count() const
{
    return static_cast<std::size_t>(std::count(open_.begin(), open_.end(), 1));
}

SiteLattice sample_lattice(std::size_t n, std::size_t width, std::size_t height, double p,
                           std::uint64_t seed, bool periodic)
{
    SiteLattice lat(n, width, height, p, seed, periodic);
    std::mt19937_64 rng(seed);
    for (std::size_t b = 0; b < lat.base_count(); ++b)
        for (std::size_t j = 1; j <= height; ++j) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            lat.set_open(b, j, u < p);
        }
    return lat;
}

// ---------------------------------------------------------------- surface

LambdaField build_lambda(const SiteLattice& lattice, const GrowthFunction& H, Schedule schedule)
{
    const std::size_t S = lattice.base_count();
    const long top = static_cast<long>(lattice.height());
    // highest reachable height at each column; reaching `top` means the window is too short
    std::vector<long> M(S, 0);
    auto climb = [&](std::size_t z, long t) {
        while (t < top && !lattice.is_open(z, static_cast<std::size_t>(t + 1))) ++t;
        return t;
    };
    std::vector<long> Hd(lattice.n() * lattice.width() + 1);
    for (std::size_t k = 0; k < Hd.size(); ++k) Hd[k] = H(static_cast<long>(k));

    LambdaField out{lattice, {}, H, LambdaStatus::Constructed, 0};
    bool overflow = false;
    for (std::size_t z = 0; z < S && !overflow; ++z) {
        M[z] = climb(z, 0);
        overflow = M[z] >= top;
    }
    std::vector<std::size_t> order(S);
    std::iota(order.begin(), order.end(), 0);
    if (schedule == Schedule::Reverse) std::reverse(order.begin(), order.end());

    bool changed = !overflow;
    while (changed && !overflow) {
        changed = false;
        ++out.sweeps;
        for (std::size_t z : order) {
            long t = 0;
            for (std::size_t w = 0; w < S; ++w)
                if (w != z) t = std::max(t, M[w] - Hd[static_cast<std::size_t>(lattice.distance(z, w))]);
            const long c = climb(z, t);
            if (c > M[z]) {
                M[z] = c;
                changed = true;
            }
            if (M[z] >= top) {
                overflow = true;
                break;
            }
        }
    }
    out.status = overflow ? LambdaStatus::Overflow : LambdaStatus::Constructed;
    out.lambda.resize(S);
    for (std::size_t z = 0; z < S; ++z) out.lambda[z] = M[z] + 1;
    return out;
}

LambdaReport verify_lambda(const LambdaField& field)
{
    LambdaReport rep;
    const auto& lat = field.lattice;
    if (field.status != LambdaStatus::Constructed) {
        rep.first_violation = "surface not constructed";
        return rep;
    }
    const std::size_t S = lat.base_count();
    for (std::size_t z = 0; z < S; ++z) {
        const long lz = field.lambda[z];
        if (lz < 1 || lz > static_cast<long>(lat.height()) || !lat.is_open(z, static_cast<std::size_t>(lz))) {
            rep.first_violation = "site (" + std::to_string(z) + ", " + std::to_string(lz) + ") not open";
            return rep;
        }
    }
    for (std::size_t a = 0; a < S; ++a)
        for (std::size_t b = a + 1; b < S; ++b) {
            ++rep.pairs_checked;
            const long dist = lat.distance(a, b);
            if (std::labs(field.lambda[a] - field.lambda[b]) > field.H(dist)) {
                rep.first_violation = "growth bound fails between " + std::to_string(a) + " and "
                                      + std::to_string(b);
                return rep;
            }
        }
    rep.passed = true;
    return rep;
}

// ---------------------------------------------------------------- counting bound

namespace {

double binom(long n, long k)
{
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (long i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

// #{x in Z^n : |x|_1 <= k}
double ball_count(std::size_t n, long k)
{
    double acc = 0.0;
    for (long i = 0; i <= static_cast<long>(n) && i <= k; ++i)
        acc += std::pow(2.0, static_cast<double>(i)) * binom(static_cast<long>(n), i) * binom(k, i);
    return acc;
}

}  // namespace

double CountingBound::path_bound(double q, long N, long h, const GrowthFunction& H) const
{
    const double r = q * beta;
    if (!(r < 1.0)) return std::numeric_limits<double>::infinity();
    return std::pow(2.0 * q, static_cast<double>(h)) * std::pow(r, static_cast<double>(H(N))) / (1.0 - r);
}

CountingBound::Series CountingBound::series(double q, const GrowthFunction& H) const
{
    const double r = q * beta;
    if (!(r < 1.0) || !(2.0 * q < 1.0)) return {std::numeric_limits<double>::infinity(), false};
    const double nd = static_cast<double>(n);
    const double kt = std::max(K_tilde, 1.0);
    auto weight = [&](long N) {
        return N == 0 ? 1.0 : std::max(K_tilde * std::pow(static_cast<double>(N), nd - 1.0), 1.0);
    };
    // exact partial sum over N with H(N) <= J, grouped tail beyond
    const long J = static_cast<long>(R.size()) - 1;
    double acc = 0.0;
    for (long N = 0; N <= R[static_cast<std::size_t>(J)]; ++N)
        acc += weight(N) * std::pow(r, static_cast<double>(H(N)));
    // group j holds at most (j+1)^{1/alpha} values of N, each weighted at most
    // kt (j+1)^{(n-1)/alpha}: majorant m_j = kt (j+1)^{n/alpha} r^j
    const double e = nd / alpha;
    long j = J + 1;
    double ratio = std::pow(static_cast<double>(j + 2) / static_cast<double>(j + 1), e) * r;
    while (ratio > 0.5 * (1.0 + r)) {
        if (j > 100000000) return {std::numeric_limits<double>::infinity(), false};
        j *= 2;
        ratio = std::pow(static_cast<double>(j + 2) / static_cast<double>(j + 1), e) * r;
    }
    // terms between J+1 and j: dyadic blocks, each bounded by length * max term
    for (long i0 = J + 1; i0 < j; i0 *= 2) {
        const long i1 = std::min(2 * i0, j);
        acc += kt * static_cast<double>(i1 - i0) * std::pow(static_cast<double>(i1 + 1), e)
               * std::pow(r, static_cast<double>(i0));
    }
    acc += kt * std::pow(static_cast<double>(j + 1), e) * std::pow(r, static_cast<double>(j)) / (1.0 - ratio);
    return {acc, std::isfinite(acc)};
}

CountingBound counting_bound(const GrowthFunction& H, std::size_t n, long j_max)
{
    if (!H.alpha()) throw ConfigError("counting bound needs a power growth function");
    if (n < 1 || j_max < 2) throw ConfigError("counting bound: invalid n or j_max");
    const double alpha = *H.alpha();
    CountingBound cb{};
    cb.n = n;
    cb.alpha = alpha;
    cb.R.assign(static_cast<std::size_t>(j_max) + 1, 0);
    for (long j = 1; j <= j_max; ++j) {
        long r = static_cast<long>(std::ceil(std::pow(static_cast<double>(j + 1), 1.0 / alpha))) - 1;
        while (H(r + 1) <= j) ++r;
        while (r > 0 && H(r) > j) --r;
        if (H(r) != j) throw ConfigError("growth function skips the value " + std::to_string(j));
        cb.R[static_cast<std::size_t>(j)] = r;
    }

    double K = 0.0, Kt = 0.0;
    for (long k = 1; k <= 1000; ++k) {
        const double kd = static_cast<double>(k);
        K = std::max(K, ball_count(n, k) / std::pow(kd, static_cast<double>(n)));
        Kt = std::max(Kt, (ball_count(n, k) - ball_count(n, k - 1)) / std::pow(kd, static_cast<double>(n) - 1.0));
    }
    cb.K = K;
    cb.K_tilde = Kt;

    const double nd = static_cast<double>(n);
    const double gamma_min = 1.0 / (alpha * static_cast<double>(j_max + 1));
    bool found = false;
    cb.beta = std::numeric_limits<double>::infinity();
    for (int g = 1; g <= 1000; ++g) {
        const double gamma = 0.005 * g;
        if (gamma <= gamma_min) continue;
        // beyond j_max, R(j) <= (j+1)^{1/alpha} whose product with e^{-gamma j} decreases
        double C = std::pow(static_cast<double>(j_max + 2), 1.0 / alpha) * std::exp(-gamma * static_cast<double>(j_max + 1));
        for (long j = 1; j <= j_max; ++j)
            C = std::max(C, static_cast<double>(cb.R[static_cast<std::size_t>(j)]) * std::exp(-gamma * static_cast<double>(j)));
        const double beta = 16.0 * std::exp(gamma * nd) * std::max(2.0 * K * std::pow(C, nd), 1.0);
        if (beta < cb.beta) {
            cb.beta = beta;
            cb.gamma = gamma;
            cb.C = C;
            found = true;
        }
    }
    if (!found) throw ConfigError("no admissible (C, gamma) within j_max");

    double lo = 0.0, hi = std::min(1.0 / cb.beta, 0.5);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const auto s = cb.series(mid, H);
        if (mid * cb.beta < 1.0 && 2.0 * mid < 1.0 && s.certified) lo = mid;
        else hi = mid;
    }
    cb.q_max = lo;
    return cb;
}

// ---------------------------------------------------------------- embedding

EmbeddedLattice embed_obstacle_lattice(const ObstacleField& field, const BoxLayout& layout, double q)
{
    validate(layout);
    if (!(q > 0.0)) throw ConfigError("embedding threshold q must be positive");
    const Window& w = field.window();
    const Interval first = layout.inner_box(0), last = layout.inner_box(layout.n_boxes - 1);
    const double top = layout.row(layout.rows).hi;
    if (first.lo < w.x_lo || last.hi > w.x_hi || layout.y0 < w.y_lo || top > w.y_hi)
        throw ConfigError("box layout extends outside the obstacle window");
    const bool wrap = field.periodic_x() && std::fabs(layout.period() - w.width()) <= 1e-9 * w.width();

    const double p = 1.0 - std::exp(-field.intensity() * layout.cell_area() * field.strength_law().tail(q));
    EmbeddedLattice out{SiteLattice(1, layout.n_boxes, layout.rows, p, field.seed(), wrap), {}};
    out.obstacle.assign(layout.n_boxes * layout.rows, std::nullopt);
    const auto& obs = field.obstacles();
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const Obstacle& o = obs[i];
        if (o.strength < q || o.y < layout.y0) continue;
        const double rel = o.x - layout.span().lo;
        if (rel < 0.0) continue;
        const auto k = static_cast<std::size_t>(rel / layout.pitch());
        if (k >= layout.n_boxes) continue;
        const Interval ib = layout.inner_box(k);
        if (!(o.x >= ib.lo && o.x < ib.hi)) continue;
        const auto j = static_cast<std::size_t>((o.y - layout.y0) / layout.h) + 1;
        if (j > layout.rows) continue;
        auto& slot = out.obstacle[k * layout.rows + (j - 1)];
        if (!slot || std::pair(o.x, o.y) < std::pair(obs[*slot].x, obs[*slot].y)) slot = i;
    }
    for (std::size_t k = 0; k < layout.n_boxes; ++k)
        for (std::size_t j = 1; j <= layout.rows; ++j)
            out.lattice.set_open(k, j, out.at(k, j).has_value());
    return out;
}

// ---------------------------------------------------------------- io

void write_lattice_csv(std::ostream& os, const SiteLattice& lattice)
{
    os << "# pinlab-lattice v1 n=" << lattice.n() << " width=" << lattice.width()
       << " height=" << lattice.height() << " p=" << lattice.p() << " seed=" << lattice.seed() << '\n';
    os << "k,j,open\n";
    for (std::size_t b = 0; b < lattice.base_count(); ++b)
        for (std::size_t j = 1; j <= lattice.height(); ++j)
            os << b << ',' << j << ',' << (lattice.is_open(b, j) ? 1 : 0) << '\n';
}

void write_lambda_csv(std::ostream& os, const LambdaField& field)
{
    os << "# pinlab-lambda v1 H=" << field.H.name() << " status="
       << (field.status == LambdaStatus::Constructed ? "constructed" : "overflow") << '\n';
    os << "k,lambda\n";
    for (std::size_t b = 0; b < field.lambda.size(); ++b) os << b << ',' << field.lambda[b] << '\n';
}

}  // namespace pinlab
