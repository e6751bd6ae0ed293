#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pinlab/box_layout.hpp"
#include "pinlab/random_media.hpp"

namespace pinlab {

class GrowthFunction {
public:
    // k -> floor(k^alpha); properties checked for k <= check_limit
    static GrowthFunction power(double alpha, long check_limit = 1000000);
    // arbitrary table-free H, not validated (for exercising the verifier)
    static GrowthFunction custom(std::function<long(long)> fn, std::string name);

    long operator()(long k) const { return fn_(k); }
    std::optional<double> alpha() const { return alpha_; }
    const std::string& name() const { return name_; }

private:
    GrowthFunction(std::function<long(long)> fn, std::optional<double> alpha, std::string name)
        : fn_(std::move(fn)), alpha_(alpha), name_(std::move(name)) {}
    std::function<long(long)> fn_;
    std::optional<double> alpha_;
    std::string name_;
};

// Sites (x, j) with x in {0..width-1}^n and j in {1..height}; row 0 is the
// starting row and carries no state.
class SiteLattice {
public:
    SiteLattice(std::size_t n, std::size_t width, std::size_t height, double p, std::uint64_t seed,
                bool periodic = false);

    std::size_t n() const { return n_; }
    std::size_t width() const { return width_; }
    std::size_t height() const { return height_; }
    double p() const { return p_; }
    std::uint64_t seed() const { return seed_; }
    bool periodic() const { return periodic_; }
    std::size_t base_count() const { return base_count_; }

    bool is_open(std::size_t base, std::size_t j) const { return open_[base * height_ + (j - 1)] != 0; }
    void set_open(std::size_t base, std::size_t j, bool open) { open_[base * height_ + (j - 1)] = open ? 1 : 0; }
    // l1 distance between base sites, cyclic per axis when periodic
    long distance(std::size_t a, std::size_t b) const;
    std::size_t open_count() const;

private:
    std::size_t n_, width_, height_;
    double p_;
    std::uint64_t seed_;
    bool periodic_;
    std::size_t base_count_;
    std::vector<unsigned char> open_;
};

SiteLattice sample_lattice(std::size_t n, std::size_t width, std::size_t height, double p,
                           std::uint64_t seed, bool periodic = false);

enum class LambdaStatus { Constructed, Overflow };
enum class Schedule { Forward, Reverse };

struct LambdaField {
    SiteLattice lattice;
    std::vector<long> lambda;  // per base site
    GrowthFunction H;
    LambdaStatus status;
    std::size_t sweeps = 0;
};

LambdaField build_lambda(const SiteLattice& lattice, const GrowthFunction& H,
                         Schedule schedule = Schedule::Forward);

struct LambdaReport {
    bool passed = false;
    std::size_t pairs_checked = 0;
    std::string first_violation;
};

LambdaReport verify_lambda(const LambdaField& field);

struct CountingBound {
    std::size_t n;
    double alpha;
    double gamma;
    double C;
    double K;
    double K_tilde;
    double beta;
    double q_max;
    std::vector<long> R;  // R[j] for j = 0..j_max (R[0] unused)

    // expected admissible paths from (x,0), |x| = N, to (0,h)
    double path_bound(double q, long N, long h, const GrowthFunction& H) const;

    struct Series {
        double value;
        bool certified;
    };
    // sum_N ((K~ N^{n-1}) v 1) (q beta)^{H(N)} with a certified tail
    Series series(double q, const GrowthFunction& H) const;
};

CountingBound counting_bound(const GrowthFunction& H, std::size_t n, long j_max = 60);

struct EmbeddedLattice {
    SiteLattice lattice;
    // obstacle index (into field.obstacles()) per site, base * height + (j-1)
    std::vector<std::optional<std::size_t>> obstacle;
    const std::optional<std::size_t>& at(std::size_t k, std::size_t j) const {
        return obstacle[k * lattice.height() + (j - 1)];
    }
};

EmbeddedLattice embed_obstacle_lattice(const ObstacleField& field, const BoxLayout& layout, double q);

void write_lattice_csv(std::ostream& os, const SiteLattice& lattice);
void write_lambda_csv(std::ostream& os, const LambdaField& field);

}  // namespace pinlab
