#include "pinlab/dispatch.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pinlab/error.hpp"
#include "pinlab/evolution.hpp"
#include "pinlab/percolation.hpp"
#include "pinlab/periodic_cell.hpp"
#include "pinlab/special.hpp"
#include "pinlab/supersolution.hpp"

namespace pinlab {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Results are gathered by index so the output does not depend on threads.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

class Outputs {
public:
    explicit Outputs(const RunConfig& cfg) : cfg_(cfg), dir_(cfg.output_dir()) { fs::create_directories(dir_); }

    std::ofstream open(const std::string& name)
    {
        names_.push_back(name);
        std::ofstream os(dir_ / name);
        if (!os) throw ConfigError("key 'output_dir': cannot write " + (dir_ / name).string());
        return os;
    }
    std::string record_name(const std::string& stem) const
    {
        return stem + (cfg_.format() == Format::jsonl ? ".jsonl" : ".csv");
    }
    void finish() const
    {
        std::ofstream os(dir_ / "manifest.txt");
        os << emit_manifest(cfg_, names_);
    }

private:
    const RunConfig& cfg_;
    fs::path dir_;
    std::vector<std::string> names_;
};

// One table written either as CSV (versioned header + column names) or as JSON lines.
class RecordWriter {
public:
    RecordWriter(std::ostream& os, Format fmt, const std::string& kind, std::vector<std::string> columns)
        : os_(os), fmt_(fmt), cols_(std::move(columns))
    {
        if (fmt_ == Format::csv) {
            os_ << "# pinlab-" << kind << " v1\n";
            for (std::size_t i = 0; i < cols_.size(); ++i) os_ << (i ? "," : "") << cols_[i];
            os_ << '\n';
        }
    }
    void row(const json& values)
    {
        if (fmt_ == Format::jsonl) {
            json obj = json::object();
            for (std::size_t i = 0; i < cols_.size(); ++i) obj[cols_[i]] = values[i];
            os_ << obj.dump() << '\n';
            return;
        }
        for (std::size_t i = 0; i < cols_.size(); ++i) {
            if (i) os_ << ',';
            const auto& v = values[i];
            if (v.is_string()) os_ << v.get<std::string>();
            else if (v.is_number_float()) os_ << std::setprecision(17) << v.get<double>();
            else os_ << v.dump();
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
    Format fmt_;
    std::vector<std::string> cols_;
};

ScalingInputs scaling_inputs(const RunConfig& cfg)
{
    ScalingInputs in;
    in.s = cfg.real("s");
    in.r0 = cfg.real("r0");
    in.r1 = cfg.real("r1");
    in.q = cfg.real("q");
    in.V = cfg.real("V");
    in.F2 = cfg.real("F2");
    in.C_a = cfg.real("C_a");
    in.C_delta = cfg.real("C_delta");
    in.alpha = cfg.real("alpha");
    in.a_factor = cfg.real("a_factor");
    return in;
}

ObstacleField obtain_field(const RunConfig& cfg, const ScalingParams& p, std::uint64_t seed)
{
    const std::string& path = cfg.text("obstacles_file");
    if (!path.empty()) {
        std::ifstream is(path);
        if (!is) throw ConfigError("key 'obstacles_file': cannot open " + path);
        return read_obstacles(is);
    }
    return sample_certificate_field(p, static_cast<std::size_t>(cfg.integer("boxes")),
                                    static_cast<std::size_t>(cfg.integer("rows")), cfg.real("closed_fraction"), seed)
        .field;
}

VerifyOptions verify_options(const RunConfig& cfg)
{
    VerifyOptions opt;
    opt.grid_points = static_cast<std::size_t>(cfg.integer("grid_points"));
    return opt;
}

// ---------------------------------------------------------------- subcommands

int run_percolate(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const auto H = GrowthFunction::power(cfg.real("alpha"));
    const auto n = static_cast<std::size_t>(cfg.integer("perc_n"));
    const auto width = static_cast<std::size_t>(cfg.integer("perc_width"));
    const auto height = static_cast<std::size_t>(cfg.integer("perc_height"));
    const auto steps = static_cast<std::size_t>(cfg.integer("p_steps"));
    const auto reps = static_cast<std::size_t>(cfg.integer("realizations"));
    const bool periodic = cfg.boolean("periodic");
    const double p_lo = cfg.real("p_min"), p_hi = cfg.real("p_max");
    if (p_hi < p_lo) throw ConfigError("key 'p_max': must be >= p_min");

    struct Outcome {
        bool constructed = false, verified = false;
        long lambda_max = 0;
    };
    std::vector<double> ps(steps);
    for (std::size_t k = 0; k < steps; ++k)
        ps[k] = steps == 1 ? p_lo : p_lo + (p_hi - p_lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    std::vector<Outcome> res(steps * reps);
    parallel_for(res.size(), cfg.threads(), [&](std::size_t idx) {
        const auto lat = sample_lattice(n, width, height, ps[idx / reps], mix_seed(cfg.seed(), idx), periodic);
        const auto lam = build_lambda(lat, H);
        Outcome& o = res[idx];
        o.constructed = lam.status == LambdaStatus::Constructed;
        if (o.constructed) {
            o.verified = verify_lambda(lam).passed;
            o.lambda_max = *std::max_element(lam.lambda.begin(), lam.lambda.end());
        }
    });

    auto os = out.open(out.record_name("percolate"));
    RecordWriter w(os, cfg.format(), "percolate",
                   {"p", "realizations", "constructed", "overflow", "verified", "max_lambda"});
    std::size_t overflow_total = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        std::size_t c = 0, v = 0;
        long lmax = 0;
        for (std::size_t r = 0; r < reps; ++r) {
            const auto& o = res[k * reps + r];
            c += o.constructed;
            v += o.verified;
            lmax = std::max(lmax, o.lambda_max);
        }
        overflow_total += reps - c;
        w.row({ps[k], reps, c, reps - c, v, lmax});
        log << "p = " << ps[k] << ": " << c << "/" << reps << " constructed, " << v << " verified\n";
    }
    if (cfg.boolean("dump_lattice")) {
        const auto lat = sample_lattice(n, width, height, ps[0], mix_seed(cfg.seed(), 0), periodic);
        auto lo = out.open("lattice.csv");
        write_lattice_csv(lo, lat);
        auto la = out.open("lambda.csv");
        write_lambda_csv(la, build_lambda(lat, H));
    }
    const auto cb = counting_bound(H, n);
    auto bs = out.open("counting_bound.txt");
    bs << std::setprecision(17) << "# pinlab-counting-bound v1\n"
       << "n = " << cb.n << "\nalpha = " << cb.alpha << "\ngamma = " << cb.gamma << "\nC = " << cb.C
       << "\nK = " << cb.K << "\nK_tilde = " << cb.K_tilde << "\nbeta = " << cb.beta << "\nq_max = " << cb.q_max
       << "\np_sufficient = " << 1.0 - cb.q_max << '\n';
    const double frac = static_cast<double>(overflow_total) / static_cast<double>(res.size());
    log << "overflow fraction " << frac << '\n';
    return frac > 0.5 ? exit_code::failure : exit_code::success;
}

int run_cell(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const CellParams cp = cfg.real("cell_a") > 0.0
                              ? make_cell_params(cfg.real("cell_a"), cfg.real("cell_b"), cfg.real("cell_delta"),
                                                 cfg.real("F2"), cfg.real("s"))
                              : cell_params(choose_params(scaling_inputs(cfg)));
    const auto profile = build_v_profile(cp, static_cast<std::size_t>(cfg.integer("n_modes")));
    const auto pts = static_cast<std::size_t>(cfg.integer("profile_points"));
    {
        auto os = out.open("cell_profile.csv");
        write_profile_csv(os, profile, pts);
    }
    const auto mono = check_monotone(profile, pts);
    const auto res = cell_residual(profile, pts, true);
    auto os = out.open("cell_summary.txt");
    os << std::setprecision(17) << "# pinlab-cell v1\n"
       << "a = " << cp.a << "\nb = " << cp.b << "\ndelta = " << cp.delta << "\nF2 = " << cp.F2 << "\nF1 = " << cp.F1
       << "\nrho = " << cp.rho << "\ns = " << cp.s.value() << "\nn_modes = " << profile.n_modes()
       << "\ntail_bound = " << profile.tail_bound() << "\nlinf_bound = " << linf_bound(cp)
       << "\nmin_slope_v_tilde = " << mono.min_slope_v_tilde << "\nmin_slope_v = " << mono.min_slope_v
       << "\nmonotone = " << (mono.passed ? "true" : "false") << "\nmollified_residual = " << res.max_error
       << "\nmollified_residual_tolerance = " << res.tolerance << '\n';
    log << "cell a = " << cp.a << ", monotone " << (mono.passed ? "yes" : "no") << '\n';
    return mono.passed ? exit_code::success : exit_code::failure;
}

int run_build(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const auto p = choose_params(scaling_inputs(cfg));
    const auto field = obtain_field(cfg, p, cfg.seed());
    {
        auto os = out.open("obstacles.txt");
        write_obstacles(os, field);
    }
    const auto bundle = compose_and_verify(p, field, cfg.seed(), verify_options(cfg));
    {
        auto os = out.open("bundle.csv");
        write_bundle_csv(os, bundle, static_cast<std::size_t>(cfg.integer("csv_stride")));
    }
    auto os = out.open("bundle_summary.txt");
    write_bundle_summary(os, bundle);
    const auto& r = bundle.verification;
    log << "F* = " << bundle.F_star << ", max residual " << r.max_residual << " (tolerance " << r.tolerance << ")\n";
    if (!r.passed) log << "certification failed at x = " << r.worst_x << '\n';
    return r.passed ? exit_code::success : exit_code::failure;
}

int run_verify(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const auto st = operator_self_test(cfg.seed(), static_cast<std::size_t>(cfg.integer("self_test_polys")),
                                       static_cast<std::size_t>(cfg.integer("self_test_points")));
    const auto p = choose_params(scaling_inputs(cfg));
    const auto field = obtain_field(cfg, p, cfg.seed());
    const auto bundle = compose_and_verify(p, field, cfg.seed(), verify_options(cfg));
    auto os = out.open("verify_summary.txt");
    os << std::setprecision(17) << "# pinlab-verify v1\n"
       << "operator_max_rel_error = " << st.max_rel_error << "\noperator_tolerance = " << st.tolerance
       << "\noperator_passed = " << (st.passed ? "true" : "false") << '\n';
    write_bundle_summary(os, bundle);
    const bool ok = st.passed && bundle.verification.passed;
    log << "operator self-test " << (st.passed ? "pass" : "FAIL") << ", certificate "
        << (bundle.verification.passed ? "pass" : "FAIL") << '\n';
    return ok ? exit_code::success : exit_code::failure;
}

EvolutionConfig evolution_config(const RunConfig& cfg, const ScalingParams& p, const ObstacleField& field)
{
    const PeriodicGrid grid(field.window().width(), static_cast<std::size_t>(cfg.integer("sim_points")),
                            field.window().x_lo);
    auto ec = make_evolution_config(grid, model_order(cfg.real("s")), 0.0, field, cfg.real("t_max"));
    const std::string& f = cfg.text("force");
    if (f == "fstar") ec.F = p.F_star;
    else if (f == "escape") ec.F = 10.0 * field.force_upper_bound();
    else ec.F = std::stod(f);
    if (cfg.real("dt") > 0.0) ec.dt = cfg.real("dt");
    if (cfg.real("pin_tol") > 0.0) ec.pin_tol = cfg.real("pin_tol");
    ec.pin_window = static_cast<std::size_t>(cfg.integer("pin_window"));
    ec.snapshot_every = static_cast<std::size_t>(cfg.integer("snapshot_every"));
    return ec;
}

int run_evolve(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const auto p = choose_params(scaling_inputs(cfg));
    const auto field = obtain_field(cfg, p, cfg.seed());
    const auto ec = evolution_config(cfg, p, field);
    const auto stride = static_cast<std::size_t>(cfg.integer("snapshot_stride"));
    auto traj = out.open("trajectory.csv");
    write_trajectory_header(traj);
    const auto v = run(ec, field, [&](double t, const GridFunction& u) { write_snapshot_csv(traj, t, u, stride); });
    auto os = out.open("verdict.txt");
    write_verdict(os, v, ec);
    log << "F = " << ec.F << ": " << to_string(v.outcome) << " at t = " << v.t_final << '\n';
    return exit_code::success;
}

int run_scan(const RunConfig& cfg, Outputs& out, std::ostream& log)
{
    const auto p = choose_params(scaling_inputs(cfg));
    const auto n_fields = static_cast<std::size_t>(cfg.integer("scan_fields"));
    if (!cfg.text("obstacles_file").empty() && n_fields != 1)
        throw ConfigError("key 'scan_fields': must be 1 when obstacles_file is given");
    const double F_lo = cfg.real("F_lo"), F_hi = cfg.real("F_hi");
    if (!(F_hi > F_lo)) throw BracketError("key 'F_hi': must exceed F_lo");
    std::vector<ThresholdScan> scans(n_fields);
    parallel_for(n_fields, cfg.threads(), [&](std::size_t i) {
        const auto field = obtain_field(cfg, p, mix_seed(cfg.seed(), i));
        const auto ec = evolution_config(cfg, p, field);
        scans[i] = threshold_scan(field, ec, F_lo, F_hi, static_cast<std::size_t>(cfg.integer("n_bisect")));
    });
    {
        auto os = out.open(out.record_name("scan_records"));
        RecordWriter w(os, cfg.format(), "scan-records", {"field", "F", "outcome", "t_final"});
        for (std::size_t i = 0; i < n_fields; ++i)
            for (const auto& r : scans[i].records) w.row({i, r.F, std::string(to_string(r.outcome)), r.t_final});
    }
    auto os = out.open(out.record_name("scan"));
    RecordWriter w(os, cfg.format(), "scan", {"field", "F_c_lo", "F_c_hi", "F_star"});
    for (std::size_t i = 0; i < n_fields; ++i) {
        w.row({i, scans[i].F_lo, scans[i].F_hi, p.F_star});
        log << "field " << i << ": F_c in [" << scans[i].F_lo << ", " << scans[i].F_hi << "], F* = " << p.F_star
            << '\n';
    }
    return exit_code::success;
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& log)
{
    try {
        Outputs out(cfg);
        int code = exit_code::success;
        switch (cfg.subcommand) {
        case Subcommand::percolate: code = run_percolate(cfg, out, log); break;
        case Subcommand::cell: code = run_cell(cfg, out, log); break;
        case Subcommand::build: code = run_build(cfg, out, log); break;
        case Subcommand::verify: code = run_verify(cfg, out, log); break;
        case Subcommand::evolve: code = run_evolve(cfg, out, log); break;
        case Subcommand::scan: code = run_scan(cfg, out, log); break;
        }
        out.finish();
        return code;
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return exit_code::config;
    } catch (const OverflowError& e) {
        log << "overflow: " << e.what() << '\n';
        return exit_code::failure;
    } catch (const ConsistencyError& e) {
        log << "consistency failure: " << e.what() << '\n';
        return exit_code::failure;
    } catch (const NumericError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return exit_code::failure;
    } catch (const fs::filesystem_error& e) {
        log << "configuration error: key 'output_dir': " << e.what() << '\n';
        return exit_code::config;
    }
}

}  // namespace pinlab
