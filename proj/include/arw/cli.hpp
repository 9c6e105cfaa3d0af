#ifndef ARW_CLI_HPP
#define ARW_CLI_HPP

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "arw/config.hpp"
#include "arw/csv.hpp"
#include "arw/estimators.hpp"
#include "arw/greens.hpp"
#include "arw/region.hpp"
#include "arw/stabilize.hpp"
#include "arw/verify.hpp"

namespace arw {
namespace cli {

struct ExperimentConfig {
    std::string family = "lattice";
    int d = 2;
    int L = 4;
    std::vector<int> L_list;
    double lambda = 1.0;
    double mu = -1.0;
    std::vector<double> mu_grid;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
    std::uint64_t budget = kDefaultBudget;
    double threshold = 0.01;
    bool quick = false;
};

inline Family parse_family(const std::string& s) {
    if (s == "lattice") return Family::LatticeZd;
    if (s == "tree") return Family::RegularTree;
    throw CLI::ValidationError("--family", "must be 'lattice' or 'tree'");
}

inline int default_threads() {
    if (const char* env = std::getenv("ARW_LAB_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

// Defaults from an optional JSON config file; command-line flags override.
inline void apply_json_config(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    nlohmann::json j;
    in >> j;
    if (j.contains("family")) cfg.family = j["family"].get<std::string>();
    if (j.contains("d")) cfg.d = j["d"].get<int>();
    if (j.contains("L")) cfg.L = j["L"].get<int>();
    if (j.contains("L_list")) cfg.L_list = j["L_list"].get<std::vector<int>>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
    if (j.contains("mu")) cfg.mu = j["mu"].get<double>();
    if (j.contains("mu_grid")) cfg.mu_grid = j["mu_grid"].get<std::vector<double>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::int64_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("budget")) cfg.budget = j["budget"].get<std::uint64_t>();
    if (j.contains("threshold")) cfg.threshold = j["threshold"].get<double>();
}

// The resolved configuration echoed into output headers. Threads and output
// path are execution details and deliberately omitted so that files are
// byte-identical across thread counts.
inline std::string resolved_comment(const std::string& sub, const ExperimentConfig& c) {
    std::ostringstream os;
    os << "command=" << sub << " family=" << c.family << " d=" << c.d;
    if (!c.L_list.empty()) {
        os << " L_list=";
        for (std::size_t i = 0; i < c.L_list.size(); ++i)
            os << (i ? "," : "") << c.L_list[i];
    } else {
        os << " L=" << c.L;
    }
    os << " lambda=" << csv::format(c.lambda);
    if (!c.mu_grid.empty()) {
        os << " mu_grid=";
        for (std::size_t i = 0; i < c.mu_grid.size(); ++i)
            os << (i ? "," : "") << csv::format(c.mu_grid[i]);
    } else if (c.mu >= 0.0) {
        os << " mu=" << csv::format(c.mu);
    }
    os << " trials=" << c.trials << " seed=" << c.seed << " budget=" << c.budget
       << " threshold=" << csv::format(c.threshold);
    return os.str();
}

inline void run_stabilize(const ExperimentConfig& c, std::ostream& out) {
    const FiniteRegion region = make_ball(parse_family(c.family), c.d, c.L);
    const double mu = c.mu < 0.0 ? 0.0 : c.mu;
    const Config initial = sample_poisson_config(region, mu, trial_config_seed(c.seed, 0));
    const InstructionTape tape(trial_tape_seed(c.seed, 0), c.lambda, region.degree);
    const OdometerReport rep = stabilize(region, initial, tape, {.budget = c.budget});

    csv::Writer w(out);
    w.comment(resolved_comment("stabilize", c));
    w.comment("absorbed=" + std::to_string(rep.absorbed));
    w.cells("vertex", "distance", "state", "m", "M");
    for (Vertex v = 0; v < region.n_vertices(); ++v) {
        const std::size_t i = static_cast<std::size_t>(v);
        w.cells(static_cast<int>(v), region.distance(v), static_cast<int>(rep.final[i]),
                rep.m[i], rep.M[i]);
    }
}

inline void run_sweep(const ExperimentConfig& c, std::ostream& out) {
    const Family fam = parse_family(c.family);
    std::vector<int> Ls = c.L_list.empty() ? std::vector<int>{c.L} : c.L_list;
    std::vector<double> mus = c.mu_grid;
    if (mus.empty() && c.mu >= 0.0) mus.push_back(c.mu);
    if (mus.empty()) throw CLI::ValidationError("sweep", "needs --mu or --mu-grid");
    if (c.trials < 1) throw CLI::ValidationError("sweep", "--trials must be >= 1");

    csv::Writer w(out);
    w.comment(resolved_comment("sweep", c));
    w.cells("family", "d", "L", "lambda", "mu", "estimand", "mean", "stderr", "trials", "seed");
    for (int L : Ls) {
        const FiniteRegion region = make_ball(fam, c.d, L);
        const double volume = static_cast<double>(region.n_vertices());
        for (double mu : mus) {
            struct Row {
                double q, jumps, instructions, visited, leaving, sleeping;
            };
            const std::function<Row(std::int64_t)> one = [&](std::int64_t t) {
                const Config cfg =
                    sample_poisson_config(region, mu, trial_config_seed(c.seed, t));
                const InstructionTape tape(trial_tape_seed(c.seed, t), c.lambda,
                                           region.degree);
                const OdometerReport rep =
                    stabilize(region, cfg, tape, {.budget = c.budget});
                double sleeping = 0.0;
                for (std::int32_t s : rep.final)
                    if (s == kSleeping) sleeping += 1.0;
                return Row{rep.final[0] == kSleeping ? 1.0 : 0.0,
                           static_cast<double>(rep.M[0]),
                           static_cast<double>(rep.m[0]),
                           rep.m[0] >= 1 ? 1.0 : 0.0,
                           static_cast<double>(rep.absorbed) / volume,
                           sleeping / volume};
            };
            const auto rows = run_trials<Row>(c.trials, c.threads, one);
            const auto emit = [&](const std::string& estimand, double Row::* field) {
                std::vector<double> xs(rows.size());
                for (std::size_t i = 0; i < rows.size(); ++i) xs[i] = rows[i].*field;
                const EstimateRecord r = summarize(estimand, xs, c.seed);
                w.cells(c.family, c.d, L, c.lambda, mu, estimand, r.mean, r.stderr_,
                        r.trials, r.master_seed);
            };
            emit("Q", &Row::q);
            emit("jump_odometer_origin", &Row::jumps);
            emit("odometer_origin", &Row::instructions);
            emit("visit_probability_origin", &Row::visited);
            emit("leaving_density", &Row::leaving);
            emit("sleeping_density", &Row::sleeping);
        }
    }
}

inline void run_greens(const ExperimentConfig& c, std::ostream& out) {
    const FiniteRegion region = make_ball(parse_family(c.family), c.d, c.L);
    GreenTable table(region);
    csv::Writer w(out);
    w.comment(resolved_comment("greens", c));
    w.cells("x_index", "y_index", "value");
    for (Vertex y = 0; y < region.n_vertices(); ++y) {
        const auto& col = table.column(y);
        for (Vertex x = 0; x < region.n_vertices(); ++x)
            w.cells(static_cast<int>(x), static_cast<int>(y),
                    col[static_cast<std::size_t>(x)]);
    }
}

inline void run_phase(const ExperimentConfig& c, std::ostream& out) {
    if (!(c.threshold > 0.0 && c.threshold < 1.0))
        throw CLI::ValidationError("phase", "--threshold must lie in (0,1)");
    if (c.trials < 1) throw CLI::ValidationError("phase", "--trials must be >= 1");
    const MuBracket bracket =
        mu_c_bracket(parse_family(c.family), c.d, c.lambda, c.L, c.trials, c.threshold,
                     c.seed, {.threads = c.threads, .budget = c.budget});
    csv::Writer w(out);
    w.comment(resolved_comment("phase", c));
    w.comment("finite-size heuristic bracket, not the infinite-volume critical density");
    w.cells("family", "d", "L", "lambda", "trials", "threshold", "seed", "mu_lo", "mu_hi",
            "degenerate", "warning");
    w.cells(c.family, c.d, c.L, c.lambda, c.trials, c.threshold, c.seed, bracket.mu_lo,
            bracket.mu_hi, bracket.degenerate ? 1 : 0, bracket.warning);
}

// Output determinism across worker counts: the same sweep rendered with one
// thread and with eight must agree byte for byte.
inline verify::CheckResult check_output_determinism(std::uint64_t seed, bool quick) {
    ExperimentConfig c;
    c.family = "lattice";
    c.d = 2;
    c.L_list = {2, 3};
    c.lambda = 1.0;
    c.mu_grid = {0.3, 0.6};
    c.trials = quick ? 200 : 2000;
    c.seed = seed;

    std::ostringstream one, eight;
    c.threads = 1;
    run_sweep(c, one);
    c.threads = 8;
    run_sweep(c, eight);
    if (one.str() != eight.str())
        return {"output determinism", false, "sweep output differs between 1 and 8 threads"};
    return {"output determinism", true, "byte-identical across thread counts"};
}

inline int run_verify(const ExperimentConfig& c, std::ostream& out) {
    std::vector<verify::CheckResult> results = verify::run_all(c.quick, c.seed, c.threads);
    results.push_back(check_output_determinism(c.seed, c.quick));
    bool all_passed = true;
    for (const auto& r : results) {
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_passed = all_passed && r.passed;
    }
    return all_passed ? 0 : 2;
}

inline int run(const std::vector<std::string>& args) {
    CLI::App app{"activated random walk simulation and verification laboratory"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    cfg.threads = default_threads();

    // JSON config file provides defaults; flags given on the command line win.
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config") apply_json_config(cfg, args[i + 1]);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", "JSON config file with defaults for these flags")
            ->expected(1);
        sub->add_option("--family", cfg.family, "graph family: lattice | tree");
        sub->add_option("--d", cfg.d, "dimension (lattice) or degree (tree)");
        sub->add_option("--L", cfg.L, "ball radius");
        sub->add_option("--L-list", cfg.L_list, "list of ball radii")->delimiter(',');
        sub->add_option("--lambda", cfg.lambda, "sleep rate");
        sub->add_option("--mu", cfg.mu, "particle density");
        sub->add_option("--mu-grid", cfg.mu_grid, "list of particle densities")
            ->delimiter(',');
        sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
        sub->add_option("--seed", cfg.seed, "master seed");
        sub->add_option("--threads", cfg.threads, "worker threads (env ARW_LAB_THREADS)");
        sub->add_option("--out", cfg.out, "output file (default: stdout)");
        sub->add_option("--budget", cfg.budget, "instruction budget per stabilization");
        sub->add_option("--threshold", cfg.threshold, "leaving-density threshold (phase)");
    };

    CLI::App* stab = app.add_subcommand("stabilize", "run one stabilization, write config and odometers");
    CLI::App* ver = app.add_subcommand("verify", "run the property and bound-check suite");
    CLI::App* sweep = app.add_subcommand("sweep", "estimate observables over a parameter grid");
    CLI::App* greens = app.add_subcommand("greens", "emit the exact Green's table");
    CLI::App* phase = app.add_subcommand("phase", "bracket the activity threshold in density");
    for (CLI::App* sub : {stab, ver, sweep, greens, phase}) add_common(sub);
    ver->add_flag("--quick", cfg.quick, "reduced instance and trial counts");

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::ofstream file;
        std::ostream* out = &std::cout;
        if (!cfg.out.empty()) {
            file.open(cfg.out);
            if (!file) {
                std::cerr << "error: cannot open output file " << cfg.out << "\n";
                return 1;
            }
            out = &file;
        }
        if (stab->parsed()) {
            run_stabilize(cfg, *out);
        } else if (ver->parsed()) {
            return run_verify(cfg, *out);
        } else if (sweep->parsed()) {
            run_sweep(cfg, *out);
        } else if (greens->parsed()) {
            run_greens(cfg, *out);
        } else {
            run_phase(cfg, *out);
        }
        return 0;
    } catch (const BudgetExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

inline int run(int argc, char** argv) {
    return run(std::vector<std::string>(argv + 1, argv + argc));
}

}  // namespace cli
}  // namespace arw

#endif
