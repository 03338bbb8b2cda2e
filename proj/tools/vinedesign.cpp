// vinedesign: command-line front end for the vine-robot design tools.
//
//   vinedesign solve <problem.json> [--out sol.json] [--svg out.svg] [--seed S] [--budget N]
//   vinedesign workspace <sol.json|problem.json> --samples 1000 --region x0,x1,y0,y1,phi0,phi1
//   vinedesign benchmark --m 2..6 --n 2..8 --trials 20
//   vinedesign tradeoff <problem.json> --angles 15,30,45
//   vinedesign serve --port 8080
//
// Exit status: 0 success, 2 completed but infeasible, 1 error.

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vinedesign/report.hpp"
#include "vinedesign/server.hpp"
#include "vinedesign/svg.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

constexpr const char* kSchemaHelp = R"(Problem file (JSON, angles in degrees, lengths in meters):
  {
    "base": [0, 0],                                   optional
    "targets": [{"x": 0.4, "y": 0.65, "phiDegrees": 90}, ...],   required, >= 1
    "constraints": {"jointAngleMin": -30, "jointAngleMax": 30,
                    "baseAngleMin": -180, "baseAngleMax": 180,
                    "linkLengthMin": 0.1, "linkLengthMax": 1.0, "maxLinkBudget": 8},
    "weights":     {"distance": 1.0, "orientation": 0.3, "clampLo": 0.3, "clampHi": 0.9},
    "tolerance":   {"maxDistance": 0.01, "maxOrientationError": 2.0},
    "search":      {"samples": 200, "iterations": 1000, "alpha": 0.8, "shapeExponent": 10,
                    "epsilon": 0.001, "seed": 1, "convergenceWindow": 50,
                    "convergenceTol": 0.0001, "normalizeVariance": true, "restarts": 20}
  }
All sections except "targets" are optional; unknown fields are rejected.
The environment variable VINEDESIGN_SEED overrides search.seed.
See docs/formats.md for the solution, CSV and SVG formats.)";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "2..6", "2,3,5" or "4" into a list of sizes.
std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
    auto number = [&](std::string_view s) {
        std::size_t v = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || end != s.data() + s.size() || s.empty())
            throw UsageError(flag + ": cannot parse '" + std::string(s) + "'");
        return v;
    };
    std::vector<std::size_t> out;
    if (const auto dots = text.find(".."); dots != std::string::npos) {
        const std::size_t lo = number(std::string_view(text).substr(0, dots));
        const std::size_t hi = number(std::string_view(text).substr(dots + 2));
        if (lo > hi) throw UsageError(flag + ": empty range " + text);
        for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
        return out;
    }
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        out.push_back(number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) throw UsageError(flag + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string item(rest.substr(0, comma));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size())
            throw UsageError(flag + ": cannot parse '" + item + "'");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return out;
}

std::optional<std::uint64_t> seed_from_env() {
    const char* env = std::getenv("VINEDESIGN_SEED");
    if (!env || !*env) return std::nullopt;
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size())
        throw UsageError("VINEDESIGN_SEED must be a non-negative integer");
    return v;
}

/// Precedence: --seed, then VINEDESIGN_SEED, then the file.
void apply_seed(vine::SearchParams& params, const std::optional<std::uint64_t>& flag) {
    if (flag) params.seed = *flag;
    else if (auto env = seed_from_env()) params.seed = *env;
}

vine::ProblemSpec load_problem_verbose(const std::string& path) {
    vine::LoadReport report;
    vine::ProblemSpec p = vine::load_problem(path, &report);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    return p;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") std::cout << text;
    else vine::write_text_file_atomic(path, text);
}

vine::SolutionDocument solve_problem(const vine::ProblemSpec& problem, bool quiet) {
    vine::DesignSearchOptions o;
    o.restarts = problem.budget.restarts;
    const vine::DesignSolution s =
        vine::design_search(problem.base_frame_targets(), problem.constraints, problem.weights,
                            problem.tolerance, problem.search, o);
    vine::SolutionDocument doc = vine::make_solution_document(problem, s);
    if (!quiet) {
        std::cerr << fmt::format("{} with {} link(s), total length {:.4f} m, cost {:.6g}\n",
                                 doc.feasible ? "feasible" : "INFEASIBLE", doc.lengths.size(),
                                 doc.design().total_length(), doc.total_cost);
        for (std::size_t j = 0; j < doc.targets.size(); ++j) {
            const auto& t = doc.targets[j];
            std::cerr << fmt::format("  target {}: link {}, distance {:.4f} m, heading error "
                                     "{:.3f} deg{}\n",
                                     j + 1, t.active_link, t.distance, t.orientation_error_deg,
                                     t.feasible ? "" : "  (not reached)");
        }
    }
    return doc;
}

struct SolveArgs {
    std::string problem, out, svg;
    std::optional<std::uint64_t> seed;
    std::optional<int> budget, restarts;
    bool quiet = false;
};

int run_solve(const SolveArgs& a) {
    vine::ProblemSpec problem = load_problem_verbose(a.problem);
    apply_seed(problem.search, a.seed);
    if (a.budget) problem.constraints.max_link_budget = *a.budget;
    if (a.restarts) problem.budget.restarts = *a.restarts;
    problem.validate();
    const vine::SolutionDocument doc = solve_problem(problem, a.quiet);
    emit(vine::solution_text(doc), a.out);
    if (!a.svg.empty()) vine::write_text_file_atomic(a.svg, vine::render_svg(doc));
    return doc.feasible ? kExitOk : kExitInfeasible;
}

struct WorkspaceArgs {
    std::string input, csv, svg, region;
    std::size_t samples = 1000;
    int iterations = vine::WorkspaceOptions{}.iterations;
    int restarts = vine::WorkspaceOptions{}.restarts;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

int run_workspace(const WorkspaceArgs& a) {
    vine::WorkspaceRegion region;
    if (!a.region.empty()) {
        const auto v = parse_double_list(a.region, "--region");
        if (v.size() != 6) throw UsageError("--region needs x0,x1,y0,y1,phi0,phi1");
        region = {v[0], v[1], v[2], v[3], v[4], v[5]};
    }
    region.validate();

    const vine::Json j = vine::parse_json_text(vine::read_text_file(a.input), a.input);
    vine::ProblemSpec problem;
    vine::Design design;
    if (vine::is_solution_json(j)) {
        const vine::SolutionDocument doc = vine::solution_from_json(j);
        problem = doc.problem;
        design = doc.design();
    } else {
        vine::LoadReport report;
        problem = vine::problem_from_json(j, &report);
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        apply_seed(problem.search, a.seed);
        const vine::SolutionDocument doc = solve_problem(problem, a.quiet);
        if (!doc.feasible) {
            std::cerr << "error: the problem has no feasible design to analyze\n";
            return kExitInfeasible;
        }
        design = doc.design();
    }
    apply_seed(problem.search, a.seed);

    vine::WorkspaceOptions wo;
    wo.samples = a.samples;
    wo.iterations = a.iterations;
    wo.restarts = a.restarts;
    wo.threads = a.threads;
    std::size_t done = 0;
    if (!a.quiet)
        wo.on_sample = [&](std::size_t, const vine::WorkspaceSample&) {
            if (++done % 100 == 0 || done == a.samples)
                std::cerr << fmt::format("\r{}/{} samples", done, a.samples) << std::flush;
        };
    const vine::WorkspaceResult r =
        vine::workspace_analysis(design, region, problem.constraints, problem.weights,
                                 problem.tolerance, problem.search, problem.search.seed, wo);
    if (!a.quiet) std::cerr << "\n";
    std::cerr << fmt::format("success rate {:.4f} over {} samples (seed {})\n", r.success_rate,
                             r.samples.size(), problem.search.seed);
    if (!a.csv.empty()) emit(vine::workspace_csv(r), a.csv);
    if (!a.svg.empty()) vine::write_text_file_atomic(a.svg, vine::render_workspace_svg(r, design));
    if (a.csv.empty()) std::cout << fmt::format("{:.4f}\n", r.success_rate);
    return kExitOk;
}

struct BenchmarkArgs {
    std::string m = "2..6", n = "2..8", csv, detail, problem;
    int trials = 20;
    int restarts = vine::BenchmarkOptions{}.restarts;
    std::size_t true_links = 5;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

int run_benchmark(const BenchmarkArgs& a) {
    const auto ms = parse_size_list(a.m, "--m");
    const auto ns = parse_size_list(a.n, "--n");
    for (auto n : ns)
        if (n < 2) throw UsageError("--n values must be >= 2");
    for (auto m : ms)
        if (m < 1) throw UsageError("--m values must be >= 1");
    vine::ProblemSpec settings;
    settings.targets = {vine::Target::from_degrees(1.0, 0.0, 0.0)};
    if (!a.problem.empty()) settings = load_problem_verbose(a.problem);
    apply_seed(settings.search, a.seed);

    vine::BenchmarkOptions o;
    o.restarts = a.restarts;
    o.true_links = a.true_links;
    o.threads = a.threads;
    if (!a.quiet)
        o.progress = [](std::size_t done, std::size_t total) {
            std::cerr << fmt::format("\r{}/{} trials", done, total) << std::flush;
        };
    const vine::BenchmarkTable table =
        vine::benchmark_table(ms, ns, a.trials, settings.constraints, settings.weights,
                              settings.tolerance, settings.search, settings.search.seed, o);
    if (!a.quiet) std::cerr << "\n";
    emit(vine::benchmark_csv(table), a.csv);
    if (!a.detail.empty()) emit(vine::benchmark_detail_csv(table), a.detail);
    return kExitOk;
}

struct TradeoffArgs {
    std::string problem, angles = "15,30,45", out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> restarts;
    bool quiet = false;
};

int run_tradeoff(const TradeoffArgs& a) {
    vine::ProblemSpec problem = load_problem_verbose(a.problem);
    apply_seed(problem.search, a.seed);
    if (a.restarts) problem.budget.restarts = *a.restarts;
    const auto angles = parse_double_list(a.angles, "--angles");
    if (angles.empty()) throw UsageError("--angles: empty list");

    bool all_feasible = true;
    vine::Json summary = vine::Json::array();
    for (double angle : angles) {
        vine::ProblemSpec variant = problem;
        variant.constraints.joint_min_deg = -angle;
        variant.constraints.joint_max_deg = angle;
        variant.validate();
        if (!a.quiet) std::cerr << fmt::format("bend limit +/-{} deg: ", angle);
        const vine::SolutionDocument doc = solve_problem(variant, a.quiet);
        all_feasible = all_feasible && doc.feasible;
        if (!a.out_dir.empty()) {
            std::filesystem::create_directories(a.out_dir);
            const std::string stem = fmt::format("{}/tradeoff_{}", a.out_dir, angle);
            vine::save_solution(doc, stem + ".json");
            vine::write_text_file_atomic(stem + ".svg", vine::render_svg(doc));
        }
        summary.push_back({{"bendLimitDegrees", angle},
                           {"feasible", doc.feasible},
                           {"links", doc.lengths.size()},
                           {"totalLength", vine::round_to(doc.design().total_length(), 4)},
                           {"lengths", doc.lengths}});
    }
    std::cout << summary.dump(2) << "\n";
    return all_feasible ? kExitOk : kExitInfeasible;
}

int run_serve(const std::string& host, int port) {
    vine::DesignService service;
    httplib::Server server;
    vine::bind_routes(server, service);
    std::cerr << fmt::format("listening on http://{}:{}\n", host, port);
    if (!server.listen(host, port)) {
        std::cerr << fmt::format("error: cannot listen on {}:{}\n", host, port);
        return kExitError;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vine-robot design optimizer"};
    app.footer(kSchemaHelp);
    app.require_subcommand(1);
    app.set_version_flag("--version", vine::kVersion);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Find the smallest design that reaches every target");
    s->add_option("problem", solve.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
    s->add_option("--out", solve.out, "Write the solution JSON here (default: stdout)");
    s->add_option("--svg", solve.svg, "Write an SVG figure here");
    s->add_option("--seed", solve.seed, "Master seed (overrides the file and VINEDESIGN_SEED)");
    s->add_option("--budget", solve.budget, "Maximum number of links")->check(CLI::Range(2, 64));
    s->add_option("--restarts", solve.restarts, "Searches per link budget")->check(CLI::PositiveNumber);
    s->add_flag("--quiet,-q", solve.quiet, "No progress on stderr");

    WorkspaceArgs ws;
    auto* w = app.add_subcommand("workspace", "Estimate the reachable fraction of a region");
    w->add_option("input", ws.input, "Solution JSON, or problem JSON to solve first")
        ->required()
        ->check(CLI::ExistingFile);
    w->add_option("--samples", ws.samples, "Number of sampled targets")->check(CLI::Range(1, 10000000));
    w->add_option("--region", ws.region, "x0,x1,y0,y1,phi0,phi1 (meters, degrees)");
    w->add_option("--iterations", ws.iterations, "Search iterations per sample")->check(CLI::PositiveNumber);
    w->add_option("--restarts", ws.restarts, "Searches per sample")->check(CLI::PositiveNumber);
    w->add_option("--threads", ws.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    w->add_option("--csv", ws.csv, "Write per-sample CSV here");
    w->add_option("--svg", ws.svg, "Write a scatter SVG here");
    w->add_option("--seed", ws.seed, "Master seed");
    w->add_flag("--quiet,-q", ws.quiet, "No progress on stderr");

    BenchmarkArgs bm;
    auto* b = app.add_subcommand("benchmark", "Success rates on generated feasible instances");
    b->add_option("--m", bm.m, "Target counts, e.g. 2..6 or 2,4,6");
    b->add_option("--n", bm.n, "Link budgets, e.g. 2..8");
    b->add_option("--trials", bm.trials, "Instances per cell")->check(CLI::PositiveNumber);
    b->add_option("--restarts", bm.restarts, "Searches per instance")->check(CLI::PositiveNumber);
    b->add_option("--true-links", bm.true_links, "Links of the generating design")->check(CLI::Range(2, 64));
    b->add_option("--problem", bm.problem, "Take constraints/weights/tolerance/search from this problem")
        ->check(CLI::ExistingFile);
    b->add_option("--threads", bm.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    b->add_option("--csv", bm.csv, "Write the matrix CSV here (default: stdout)");
    b->add_option("--detail", bm.detail, "Write the long-form CSV here");
    b->add_option("--seed", bm.seed, "Master seed");
    b->add_flag("--quiet,-q", bm.quiet, "No progress on stderr");

    TradeoffArgs tr;
    auto* t = app.add_subcommand("tradeoff", "Solve the same targets under several bend limits");
    t->add_option("problem", tr.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
    t->add_option("--angles", tr.angles, "Symmetric bend limits in degrees, e.g. 15,30,45");
    t->add_option("--out-dir", tr.out_dir, "Write one solution JSON and SVG per limit here");
    t->add_option("--seed", tr.seed, "Master seed");
    t->add_option("--restarts", tr.restarts, "Searches per link budget")->check(CLI::PositiveNumber);
    t->add_flag("--quiet,-q", tr.quiet, "No progress on stderr");

    std::string host = "127.0.0.1";
    int port = 8080;
    auto* sv = app.add_subcommand("serve", "Run the HTTP API");
    sv->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
    sv->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitError;
    }

    try {
        if (*s) return run_solve(solve);
        if (*w) return run_workspace(ws);
        if (*b) return run_benchmark(bm);
        if (*t) return run_tradeoff(tr);
        if (*sv) return run_serve(host, port);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n\n" << kSchemaHelp << "\n";
        return kExitError;
    } catch (const vine::ValidationError& e) {
        std::cerr << "invalid input: " << e.what() << "\n\n" << kSchemaHelp << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
