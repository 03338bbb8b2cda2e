#pragma once

// Top-level design procedures: link-budget search, feasibility checking,
// synthetic feasible instances, the success-rate benchmark, fixed-design
// workspace estimation and constraint trade-off sweeps.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vinedesign/cost.hpp"
#include "vinedesign/kinematics.hpp"
#include "vinedesign/parallel.hpp"
#include "vinedesign/stochastic_search.hpp"

namespace vine {

/// Hardware limits. Angles are degrees here because they are user-facing knobs.
struct Constraints {
    double joint_min_deg = -30.0;
    double joint_max_deg = 30.0;
    double base_min_deg = -180.0;
    double base_max_deg = 180.0;
    double link_min = 0.10;  // meters
    double link_max = 1.0;
    int max_link_budget = 8;

    void validate() const {
        if (!(joint_min_deg < joint_max_deg))
            throw ValidationError("jointAngleMin must be < jointAngleMax", "constraints.jointAngle");
        if (!(base_min_deg <= base_max_deg))
            throw ValidationError("baseAngleMin must be <= baseAngleMax", "constraints.baseAngle");
        if (!(link_min > 0.0 && link_min < link_max))
            throw ValidationError("need 0 < linkLengthMin < linkLengthMax", "constraints.linkLength");
        if (max_link_budget < 2)
            throw ValidationError("must be >= 2", "constraints.maxLinkBudget");
    }

    /// Length and angle limits hold for the design and every configuration.
    bool admits(const Design& design, std::span<const Configuration> configs) const {
        constexpr double slack = 1e-9;
        for (double l : design.lengths)
            if (!(l >= link_min - slack && l <= link_max + slack)) return false;
        for (const auto& c : configs) {
            if (c.angles.size() != design.links()) return false;
            for (std::size_t k = 0; k < c.angles.size(); ++k) {
                const double lo = deg2rad(k == 0 ? base_min_deg : joint_min_deg);
                const double hi = deg2rad(k == 0 ? base_max_deg : joint_max_deg);
                if (!(c.angles[k] >= lo - slack && c.angles[k] <= hi + slack)) return false;
            }
        }
        return true;
    }
};

/// When a target counts as reached.
struct FeasibilityTolerance {
    double max_distance = 0.01;       // meters
    double max_orientation_deg = 2.0; // degrees

    void validate() const {
        if (!(max_distance > 0.0)) throw ValidationError("must be > 0", "tolerance.maxDistance");
        if (!(max_orientation_deg > 0.0))
            throw ValidationError("must be > 0", "tolerance.maxOrientationError");
    }
};

struct DesignSolution {
    Design design;
    std::vector<Configuration> configurations;
    std::vector<bool> per_target_feasible;
    std::vector<std::size_t> active_links;  // 1-based end-effector link per target
    CostBreakdown cost;
    SearchTrace trace;
    std::size_t budget = 0;  // link budget the winning search ran with
    std::uint64_t seed = 0;  // seed of the winning restart

    bool feasible() const {
        return !per_target_feasible.empty() &&
               std::all_of(per_target_feasible.begin(), per_target_feasible.end(),
                           [](bool b) { return b; });
    }

    std::size_t feasible_count() const {
        return static_cast<std::size_t>(
            std::count(per_target_feasible.begin(), per_target_feasible.end(), true));
    }
};

struct DesignSearchOptions {
    int restarts = 20;                        // independent searches per budget
    std::optional<std::size_t> fixed_budget;  // search exactly this many links
};

// ---------------------------------------------------------------------------
// Optimizer coordinates. The search vector is in centimeters and degrees so
// that the variance floor is small against the feasibility tolerance.

namespace search_units {
inline constexpr double kLength = 100.0;  // cm per m
inline constexpr double kAngle = 180.0 / kPi;
}  // namespace search_units

/// Bounds of x = [lengths(n), q_1(n), ..., q_m(n)] in search units.
inline BoxBounds design_bounds(std::size_t links, std::size_t targets, const Constraints& c) {
    const auto dim = static_cast<Eigen::Index>(links * (targets + 1));
    BoxBounds b{Eigen::VectorXd(dim), Eigen::VectorXd(dim)};
    for (std::size_t i = 0; i < links; ++i) {
        b.lower[static_cast<Eigen::Index>(i)] = c.link_min * search_units::kLength;
        b.upper[static_cast<Eigen::Index>(i)] = c.link_max * search_units::kLength;
    }
    for (std::size_t j = 0; j < targets; ++j)
        for (std::size_t k = 0; k < links; ++k) {
            const auto idx = static_cast<Eigen::Index>(links * (j + 1) + k);
            b.lower[idx] = k == 0 ? c.base_min_deg : c.joint_min_deg;
            b.upper[idx] = k == 0 ? c.base_max_deg : c.joint_max_deg;
        }
    return b;
}

/// Bounds for a configuration-only search (fixed design), degrees.
inline BoxBounds configuration_bounds(std::size_t links, const Constraints& c) {
    const auto full = design_bounds(links, 1, c);
    const auto n = static_cast<Eigen::Index>(links);
    return BoxBounds{full.lower.tail(n), full.upper.tail(n)};
}

inline Configuration decode_configuration(std::span<const double> degrees,
                                          const Constraints& c) {
    Configuration out;
    out.angles.reserve(degrees.size());
    for (std::size_t k = 0; k < degrees.size(); ++k) {
        const double lo = deg2rad(k == 0 ? c.base_min_deg : c.joint_min_deg);
        const double hi = deg2rad(k == 0 ? c.base_max_deg : c.joint_max_deg);
        out.angles.push_back(std::clamp(degrees[k] / search_units::kAngle, lo, hi));
    }
    return out;
}

/// Splits a search vector into a design and one configuration per target.
inline std::pair<Design, std::vector<Configuration>> decode_design(std::span<const double> x,
                                                                   std::size_t links,
                                                                   std::size_t targets,
                                                                   const Constraints& c) {
    if (x.size() != links * (targets + 1))
        throw DimensionError("decode_design: vector size does not match links/targets");
    Design design;
    design.lengths.reserve(links);
    for (std::size_t i = 0; i < links; ++i)
        design.lengths.push_back(std::clamp(x[i] / search_units::kLength, c.link_min, c.link_max));
    std::vector<Configuration> configs;
    configs.reserve(targets);
    for (std::size_t j = 0; j < targets; ++j)
        configs.push_back(decode_configuration(x.subspan(links * (j + 1), links), c));
    return {std::move(design), std::move(configs)};
}

/// Initial proposal: lengths at the middle of their range and bends straight
/// with half the box as spread; each target's base angle starts pointing at
/// that target with spread `base_spread_deg`.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_proposal(
    std::size_t links, std::span<const Target> targets, const Constraints& c,
    double base_spread_deg = 45.0) {
    const BoxBounds b = design_bounds(links, targets.size(), c);
    Eigen::VectorXd mu = 0.5 * (b.lower + b.upper);
    Eigen::VectorXd sigma = 0.5 * (b.upper - b.lower);
    for (std::size_t j = 0; j < targets.size(); ++j) {
        const auto idx = static_cast<Eigen::Index>(links * (j + 1));
        const Vec2& p = targets[j].position;
        mu[idx] = std::clamp(rad2deg(std::atan2(p.y(), p.x())), c.base_min_deg, c.base_max_deg);
        sigma[idx] = std::min(sigma[idx], base_spread_deg);
    }
    return {mu, sigma.cwiseMax(1e-6)};
}

/// Start of restart `r`: restart 0 is `initial_proposal`; later restarts draw
/// the mean uniformly inside the box, keeping each base angle within its
/// spread of the target bearing.
inline Eigen::VectorXd restart_mean(const Eigen::VectorXd& mu0, const Eigen::VectorXd& sigma0,
                                    const BoxBounds& bounds, std::size_t links, int r,
                                    std::uint64_t seed) {
    if (r == 0) return mu0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd mu(mu0.size());
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
        const bool base = i >= static_cast<Eigen::Index>(links) &&
                          i % static_cast<Eigen::Index>(links) == 0;
        const double lo = base ? std::max(bounds.lower[i], mu0[i] - sigma0[i]) : bounds.lower[i];
        const double hi = base ? std::min(bounds.upper[i], mu0[i] + sigma0[i]) : bounds.upper[i];
        mu[i] = lo + u(rng) * (hi - lo);
    }
    return mu;
}

// ---------------------------------------------------------------------------

/// Per-target reachability of a design: the best link's residuals are within
/// tolerance and every length and angle respects the constraints.
inline std::vector<bool> check_feasibility(const Design& design,
                                           std::span<const Configuration> configs,
                                           std::span<const Target> targets,
                                           const CostWeights& weights,
                                           const FeasibilityTolerance& tol,
                                           const Constraints& constraints) {
    const CostBreakdown cost = total_cost(design, configs, targets, weights);
    const bool admissible = constraints.admits(design, configs);
    const double max_orientation = deg2rad(tol.max_orientation_deg);
    std::vector<bool> out;
    out.reserve(targets.size());
    for (const auto& t : cost.per_target)
        out.push_back(admissible && t.distance <= tol.max_distance &&
                      t.orientation <= max_orientation);
    return out;
}

namespace detail {

inline bool better_solution(const DesignSolution& a, const DesignSolution& b) {
    if (a.feasible_count() != b.feasible_count()) return a.feasible_count() > b.feasible_count();
    return a.cost.total < b.cost.total;
}

inline DesignSolution assemble_solution(Design design, std::vector<Configuration> configs,
                                        std::span<const Target> targets,
                                        const CostWeights& weights,
                                        const FeasibilityTolerance& tol,
                                        const Constraints& constraints) {
    DesignSolution s;
    s.cost = total_cost(design, configs, targets, weights);
    s.per_target_feasible =
        check_feasibility(design, configs, targets, weights, tol, constraints);
    for (const auto& t : s.cost.per_target) s.active_links.push_back(t.best_link);
    s.design = std::move(design);
    s.configurations = std::move(configs);
    return s;
}

}  // namespace detail

/// Drops links past the most distal active link. Only the end-effector links
/// and those before them contribute to any target's cost, so residuals are
/// unchanged.
inline void trim_unused_links(DesignSolution& s) {
    if (s.active_links.empty()) return;
    const std::size_t keep = *std::max_element(s.active_links.begin(), s.active_links.end());
    if (keep >= s.design.links()) return;
    s.design.lengths.resize(keep);
    for (auto& c : s.configurations) c.angles.resize(keep);
}

/// Best of `restarts` independent searches with exactly `links` links. Stops
/// early once a restart reaches every target.
inline DesignSolution search_fixed_budget(std::span<const Target> targets, std::size_t links,
                                          const Constraints& constraints,
                                          const CostWeights& weights,
                                          const FeasibilityTolerance& tol,
                                          const SearchParams& params, int restarts) {
    const DesignObjective objective(std::vector<Target>(targets.begin(), targets.end()), weights,
                                    links);
    const BoxBounds bounds = design_bounds(links, targets.size(), constraints);
    const auto [mu0, sigma0] = initial_proposal(links, targets, constraints);
    const std::size_t m = targets.size();

    auto f = [&](std::span<const double> x) {
        std::vector<double> internal(x.begin(), x.end());
        for (std::size_t i = 0; i < links; ++i) internal[i] /= search_units::kLength;
        for (std::size_t i = links; i < internal.size(); ++i) internal[i] /= search_units::kAngle;
        return objective(internal);
    };

    std::optional<DesignSolution> best;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        SearchParams p = params;
        p.seed = derive_seed(params.seed, links, static_cast<std::uint64_t>(r));
        const Eigen::VectorXd start =
            restart_mean(mu0, sigma0, bounds, links, r, derive_seed(p.seed, 0x57a7));
        SearchTrace trace = ass_minimize(f, start, sigma0, bounds, p);
        auto [design, configs] = decode_design(
            std::span<const double>(trace.best_x.data(), static_cast<std::size_t>(trace.best_x.size())),
            links, m, constraints);
        DesignSolution s = detail::assemble_solution(std::move(design), std::move(configs), targets,
                                                     weights, tol, constraints);
        s.trace = std::move(trace);
        s.budget = links;
        s.seed = p.seed;
        if (!best || detail::better_solution(s, *best)) best = std::move(s);
        if (best->feasible()) break;
    }
    if (best->feasible()) trim_unused_links(*best);
    return std::move(*best);
}

/// Smallest link budget (2..maxLinkBudget) whose search reaches every target;
/// otherwise the best attempt (most targets reached, then lowest cost), which
/// the caller sees as `!feasible()`.
inline DesignSolution design_search(std::span<const Target> targets,
                                    const Constraints& constraints, const CostWeights& weights,
                                    const FeasibilityTolerance& tol, const SearchParams& params,
                                    const DesignSearchOptions& options = {}) {
    validate_targets(targets);
    constraints.validate();
    weights.validate();
    tol.validate();
    params.validate();

    std::size_t first = 2;
    std::size_t last = static_cast<std::size_t>(constraints.max_link_budget);
    if (options.fixed_budget) {
        if (*options.fixed_budget < 2) throw ValidationError("must be >= 2", "budget");
        first = last = *options.fixed_budget;
    }
    std::optional<DesignSolution> best;
    for (std::size_t n = first; n <= last; ++n) {
        DesignSolution s =
            search_fixed_budget(targets, n, constraints, weights, tol, params, options.restarts);
        if (s.feasible()) return s;
        if (!best || detail::better_solution(s, *best)) best = std::move(s);
    }
    return std::move(*best);
}

// ---------------------------------------------------------------------------

struct GeneratedInstance {
    std::vector<Target> targets;
    Design design;                              // the generating design
    std::vector<Configuration> configurations;  // one per target
    std::vector<std::size_t> links;             // generating link per target (1-based)
};

/// Targets that a known `true_links`-link design reaches exactly: sample a
/// design and m configurations inside the constraints, then take a point at
/// lambda in [clamp_lo, clamp_hi] on a random link 2..true_links together with
/// that link's heading.
inline GeneratedInstance generate_feasible_instance(std::size_t m, std::size_t true_links,
                                                    const Constraints& constraints,
                                                    std::uint64_t seed, double clamp_lo = 0.3,
                                                    double clamp_hi = 0.9) {
    if (m < 1) throw ValidationError("must be >= 1", "m");
    if (true_links < 2) throw ValidationError("must be >= 2", "nTrue");
    constraints.validate();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> length(constraints.link_min, constraints.link_max);
    std::uniform_real_distribution<double> base(deg2rad(constraints.base_min_deg),
                                                deg2rad(constraints.base_max_deg));
    std::uniform_real_distribution<double> joint(deg2rad(constraints.joint_min_deg),
                                                 deg2rad(constraints.joint_max_deg));
    std::uniform_int_distribution<std::size_t> link(2, true_links);
    std::uniform_real_distribution<double> lambda(clamp_lo, clamp_hi);

    GeneratedInstance out;
    for (std::size_t i = 0; i < true_links; ++i) out.design.lengths.push_back(length(rng));
    while (out.targets.size() < m) {
        Configuration c;
        c.angles.push_back(base(rng));
        for (std::size_t i = 1; i < true_links; ++i) c.angles.push_back(joint(rng));
        const std::size_t i = link(rng);
        const double lam = lambda(rng);
        const ChainPose pose = forward_kinematics(out.design, c);
        const Vec2 p = pose.nodes[i - 1] + lam * (pose.nodes[i] - pose.nodes[i - 1]);
        if (p.norm() <= 1e-9) continue;  // 1/|t|^2 weight needs a nonzero target
        out.targets.push_back(Target{p, wrap_angle(pose.cumulative_angles[i - 1])});
        out.configurations.push_back(std::move(c));
        out.links.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------

struct BenchmarkCell {
    std::size_t links = 0;    // budget n
    std::size_t targets = 0;  // m
    int trials = 0;
    double target_rate = 0.0;    // fraction of all targets reached
    double instance_rate = 0.0;  // fraction of trials with every target reached
};

struct BenchmarkTable {
    std::vector<std::size_t> m_values;
    std::vector<std::size_t> n_values;
    std::vector<std::vector<BenchmarkCell>> cells;  // [n index][m index]

    const BenchmarkCell& at(std::size_t n, std::size_t m) const {
        for (std::size_t r = 0; r < n_values.size(); ++r)
            for (std::size_t c = 0; c < m_values.size(); ++c)
                if (n_values[r] == n && m_values[c] == m) return cells[r][c];
        throw IndexError("BenchmarkTable: no cell for n=" + std::to_string(n) +
                         ", m=" + std::to_string(m));
    }
};

struct BenchmarkOptions {
    int restarts = 20;
    std::size_t true_links = 5;
    int threads = 0;
    std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Success rates with a fixed budget n per row on instances generated from a
/// `true_links`-link design. Instance j for a given m is the same in every row.
inline BenchmarkTable benchmark_table(std::span<const std::size_t> m_values,
                                      std::span<const std::size_t> n_values, int trials,
                                      const Constraints& constraints, const CostWeights& weights,
                                      const FeasibilityTolerance& tol, const SearchParams& params,
                                      std::uint64_t seed, const BenchmarkOptions& options = {}) {
    if (trials < 1) throw ValidationError("must be >= 1", "trials");
    if (m_values.empty() || n_values.empty())
        throw ValidationError("need at least one m and one n", "benchmark");
    BenchmarkTable table;
    table.m_values.assign(m_values.begin(), m_values.end());
    table.n_values.assign(n_values.begin(), n_values.end());

    const std::size_t rows = n_values.size();
    const std::size_t cols = m_values.size();
    const auto T = static_cast<std::size_t>(trials);
    struct Outcome {
        std::size_t reached = 0;
        bool all = false;
    };
    std::vector<Outcome> outcomes(rows * cols * T);
    std::mutex progress_mutex;
    std::size_t done = 0;

    parallel_for(outcomes.size(), options.threads, [&](std::size_t job) {
        const std::size_t r = job / (cols * T);
        const std::size_t c = (job / T) % cols;
        const std::size_t t = job % T;
        const std::size_t n = n_values[r];
        const std::size_t m = m_values[c];
        const std::uint64_t instance_seed = derive_seed(seed, m, t);
        const GeneratedInstance inst = generate_feasible_instance(
            m, options.true_links, constraints, instance_seed, weights.clamp_lo, weights.clamp_hi);
        SearchParams p = params;
        p.seed = derive_seed(instance_seed, n);
        p.threads = 1;
        DesignSearchOptions o;
        o.restarts = options.restarts;
        o.fixed_budget = n;
        const DesignSolution s = design_search(inst.targets, constraints, weights, tol, p, o);
        outcomes[job] = {s.feasible_count(), s.feasible()};
        if (options.progress) {
            std::lock_guard lock(progress_mutex);
            options.progress(++done, outcomes.size());
        }
    });

    table.cells.assign(rows, std::vector<BenchmarkCell>(cols));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            BenchmarkCell& cell = table.cells[r][c];
            cell.links = n_values[r];
            cell.targets = m_values[c];
            cell.trials = trials;
            std::size_t reached = 0, all = 0;
            for (std::size_t t = 0; t < T; ++t) {
                const Outcome& o = outcomes[(r * cols + c) * T + t];
                reached += o.reached;
                all += o.all ? 1 : 0;
            }
            cell.target_rate =
                static_cast<double>(reached) / static_cast<double>(T * m_values[c]);
            cell.instance_rate = static_cast<double>(all) / static_cast<double>(T);
        }
    return table;
}

// ---------------------------------------------------------------------------

/// Axis-aligned sampling box over (x, y, heading).
struct WorkspaceRegion {
    double x_min = 0.1, x_max = 0.9;
    double y_min = 0.1, y_max = 0.9;
    double phi_min_deg = -90.0, phi_max_deg = 90.0;

    void validate() const {
        if (!(x_min <= x_max && y_min <= y_max && phi_min_deg <= phi_max_deg))
            throw ValidationError("each lower bound must be <= its upper bound", "region");
    }
};

struct WorkspaceSample {
    Target target;
    bool feasible = false;
    Configuration configuration;
    std::size_t active_link = 0;
    double distance = 0.0;     // meters
    double orientation = 0.0;  // radians
};

struct WorkspaceResult {
    double success_rate = 0.0;
    std::vector<WorkspaceSample> samples;
};

struct WorkspaceOptions {
    std::size_t samples = 1000;
    int iterations = 200;  // per-sample search length; overrides params.iterations
    int restarts = 3;
    int threads = 0;
    // Called once per finished sample, serialized, in completion order.
    std::function<void(std::size_t index, const WorkspaceSample&)> on_sample;
};

/// Best configuration of a fixed design for one target.
inline WorkspaceSample reach_target(const Design& design, const Target& target,
                                    const Constraints& constraints, const CostWeights& weights,
                                    const FeasibilityTolerance& tol, const SearchParams& params,
                                    int restarts) {
    const std::size_t n = design.links();
    if (n < 2) throw DimensionError("reach_target: design needs at least 2 links");
    const BoxBounds bounds = configuration_bounds(n, constraints);
    Eigen::VectorXd mu0 = 0.5 * (bounds.lower + bounds.upper);
    mu0[0] = std::clamp(rad2deg(std::atan2(target.position.y(), target.position.x())),
                        constraints.base_min_deg, constraints.base_max_deg);
    const Eigen::VectorXd sigma0 = (0.5 * (bounds.upper - bounds.lower)).cwiseMax(1e-6);

    auto f = [&](std::span<const double> degrees) {
        double angles[64];
        std::vector<double> heap;
        double* a = angles;
        if (degrees.size() > 64) {
            heap.resize(degrees.size());
            a = heap.data();
        }
        for (std::size_t k = 0; k < degrees.size(); ++k) a[k] = degrees[k] / search_units::kAngle;
        return best_link_cost(design.lengths, std::span<const double>(a, degrees.size()), target,
                              weights)
            .weighted;
    };

    WorkspaceSample best;
    best.target = target;
    double best_cost = std::numeric_limits<double>::infinity();
    const Target one[] = {target};
    for (int r = 0; r < std::max(1, restarts); ++r) {
        SearchParams p = params;
        p.seed = derive_seed(params.seed, static_cast<std::uint64_t>(r));
        const SearchTrace trace = ass_minimize(f, mu0, sigma0, bounds, p);
        Configuration c = decode_configuration(
            std::span<const double>(trace.best_x.data(), n), constraints);
        const TargetCost tc = best_link_cost(design.lengths, c.angles, target, weights);
        const Configuration cs[] = {c};
        const bool ok = check_feasibility(design, cs, one, weights, tol, constraints).front();
        if (tc.weighted < best_cost || (ok && !best.feasible)) {
            best_cost = tc.weighted;
            best.feasible = ok;
            best.configuration = std::move(c);
            best.active_link = tc.best_link;
            best.distance = tc.distance;
            best.orientation = tc.orientation;
        }
        if (best.feasible) break;
    }
    return best;
}

/// Monte-Carlo estimate of the fraction of `region` a fixed design reaches,
/// optimizing only the configuration for each sampled target.
inline WorkspaceResult workspace_analysis(const Design& design, const WorkspaceRegion& region,
                                          const Constraints& constraints,
                                          const CostWeights& weights,
                                          const FeasibilityTolerance& tol,
                                          const SearchParams& params, std::uint64_t seed,
                                          const WorkspaceOptions& options = {}) {
    region.validate();
    constraints.validate();
    weights.validate();
    tol.validate();
    if (design.links() < 2) throw ValidationError("design needs at least 2 links", "design");

    WorkspaceResult out;
    out.samples.resize(options.samples);
    std::mutex sink;
    parallel_for(options.samples, options.threads, [&](std::size_t s) {
        std::mt19937_64 rng(derive_seed(seed, s));
        std::uniform_real_distribution<double> ux(region.x_min, region.x_max);
        std::uniform_real_distribution<double> uy(region.y_min, region.y_max);
        std::uniform_real_distribution<double> uphi(region.phi_min_deg, region.phi_max_deg);
        const double x = ux(rng);
        const double y = uy(rng);
        const double phi = uphi(rng);
        Target t = Target::from_degrees(x, y, phi);
        WorkspaceSample sample;
        if (t.position.norm() <= 0.0) {
            sample.target = t;
        } else {
            SearchParams p = params;
            p.iterations = options.iterations;
            p.seed = derive_seed(seed, s, 0x5eed);
            p.threads = 1;
            sample = reach_target(design, t, constraints, weights, tol, p, options.restarts);
        }
        out.samples[s] = sample;
        if (options.on_sample) {
            std::lock_guard lock(sink);
            options.on_sample(s, out.samples[s]);
        }
    });
    std::size_t ok = 0;
    for (const auto& s : out.samples) ok += s.feasible ? 1 : 0;
    out.success_rate =
        options.samples == 0 ? 0.0
                             : static_cast<double>(ok) / static_cast<double>(options.samples);
    return out;
}

// ---------------------------------------------------------------------------

/// One design_search per constraint variant, for side-by-side comparison.
inline std::vector<DesignSolution> tradeoff_sweep(std::span<const Target> targets,
                                                  std::span<const Constraints> variants,
                                                  const CostWeights& weights,
                                                  const FeasibilityTolerance& tol,
                                                  const SearchParams& params,
                                                  const DesignSearchOptions& options = {}) {
    if (variants.empty()) throw ValidationError("need at least one variant", "variants");
    std::vector<DesignSolution> out;
    out.reserve(variants.size());
    for (const auto& v : variants)
        out.push_back(design_search(targets, v, weights, tol, params, options));
    return out;
}

}  // namespace vine
