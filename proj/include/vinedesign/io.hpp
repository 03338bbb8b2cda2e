#pragma once

// Problem and solution documents (JSON). Angles in files are degrees, lengths
// meters. See docs/formats.md for the schema.

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "vinedesign/design.hpp"

namespace vine {

using Json = nlohmann::ordered_json;

/// Knobs that only affect how hard design_search tries.
struct SearchBudget {
    int restarts = DesignSearchOptions{}.restarts;
};

struct ProblemSpec {
    Vec2 base = Vec2::Zero();
    std::vector<Target> targets;  // as written in the file, world frame
    Constraints constraints;
    CostWeights weights;
    FeasibilityTolerance tolerance;
    SearchParams search;
    SearchBudget budget;

    /// Targets expressed relative to the base, which is what the solver uses.
    std::vector<Target> base_frame_targets() const {
        std::vector<Target> out = targets;
        for (auto& t : out) t.position -= base;
        return out;
    }

    void validate() const {
        if (!base.allFinite()) throw ValidationError("must be finite", "base");
        validate_targets(base_frame_targets());
        constraints.validate();
        weights.validate();
        tolerance.validate();
        search.validate();
        if (budget.restarts < 1) throw ValidationError("must be >= 1", "search.restarts");
    }

    bool operator==(const ProblemSpec& o) const;
};

/// Anything the loader fixed up, e.g. wrapped headings.
struct LoadReport {
    std::vector<std::string> warnings;
};

// ---------------------------------------------------------------------------

namespace detail {

class FieldReader {
public:
    FieldReader(const Json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ValidationError("must be an object", path_);
    }

    template <class T>
    std::optional<T> optional(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        if (it == obj_.end()) return std::nullopt;
        try {
            return it->template get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ValidationError("has the wrong type", field(key));
        }
    }

    template <class T>
    T required(const std::string& key) {
        auto v = optional<T>(key);
        if (!v) throw ValidationError("is required", field(key));
        return *v;
    }

    const Json* child(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    /// Rejects keys that were never asked for.
    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError("unknown field", field(it.key()));
    }

    std::string field(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

private:
    const Json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

inline double finite(double v, const std::string& field) {
    if (!std::isfinite(v)) throw ValidationError("must be finite", field);
    return v;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace detail

// --- ProblemSpec <-> JSON ---------------------------------------------------

inline Json to_json(const ProblemSpec& p) {
    Json j;
    j["base"] = {p.base.x(), p.base.y()};
    j["targets"] = Json::array();
    for (const auto& t : p.targets)
        j["targets"].push_back(
            {{"x", t.position.x()}, {"y", t.position.y()}, {"phiDegrees", t.orientation_degrees()}});
    const auto& c = p.constraints;
    j["constraints"] = {{"jointAngleMin", c.joint_min_deg},  {"jointAngleMax", c.joint_max_deg},
                        {"baseAngleMin", c.base_min_deg},    {"baseAngleMax", c.base_max_deg},
                        {"linkLengthMin", c.link_min},       {"linkLengthMax", c.link_max},
                        {"maxLinkBudget", c.max_link_budget}};
    const auto& w = p.weights;
    j["weights"] = {{"distance", w.distance},
                    {"orientation", w.orientation},
                    {"clampLo", w.clamp_lo},
                    {"clampHi", w.clamp_hi}};
    j["tolerance"] = {{"maxDistance", p.tolerance.max_distance},
                      {"maxOrientationError", p.tolerance.max_orientation_deg}};
    const auto& s = p.search;
    j["search"] = {{"samples", s.samples},
                   {"iterations", s.iterations},
                   {"alpha", s.learning_rate},
                   {"shapeExponent", s.shape_exponent},
                   {"epsilon", s.epsilon},
                   {"seed", s.seed},
                   {"convergenceWindow", s.convergence_window},
                   {"convergenceTol", s.convergence_tol},
                   {"normalizeVariance", s.normalize_variance},
                   {"restarts", p.budget.restarts}};
    return j;
}

/// Parses and validates a problem document. Missing sections take defaults;
/// unknown fields are errors. Headings outside (-180, 180] are wrapped and
/// reported in `report`.
inline ProblemSpec problem_from_json(const Json& j, LoadReport* report = nullptr) {
    ProblemSpec p;
    detail::FieldReader root(j, "");

    if (const Json* base = root.child("base")) {
        if (!base->is_array() || base->size() != 2 || !(*base)[0].is_number() ||
            !(*base)[1].is_number())
            throw ValidationError("must be [x, y]", "base");
        p.base = Vec2((*base)[0].get<double>(), (*base)[1].get<double>());
    }

    const Json* targets = root.child("targets");
    if (!targets) throw ValidationError("is required", "targets");
    if (!targets->is_array()) throw ValidationError("must be an array", "targets");
    for (std::size_t i = 0; i < targets->size(); ++i) {
        const std::string path = "targets[" + std::to_string(i) + "]";
        detail::FieldReader t((*targets)[i], path);
        const double x = detail::finite(t.required<double>("x"), path + ".x");
        const double y = detail::finite(t.required<double>("y"), path + ".y");
        const double phi = detail::finite(t.required<double>("phiDegrees"), path + ".phiDegrees");
        t.finish();
        const double wrapped = wrap_degrees(phi);
        if (wrapped != phi && report)
            report->warnings.push_back(fmt::format("{}.phiDegrees: {} normalized to {}", path, phi,
                                                   wrapped));
        p.targets.push_back(Target{Vec2(x, y), deg2rad(wrapped)});
    }

    if (const Json* cj = root.child("constraints")) {
        detail::FieldReader c(*cj, "constraints");
        auto& k = p.constraints;
        k.joint_min_deg = c.optional<double>("jointAngleMin").value_or(k.joint_min_deg);
        k.joint_max_deg = c.optional<double>("jointAngleMax").value_or(k.joint_max_deg);
        k.base_min_deg = c.optional<double>("baseAngleMin").value_or(k.base_min_deg);
        k.base_max_deg = c.optional<double>("baseAngleMax").value_or(k.base_max_deg);
        k.link_min = c.optional<double>("linkLengthMin").value_or(k.link_min);
        k.link_max = c.optional<double>("linkLengthMax").value_or(k.link_max);
        k.max_link_budget = c.optional<int>("maxLinkBudget").value_or(k.max_link_budget);
        c.finish();
    }
    if (const Json* wj = root.child("weights")) {
        detail::FieldReader w(*wj, "weights");
        auto& k = p.weights;
        k.distance = w.optional<double>("distance").value_or(k.distance);
        k.orientation = w.optional<double>("orientation").value_or(k.orientation);
        k.clamp_lo = w.optional<double>("clampLo").value_or(k.clamp_lo);
        k.clamp_hi = w.optional<double>("clampHi").value_or(k.clamp_hi);
        w.finish();
    }
    if (const Json* tj = root.child("tolerance")) {
        detail::FieldReader t(*tj, "tolerance");
        auto& k = p.tolerance;
        k.max_distance = t.optional<double>("maxDistance").value_or(k.max_distance);
        k.max_orientation_deg =
            t.optional<double>("maxOrientationError").value_or(k.max_orientation_deg);
        t.finish();
    }
    if (const Json* sj = root.child("search")) {
        detail::FieldReader s(*sj, "search");
        auto& k = p.search;
        k.samples = s.optional<int>("samples").value_or(k.samples);
        k.iterations = s.optional<int>("iterations").value_or(k.iterations);
        k.learning_rate = s.optional<double>("alpha").value_or(k.learning_rate);
        k.shape_exponent = s.optional<double>("shapeExponent").value_or(k.shape_exponent);
        k.epsilon = s.optional<double>("epsilon").value_or(k.epsilon);
        k.seed = s.optional<std::uint64_t>("seed").value_or(k.seed);
        k.convergence_window = s.optional<int>("convergenceWindow").value_or(k.convergence_window);
        k.convergence_tol = s.optional<double>("convergenceTol").value_or(k.convergence_tol);
        k.normalize_variance = s.optional<bool>("normalizeVariance").value_or(k.normalize_variance);
        p.budget.restarts = s.optional<int>("restarts").value_or(p.budget.restarts);
        s.finish();
    }
    root.finish();
    p.validate();
    return p;
}

inline bool ProblemSpec::operator==(const ProblemSpec& o) const {
    return to_json(*this) == to_json(o);
}

inline std::string problem_hash(const ProblemSpec& p) {
    return fmt::format("{:016x}", detail::fnv1a(to_json(p).dump()));
}

// --- file helpers -------------------------------------------------------------

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Writes via a sibling temp file and rename, so readers never see a partial file.
inline void write_text_file_atomic(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << text;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

/// Parses JSON text, reporting syntax errors with a line number.
inline Json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(fmt::format("{}:{}: {}", origin, detail::line_of(text, e.byte),
                                          e.what()),
                              "");
    }
}

inline ProblemSpec problem_from_text(const std::string& text, LoadReport* report = nullptr,
                                     const std::string& origin = "<input>") {
    return problem_from_json(parse_json_text(text, origin), report);
}

inline ProblemSpec load_problem(const std::filesystem::path& path, LoadReport* report = nullptr) {
    return problem_from_text(read_text_file(path), report, path.string());
}

inline void save_problem(const ProblemSpec& p, const std::filesystem::path& path) {
    write_text_file_atomic(path, to_json(p).dump(2) + "\n");
}

// --- SolutionDocument ---------------------------------------------------------

struct TargetResult {
    std::vector<double> configuration_deg;
    std::size_t active_link = 0;
    bool feasible = false;
    double distance = 0.0;                 // meters
    double orientation_error_deg = 0.0;
    double weighted_cost = 0.0;

    bool operator==(const TargetResult&) const = default;
};

struct TraceSummary {
    double best_cost = 0.0;
    int iterations = 0;
    std::size_t discarded_samples = 0;
    std::size_t budget = 0;
    std::uint64_t seed = 0;

    bool operator==(const TraceSummary&) const = default;
};

struct SolutionDocument {
    std::string problem_hash;
    ProblemSpec problem;
    std::vector<double> lengths;  // meters, rounded to 0.1 mm
    std::vector<TargetResult> targets;
    double total_cost = 0.0;
    bool feasible = false;
    TraceSummary trace;

    bool operator==(const SolutionDocument& o) const {
        return problem_hash == o.problem_hash && problem == o.problem && lengths == o.lengths &&
               targets == o.targets && total_cost == o.total_cost && feasible == o.feasible &&
               trace == o.trace;
    }

    Design design() const { return Design{lengths}; }

    std::vector<Configuration> configurations() const {
        std::vector<Configuration> out;
        for (const auto& t : targets) {
            Configuration c;
            for (double a : t.configuration_deg) c.angles.push_back(deg2rad(a));
            out.push_back(std::move(c));
        }
        return out;
    }
};

inline double round_to(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

/// Residuals and flags for `configs` on the problem's targets, as stored in a
/// solution document.
inline std::vector<TargetResult> evaluate_targets(const ProblemSpec& problem, const Design& design,
                                                  std::span<const Configuration> configs) {
    const auto targets = problem.base_frame_targets();
    const CostBreakdown cost = total_cost(design, configs, targets, problem.weights);
    const auto ok = check_feasibility(design, configs, targets, problem.weights, problem.tolerance,
                                      problem.constraints);
    std::vector<TargetResult> out;
    for (std::size_t j = 0; j < targets.size(); ++j) {
        TargetResult r;
        for (double a : configs[j].angles) r.configuration_deg.push_back(rad2deg(a));
        r.active_link = cost.per_target[j].best_link;
        r.feasible = ok[j];
        r.distance = cost.per_target[j].distance;
        r.orientation_error_deg = rad2deg(cost.per_target[j].orientation);
        r.weighted_cost = cost.per_target[j].weighted;
        out.push_back(std::move(r));
    }
    return out;
}

/// Builds the document for a solver result. Lengths are rounded to 0.1 mm
/// (what gets fabricated) and every residual is recomputed from the rounded
/// design, so the document is self-consistent.
inline SolutionDocument make_solution_document(const ProblemSpec& problem,
                                               const DesignSolution& solution) {
    SolutionDocument doc;
    doc.problem_hash = problem_hash(problem);
    doc.problem = problem;
    for (double l : solution.design.lengths)
        doc.lengths.push_back(std::clamp(round_to(l, 4), problem.constraints.link_min,
                                         problem.constraints.link_max));
    std::vector<Configuration> configs;
    for (const auto& c : solution.configurations) {
        Configuration deg_roundtrip;
        for (double a : c.angles) deg_roundtrip.angles.push_back(deg2rad(rad2deg(a)));
        configs.push_back(std::move(deg_roundtrip));
    }
    doc.targets = evaluate_targets(problem, doc.design(), configs);
    for (const auto& t : doc.targets) doc.total_cost += t.weighted_cost;
    doc.feasible = std::all_of(doc.targets.begin(), doc.targets.end(),
                               [](const TargetResult& t) { return t.feasible; });
    doc.trace.best_cost = solution.trace.best_cost;
    doc.trace.iterations = solution.trace.iterations;
    doc.trace.discarded_samples = solution.trace.discarded_samples;
    doc.trace.budget = solution.budget;
    doc.trace.seed = solution.seed;
    return doc;
}

inline Json to_json(const SolutionDocument& d) {
    Json j;
    j["problemHash"] = d.problem_hash;
    j["feasible"] = d.feasible;
    j["links"] = d.lengths.size();
    j["design"] = {{"lengths", d.lengths}};
    j["totalCost"] = d.total_cost;
    j["targets"] = Json::array();
    for (const auto& t : d.targets)
        j["targets"].push_back({{"configurationDegrees", t.configuration_deg},
                                {"activeLink", t.active_link},
                                {"feasible", t.feasible},
                                {"distance", t.distance},
                                {"orientationErrorDegrees", t.orientation_error_deg},
                                {"weightedCost", t.weighted_cost}});
    j["trace"] = {{"bestCost", d.trace.best_cost},
                  {"iterations", d.trace.iterations},
                  {"discardedSamples", d.trace.discarded_samples},
                  {"budget", d.trace.budget},
                  {"seed", d.trace.seed}};
    j["problem"] = to_json(d.problem);
    return j;
}

inline SolutionDocument solution_from_json(const Json& j) {
    SolutionDocument d;
    detail::FieldReader root(j, "");
    d.problem_hash = root.required<std::string>("problemHash");
    d.feasible = root.required<bool>("feasible");
    const auto links = root.required<std::size_t>("links");
    const Json* design = root.child("design");
    if (!design) throw ValidationError("is required", "design");
    detail::FieldReader dr(*design, "design");
    d.lengths = dr.required<std::vector<double>>("lengths");
    dr.finish();
    if (d.lengths.size() != links) throw ValidationError("does not match design.lengths", "links");
    if (d.lengths.empty()) throw ValidationError("design has no links", "design.lengths");
    d.total_cost = root.required<double>("totalCost");
    const Json* targets = root.child("targets");
    if (!targets || !targets->is_array()) throw ValidationError("must be an array", "targets");
    for (std::size_t i = 0; i < targets->size(); ++i) {
        const std::string path = "targets[" + std::to_string(i) + "]";
        detail::FieldReader t((*targets)[i], path);
        TargetResult r;
        r.configuration_deg = t.required<std::vector<double>>("configurationDegrees");
        if (r.configuration_deg.size() != links)
            throw ValidationError("length does not match the design", path + ".configurationDegrees");
        r.active_link = t.required<std::size_t>("activeLink");
        r.feasible = t.required<bool>("feasible");
        r.distance = t.required<double>("distance");
        r.orientation_error_deg = t.required<double>("orientationErrorDegrees");
        r.weighted_cost = t.required<double>("weightedCost");
        t.finish();
        d.targets.push_back(std::move(r));
    }
    if (const Json* tr = root.child("trace")) {
        detail::FieldReader t(*tr, "trace");
        d.trace.best_cost = t.required<double>("bestCost");
        d.trace.iterations = t.required<int>("iterations");
        d.trace.discarded_samples = t.required<std::size_t>("discardedSamples");
        d.trace.budget = t.required<std::size_t>("budget");
        d.trace.seed = t.required<std::uint64_t>("seed");
        t.finish();
    }
    const Json* problem = root.child("problem");
    if (!problem) throw ValidationError("is required", "problem");
    try {
        d.problem = problem_from_json(*problem);
    } catch (const ValidationError& e) {
        throw ValidationError(e.message(), e.field().empty() ? "problem" : "problem." + e.field());
    }
    root.finish();
    if (d.targets.size() != d.problem.targets.size())
        throw ValidationError("count does not match the embedded problem", "targets");
    return d;
}

inline std::string solution_text(const SolutionDocument& d) { return to_json(d).dump(2) + "\n"; }

inline void save_solution(const SolutionDocument& d, const std::filesystem::path& path) {
    write_text_file_atomic(path, solution_text(d));
}

inline SolutionDocument load_solution(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    return solution_from_json(parse_json_text(text, path.string()));
}

/// True when `j` looks like a solution document rather than a problem.
inline bool is_solution_json(const Json& j) { return j.is_object() && j.contains("problemHash"); }

}  // namespace vine
