#pragma once

// HTTP front end for the designer UI. DesignService holds the request logic and
// the in-memory job table; serve() binds it to cpp-httplib.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "vinedesign/io.hpp"
#include "vinedesign/version.hpp"

#include <httplib.h>

namespace vine {

enum class JobKind { solve, workspace, tradeoff };
enum class JobStatus { pending, running, done, failed };

inline const char* to_string(JobKind k) {
    switch (k) {
        case JobKind::solve: return "solve";
        case JobKind::workspace: return "workspace";
        case JobKind::tradeoff: return "tradeoff";
    }
    return "?";
}

inline const char* to_string(JobStatus s) {
    switch (s) {
        case JobStatus::pending: return "pending";
        case JobStatus::running: return "running";
        case JobStatus::done: return "done";
        case JobStatus::failed: return "failed";
    }
    return "?";
}

struct HttpResponse {
    int status = 200;
    Json body;
};

/// A job's externally visible state. Status only moves forward and progress
/// never decreases; both are guarded by the record's mutex.
class JobRecord {
public:
    JobRecord(std::string id, JobKind kind, std::uint64_t seed)
        : id_(std::move(id)), kind_(kind), seed_(seed), created_(std::chrono::steady_clock::now()) {}

    const std::string& id() const noexcept { return id_; }
    JobKind kind() const noexcept { return kind_; }
    std::chrono::steady_clock::time_point created() const noexcept { return created_; }

    void start() { advance(JobStatus::running); }

    void set_progress(double p) {
        std::lock_guard lock(mutex_);
        progress_ = std::max(progress_, std::clamp(p, 0.0, 1.0));
    }

    void append_item(Json item) {
        std::lock_guard lock(mutex_);
        items_.push_back(std::move(item));
    }

    void finish(Json result, int http_status = 200) {
        {
            std::lock_guard lock(mutex_);
            result_ = std::move(result);
            result_status_ = http_status;
            progress_ = 1.0;
        }
        advance(JobStatus::done);
    }

    void fail(std::string message) {
        {
            std::lock_guard lock(mutex_);
            error_ = std::move(message);
        }
        advance(JobStatus::failed);
    }

    JobStatus status() const {
        std::lock_guard lock(mutex_);
        return status_;
    }

    /// Blocks until the job leaves pending/running or `timeout` elapses.
    bool wait_finished(std::chrono::milliseconds timeout) const {
        std::unique_lock lock(mutex_);
        return changed_.wait_for(lock, timeout, [&] {
            return status_ == JobStatus::done || status_ == JobStatus::failed;
        });
    }

    int result_status() const {
        std::lock_guard lock(mutex_);
        return result_status_;
    }

    Json result() const {
        std::lock_guard lock(mutex_);
        return result_;
    }

    /// Items (e.g. workspace samples) from index `since` on, plus everything
    /// else a poller needs.
    Json to_json(std::size_t since = 0) const {
        std::lock_guard lock(mutex_);
        Json j;
        j["jobId"] = id_;
        j["kind"] = vine::to_string(kind_);
        j["status"] = vine::to_string(status_);
        j["progress"] = progress_;
        j["seed"] = seed_;
        j["itemCount"] = items_.size();
        Json items = Json::array();
        for (std::size_t i = since; i < items_.size(); ++i) items.push_back(items_[i]);
        j["items"] = std::move(items);
        if (status_ == JobStatus::done) j["result"] = result_;
        if (status_ == JobStatus::failed) j["error"] = error_;
        return j;
    }

private:
    void advance(JobStatus next) {
        {
            std::lock_guard lock(mutex_);
            if (status_ == JobStatus::done || status_ == JobStatus::failed) return;
            if (static_cast<int>(next) <= static_cast<int>(status_)) return;
            status_ = next;
        }
        changed_.notify_all();
    }

    std::string id_;
    JobKind kind_;
    std::uint64_t seed_;
    std::chrono::steady_clock::time_point created_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    JobStatus status_ = JobStatus::pending;
    double progress_ = 0.0;
    std::vector<Json> items_;
    Json result_;
    int result_status_ = 200;
    std::string error_;
};

struct ServiceOptions {
    std::chrono::milliseconds solve_budget{30000};
    std::chrono::seconds job_ttl{3600};
    int worker_threads = 0;  // per workspace job; 0 = hardware concurrency
};

class DesignService {
public:
    explicit DesignService(ServiceOptions options = {}) : options_(options) {}

    ~DesignService() {
        std::lock_guard lock(workers_mutex_);
        workers_.clear();  // joins
    }

    DesignService(const DesignService&) = delete;
    DesignService& operator=(const DesignService&) = delete;

    HttpResponse handle(const std::string& method, const std::string& path,
                        const std::string& body, std::size_t since = 0) {
        try {
            if (method == "GET" && path == "/api/health") return health();
            if (method == "POST" && path == "/api/solve") return solve(body);
            if (method == "POST" && path == "/api/workspace") return workspace(body);
            if (method == "POST" && path == "/api/tradeoff") return tradeoff(body);
            const std::string prefix = "/api/jobs/";
            if (method == "GET" && path.rfind(prefix, 0) == 0)
                return job(path.substr(prefix.size()), since);
            return error(404, "no route for " + method + " " + path);
        } catch (const ValidationError& e) {
            return error(400, e.what(), e.field());
        } catch (const std::invalid_argument& e) {
            return error(400, e.what());
        } catch (const std::exception& e) {
            return error(500, e.what());
        }
    }

    std::size_t job_count() const {
        std::lock_guard lock(jobs_mutex_);
        return jobs_.size();
    }

private:
    static HttpResponse error(int status, const std::string& message, const std::string& field = {}) {
        Json j{{"error", message}};
        if (!field.empty()) j["field"] = field;
        return {status, j};
    }

    static Json parse_body(const std::string& body) {
        if (body.empty()) throw ValidationError("request body is empty", "body");
        return parse_json_text(body, "body");
    }

    HttpResponse health() const {
        return {200, Json{{"status", "ok"}, {"version", kVersion}}};
    }

    std::shared_ptr<JobRecord> create_job(JobKind kind, std::uint64_t seed) {
        std::lock_guard lock(jobs_mutex_);
        evict_expired_locked();
        auto id = fmt::format("{}-{:06d}", to_string(kind), ++job_counter_);
        auto job = std::make_shared<JobRecord>(id, kind, seed);
        jobs_[id] = job;
        return job;
    }

    template <class Fn>
    void launch(const std::shared_ptr<JobRecord>& job, Fn&& fn) {
        std::lock_guard lock(workers_mutex_);
        std::erase_if(workers_, [](const Worker& w) { return w.finished->load(); });
        auto finished = std::make_shared<std::atomic<bool>>(false);
        std::jthread thread([job, finished, fn = std::forward<Fn>(fn)]() mutable {
            job->start();
            try {
                fn(*job);
            } catch (const std::exception& e) {
                job->fail(e.what());
            }
            finished->store(true);
        });
        workers_.push_back(Worker{std::move(finished), std::move(thread)});
    }

    void evict_expired_locked() {
        const auto now = std::chrono::steady_clock::now();
        for (auto it = jobs_.begin(); it != jobs_.end();) {
            const auto s = it->second->status();
            const bool finished = s == JobStatus::done || s == JobStatus::failed;
            if (finished && now - it->second->created() > options_.job_ttl)
                it = jobs_.erase(it);
            else
                ++it;
        }
    }

    static std::pair<Json, int> run_solve(const ProblemSpec& problem) {
        DesignSearchOptions o;
        o.restarts = problem.budget.restarts;
        const DesignSolution s =
            design_search(problem.base_frame_targets(), problem.constraints, problem.weights,
                          problem.tolerance, problem.search, o);
        const SolutionDocument doc = make_solution_document(problem, s);
        Json j = to_json(doc);
        j["seed"] = problem.search.seed;
        return {j, doc.feasible ? 200 : 422};
    }

    HttpResponse solve(const std::string& body) {
        const ProblemSpec problem = problem_from_json(parse_body(body));
        auto job = create_job(JobKind::solve, problem.search.seed);
        launch(job, [problem](JobRecord& j) {
            auto [result, status] = run_solve(problem);
            j.finish(std::move(result), status);
        });
        if (job->wait_finished(options_.solve_budget)) {
            if (job->status() == JobStatus::failed) return {500, job->to_json()};
            return {job->result_status(), job->result()};
        }
        return {202, Json{{"jobId", job->id()}, {"seed", problem.search.seed}}};
    }

    // Body: {"design": {"lengths": [...]}} or {"solution": <solution doc>},
    // optional "problem" (for constraints/weights/tolerance/search), "region",
    // "samples", "seed".
    HttpResponse workspace(const std::string& body) {
        const Json j = parse_body(body);
        if (!j.is_object()) throw ValidationError("must be an object", "body");
        for (auto it = j.begin(); it != j.end(); ++it) {
            static const std::set<std::string> known = {"design", "solution", "problem",
                                                        "region", "samples", "seed"};
            if (!known.count(it.key())) throw ValidationError("unknown field", it.key());
        }
        ProblemSpec problem;
        Design design;
        if (j.contains("solution")) {
            const SolutionDocument doc = solution_from_json(j["solution"]);
            problem = doc.problem;
            design = doc.design();
        }
        if (j.contains("problem")) problem = problem_from_json(j["problem"]);
        if (j.contains("design")) {
            detail::FieldReader d(j["design"], "design");
            design.lengths = d.required<std::vector<double>>("lengths");
            d.finish();
        }
        if (design.links() < 2) throw ValidationError("need at least 2 link lengths", "design.lengths");
        for (double l : design.lengths)
            if (!(l >= problem.constraints.link_min && l <= problem.constraints.link_max))
                throw ValidationError("length outside the link-length constraints", "design.lengths");

        WorkspaceRegion region;
        if (j.contains("region")) region = region_from_json(j["region"]);
        region.validate();
        WorkspaceOptions wo;
        wo.samples = j.value("samples", std::size_t{1000});
        if (wo.samples < 1 || wo.samples > 100000)
            throw ValidationError("must be in [1, 100000]", "samples");
        wo.threads = options_.worker_threads;
        const std::uint64_t seed = j.value("seed", problem.search.seed);

        auto job = create_job(JobKind::workspace, seed);
        launch(job, [problem, design, region, wo, seed](JobRecord& rec) mutable {
            std::atomic<std::size_t> done{0};
            const std::size_t total = wo.samples;
            wo.on_sample = [&rec, &done, total](std::size_t index, const WorkspaceSample& s) {
                rec.append_item(sample_json(index, s));
                rec.set_progress(static_cast<double>(++done) / static_cast<double>(total));
            };
            const WorkspaceResult r =
                workspace_analysis(design, region, problem.constraints, problem.weights,
                                   problem.tolerance, problem.search, seed, wo);
            rec.finish(Json{{"successRate", r.success_rate},
                            {"samples", r.samples.size()},
                            {"design", {{"lengths", design.lengths}}}});
        });
        return {202, Json{{"jobId", job->id()}, {"seed", seed}}};
    }

    // Body: {"problem": <problem>, "angles": [15, 30, 45]}; each angle sets a
    // symmetric bend limit.
    HttpResponse tradeoff(const std::string& body) {
        const Json j = parse_body(body);
        detail::FieldReader r(j, "");
        const Json* pj = r.child("problem");
        if (!pj) throw ValidationError("is required", "problem");
        const ProblemSpec problem = problem_from_json(*pj);
        const auto angles = r.required<std::vector<double>>("angles");
        r.finish();
        if (angles.empty()) throw ValidationError("need at least one angle", "angles");
        for (double a : angles)
            if (!(a > 0.0 && a <= 180.0)) throw ValidationError("must be in (0, 180]", "angles");

        Json out = Json::array();
        for (double a : angles) {
            ProblemSpec variant = problem;
            variant.constraints.joint_min_deg = -a;
            variant.constraints.joint_max_deg = a;
            auto [doc, status] = run_solve(variant);
            doc["bendLimitDegrees"] = a;
            out.push_back(std::move(doc));
        }
        return {200, out};
    }

    HttpResponse job(const std::string& id, std::size_t since) {
        std::shared_ptr<JobRecord> rec;
        {
            std::lock_guard lock(jobs_mutex_);
            evict_expired_locked();
            auto it = jobs_.find(id);
            if (it == jobs_.end()) return error(404, "unknown job " + id);
            rec = it->second;
        }
        return {200, rec->to_json(since)};
    }

public:
    static WorkspaceRegion region_from_json(const Json& j) {
        detail::FieldReader r(j, "region");
        WorkspaceRegion g;
        g.x_min = r.optional<double>("xMin").value_or(g.x_min);
        g.x_max = r.optional<double>("xMax").value_or(g.x_max);
        g.y_min = r.optional<double>("yMin").value_or(g.y_min);
        g.y_max = r.optional<double>("yMax").value_or(g.y_max);
        g.phi_min_deg = r.optional<double>("phiMin").value_or(g.phi_min_deg);
        g.phi_max_deg = r.optional<double>("phiMax").value_or(g.phi_max_deg);
        r.finish();
        return g;
    }

    static Json sample_json(std::size_t index, const WorkspaceSample& s) {
        Json q = Json::array();
        for (double a : s.configuration.angles) q.push_back(rad2deg(a));
        return Json{{"index", index},
                    {"x", s.target.position.x()},
                    {"y", s.target.position.y()},
                    {"phi", s.target.orientation_degrees()},
                    {"feasible", s.feasible},
                    {"activeLink", s.active_link},
                    {"configurationDegrees", q}};
    }

private:
    ServiceOptions options_;
    mutable std::mutex jobs_mutex_;
    std::map<std::string, std::shared_ptr<JobRecord>> jobs_;
    std::uint64_t job_counter_ = 0;
    struct Worker {
        std::shared_ptr<std::atomic<bool>> finished;
        std::jthread thread;
    };
    std::mutex workers_mutex_;
    std::vector<Worker> workers_;
};

/// Registers the service's routes (with CORS) on an httplib server.
inline void bind_routes(httplib::Server& server, DesignService& service,
                        const std::string& cors_origin = "*") {
    auto reply = [&service, cors_origin](const httplib::Request& req, httplib::Response& res) {
        std::size_t since = 0;
        if (req.has_param("since")) {
            try {
                since = std::stoul(req.get_param_value("since"));
            } catch (const std::exception&) {
                since = 0;
            }
        }
        const HttpResponse r = service.handle(req.method, req.path, req.body, since);
        res.status = r.status;
        res.set_header("Access-Control-Allow-Origin", cors_origin);
        res.set_content(r.body.dump(), "application/json");
    };
    server.Get("/api/health", reply);
    server.Get(R"(/api/jobs/.*)", reply);
    server.Post("/api/solve", reply);
    server.Post("/api/workspace", reply);
    server.Post("/api/tradeoff", reply);
    server.Options(R"(/api/.*)", [cors_origin](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", cors_origin);
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });
}

}  // namespace vine
