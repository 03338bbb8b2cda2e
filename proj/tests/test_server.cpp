#include "vinedesign/server.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace vine;
using namespace std::chrono_literals;

namespace {

Json small_problem_json(std::uint64_t seed = 12) {
    ProblemSpec p;
    p.targets = {Target::from_degrees(0.6, 0.3, 10.0), Target::from_degrees(0.3, 0.6, 70.0)};
    p.search.samples = 64;
    p.search.iterations = 300;
    p.search.seed = seed;
    p.budget.restarts = 3;
    return to_json(p);
}

Json poll_until_finished(DesignService& service, const std::string& id,
                         std::vector<double>* progress = nullptr) {
    for (int i = 0; i < 6000; ++i) {
        const HttpResponse r = service.handle("GET", "/api/jobs/" + id, "");
        EXPECT_EQ(r.status, 200);
        if (progress) progress->push_back(r.body["progress"].get<double>());
        const std::string status = r.body["status"];
        if (status == "done" || status == "failed") return r.body;
        std::this_thread::sleep_for(10ms);
    }
    ADD_FAILURE() << "job " << id << " did not finish";
    return {};
}

}  // namespace

TEST(Api, Health) {
    DesignService service;
    const HttpResponse r = service.handle("GET", "/api/health", "");
    EXPECT_EQ(r.status, 200);
    EXPECT_EQ(r.body["status"], "ok");
    EXPECT_EQ(r.body["version"], kVersion);
}

TEST(Api, UnknownRouteAndJob) {
    DesignService service;
    EXPECT_EQ(service.handle("GET", "/api/nothing", "").status, 404);
    EXPECT_EQ(service.handle("DELETE", "/api/health", "").status, 404);
    const HttpResponse r = service.handle("GET", "/api/jobs/solve-999999", "");
    EXPECT_EQ(r.status, 404);
    EXPECT_TRUE(r.body.contains("error"));
}

TEST(Api, SolveValidationErrorsAre400WithField) {
    DesignService service;
    HttpResponse r = service.handle("POST", "/api/solve", R"({"targets": []})");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["field"], "targets");
    r = service.handle("POST", "/api/solve", R"({"targets": [{"x": 1, "y": 0}]})");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["field"], "targets[0].phiDegrees");
    EXPECT_EQ(service.handle("POST", "/api/solve", "{not json").status, 400);
    EXPECT_EQ(service.handle("POST", "/api/solve", "").status, 400);
}

TEST(Api, SolveIsSynchronousAndIdempotent) {
    DesignService service;
    const std::string body = small_problem_json().dump();
    const HttpResponse a = service.handle("POST", "/api/solve", body);
    ASSERT_EQ(a.status, 200) << a.body.dump();
    EXPECT_EQ(a.body["feasible"], true);
    EXPECT_EQ(a.body["seed"], 12);
    EXPECT_GE(a.body["links"].get<int>(), 2);
    const SolutionDocument doc = solution_from_json([&] {
        Json j = a.body;
        j.erase("seed");
        return j;
    }());
    EXPECT_TRUE(doc.feasible);
    const HttpResponse b = service.handle("POST", "/api/solve", body);
    EXPECT_EQ(a.body.dump(), b.body.dump());
}

TEST(Api, InfeasibleSolveIs422WithBestAttempt) {
    DesignService service;
    const std::string body = R"({"targets": [{"x": 10, "y": 10, "phiDegrees": 0}],
                                 "constraints": {"maxLinkBudget": 3},
                                 "search": {"iterations": 100, "restarts": 1, "seed": 4}})";
    const HttpResponse r = service.handle("POST", "/api/solve", body);
    EXPECT_EQ(r.status, 422);
    EXPECT_EQ(r.body["feasible"], false);
    EXPECT_GE(r.body["design"]["lengths"].size(), 2u);
    EXPECT_EQ(r.body["seed"], 4);
}

TEST(Api, SlowSolveFallsBackToAJob) {
    ServiceOptions o;
    o.solve_budget = 0ms;
    DesignService service(o);
    const HttpResponse r = service.handle("POST", "/api/solve", small_problem_json().dump());
    ASSERT_EQ(r.status, 202);
    const std::string id = r.body["jobId"];
    EXPECT_EQ(r.body["seed"], 12);
    const Json job = poll_until_finished(service, id);
    EXPECT_EQ(job["status"], "done");
    EXPECT_EQ(job["kind"], "solve");
    EXPECT_EQ(job["progress"], 1.0);
    EXPECT_EQ(job["result"]["feasible"], true);
}

TEST(Api, WorkspaceJobStreamsSamples) {
    DesignService service;
    const std::string body = R"({"design": {"lengths": [0.44, 0.17, 0.27, 0.10, 0.11]},
                                 "samples": 30, "seed": 3})";
    const HttpResponse r = service.handle("POST", "/api/workspace", body);
    ASSERT_EQ(r.status, 202) << r.body.dump();
    const std::string id = r.body["jobId"];
    EXPECT_EQ(r.body["seed"], 3);

    std::vector<double> progress;
    std::size_t seen = 0;
    std::set<std::size_t> indices;
    for (int i = 0; i < 6000; ++i) {
        const HttpResponse p = service.handle("GET", "/api/jobs/" + id, "", seen);
        ASSERT_EQ(p.status, 200);
        progress.push_back(p.body["progress"]);
        for (const auto& item : p.body["items"]) indices.insert(item["index"].get<std::size_t>());
        seen += p.body["items"].size();
        EXPECT_EQ(seen, p.body["itemCount"].get<std::size_t>());
        if (p.body["status"] == "done") {
            EXPECT_EQ(p.body["result"]["samples"], 30);
            const double rate = p.body["result"]["successRate"];
            EXPECT_GE(rate, 0.0);
            EXPECT_LE(rate, 1.0);
            break;
        }
        std::this_thread::sleep_for(5ms);
    }
    EXPECT_EQ(seen, 30u);
    EXPECT_EQ(indices.size(), 30u);
    for (std::size_t i = 1; i < progress.size(); ++i) EXPECT_GE(progress[i], progress[i - 1]);
    EXPECT_EQ(progress.back(), 1.0);
}

TEST(Api, WorkspaceValidation) {
    DesignService service;
    HttpResponse r = service.handle("POST", "/api/workspace", R"({"design": {"lengths": [0.5]}})");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["field"], "design.lengths");
    r = service.handle("POST", "/api/workspace",
                       R"({"design": {"lengths": [0.5, 0.5]}, "region": {"xMin": 2, "xMax": 1}})");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["field"], "region");
    r = service.handle("POST", "/api/workspace", R"({"design": {"lengths": [0.5, 5.0]}})");
    EXPECT_EQ(r.status, 400);
    r = service.handle("POST", "/api/workspace", R"({"design": {"lengths": [0.5, 0.5]}, "x": 1})");
    EXPECT_EQ(r.status, 400);
    EXPECT_EQ(r.body["field"], "x");
    r = service.handle("POST", "/api/workspace", R"({"design": {"lengths": [0.5, 0.5]}, "samples": 0})");
    EXPECT_EQ(r.status, 400);
}

TEST(Api, WorkspaceAcceptsASolutionDocument) {
    DesignService service;
    const HttpResponse solved = service.handle("POST", "/api/solve", small_problem_json().dump());
    ASSERT_EQ(solved.status, 200);
    Json solution = solved.body;
    solution.erase("seed");
    const Json body{{"solution", solution}, {"samples", 5}};
    const HttpResponse r = service.handle("POST", "/api/workspace", body.dump());
    ASSERT_EQ(r.status, 202) << r.body.dump();
    const Json job = poll_until_finished(service, r.body["jobId"]);
    EXPECT_EQ(job["status"], "done");
    EXPECT_EQ(job["result"]["design"]["lengths"], solution["design"]["lengths"]);
}

TEST(Api, TradeoffReturnsOneDocumentPerAngle) {
    DesignService service;
    const Json body{{"problem", small_problem_json()}, {"angles", {45, 20}}};
    const HttpResponse r = service.handle("POST", "/api/tradeoff", body.dump());
    ASSERT_EQ(r.status, 200) << r.body.dump();
    ASSERT_EQ(r.body.size(), 2u);
    EXPECT_EQ(r.body[0]["bendLimitDegrees"], 45);
    EXPECT_EQ(r.body[1]["bendLimitDegrees"], 20);
    EXPECT_EQ(r.body[0]["problem"]["constraints"]["jointAngleMax"], 45.0);
    EXPECT_EQ(r.body[1]["problem"]["constraints"]["jointAngleMin"], -20.0);
    EXPECT_EQ(r.body[0]["seed"], 12);

    EXPECT_EQ(service.handle("POST", "/api/tradeoff", R"({"angles": [30]})").status, 400);
    const Json no_angles{{"problem", small_problem_json()}, {"angles", Json::array()}};
    EXPECT_EQ(service.handle("POST", "/api/tradeoff", no_angles.dump()).status, 400);
    const Json bad_angle{{"problem", small_problem_json()}, {"angles", {-5}}};
    EXPECT_EQ(service.handle("POST", "/api/tradeoff", bad_angle.dump()).status, 400);
}

TEST(Api, FinishedJobsAreEvictedAfterTheirLifetime) {
    ServiceOptions o;
    o.job_ttl = 0s;
    DesignService service(o);
    const HttpResponse r = service.handle(
        "POST", "/api/workspace", R"({"design": {"lengths": [0.5, 0.5]}, "samples": 2})");
    ASSERT_EQ(r.status, 202);
    const std::string id = r.body["jobId"];
    // The first poll may race the worker; once done, the next lookup evicts it.
    for (int i = 0; i < 6000; ++i) {
        const HttpResponse p = service.handle("GET", "/api/jobs/" + id, "");
        if (p.status == 404) break;
        std::this_thread::sleep_for(5ms);
    }
    EXPECT_EQ(service.handle("GET", "/api/jobs/" + id, "").status, 404);
    EXPECT_EQ(service.job_count(), 0u);
}

TEST(JobRecord, StatusOnlyMovesForwardAndProgressNeverDrops) {
    JobRecord job("x", JobKind::workspace, 1);
    EXPECT_EQ(job.status(), JobStatus::pending);
    job.start();
    job.set_progress(0.5);
    job.set_progress(0.2);
    EXPECT_EQ(job.to_json()["progress"], 0.5);
    job.finish(Json{{"ok", true}});
    EXPECT_EQ(job.status(), JobStatus::done);
    job.start();
    job.fail("late");
    EXPECT_EQ(job.status(), JobStatus::done);
    EXPECT_EQ(job.to_json()["result"]["ok"], true);
    EXPECT_FALSE(job.to_json().contains("error"));
}

TEST(Http, RoutesCorsAndPreflight) {
    DesignService service;
    httplib::Server server;
    bind_routes(server, service, "http://localhost:5173");
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread listener([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    auto health = client.Get("/api/health");
    ASSERT_TRUE(health);
    EXPECT_EQ(health->status, 200);
    EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
    EXPECT_EQ(Json::parse(health->body)["status"], "ok");

    auto bad = client.Post("/api/solve", R"({"targets": []})", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    auto missing = client.Get("/api/jobs/nope");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);

    auto ws = client.Post("/api/workspace", R"({"design": {"lengths": [0.5, 0.5]}, "samples": 3})",
                          "application/json");
    ASSERT_TRUE(ws);
    EXPECT_EQ(ws->status, 202);
    const std::string id = Json::parse(ws->body)["jobId"];
    Json job;
    for (int i = 0; i < 6000; ++i) {
        auto res = client.Get("/api/jobs/" + id + "?since=0");
        ASSERT_TRUE(res);
        job = Json::parse(res->body);
        if (job["status"] == "done") break;
        std::this_thread::sleep_for(5ms);
    }
    EXPECT_EQ(job["status"], "done");
    EXPECT_EQ(job["items"].size(), 3u);

    auto pre = client.Options("/api/solve");
    ASSERT_TRUE(pre);
    EXPECT_EQ(pre->status, 204);
    EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

    server.stop();
    listener.join();
}
