#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "reacquire/formats.hpp"

using namespace reacquire;
using testing::run_cli;
using testing::TempDir;

namespace {

void write(const std::filesystem::path& p, const std::string& s) { io::write_file_atomic(p, s); }

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string constant_refollow_model(double intercept) {
    io::StoredModel m;
    m.kind = "refollow";
    m.feature_names = featurize::refollow_feature_names();
    learn::LinearModel lin;
    lin.intercept = intercept;
    lin.coefficients = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.feature_names.size()));
    m.model = lin;
    return io::to_json(m).dump();
}

/// Two features, labels driven by the first with some overlap.
std::string training_csv(bool with_group, int rows = 120) {
    reacquire::SplitMix64 rng(99);
    std::string s = with_group ? "x,y,group,label\n" : "x,y,label\n";
    for (int r = 0; r < rows; ++r) {
        const double x = testing::uniform(rng, -1, 1);
        const double y = testing::uniform(rng, -1, 1);
        const int label = x + 0.6 * testing::uniform(rng, -1, 1) > 0 ? 1 : 0;
        s += std::to_string(x) + "," + std::to_string(y) + ",";
        if (with_group) s += std::to_string(r / 4) + ",";
        s += std::to_string(label) + "\n";
    }
    return s;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage and exit codes") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"bogus"}).code == 2);
    CHECK(run_cli({"--help"}).code == 0);
    CHECK(run_cli({"search"}).code == 2);
    const auto missing = run_cli({"search", "--instance", "/nonexistent/instance.json"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("error:") != std::string::npos);
}

TEST_CASE("match") {
    TempDir dir("cli-match");
    write(dir.path() / "p.jsonl",
          R"({"user_id":"1","screen_name":"Ahmes_Zirve__","name":"Ahmes Zirve","profile_picture_hash":"ff"})"
          "\n"
          R"({"user_id":"2","screen_name":"Ahmes__Zirve","name":"Ahmes Zirve","profile_picture_hash":"ff"})"
          "\n"
          R"({"user_id":"3","screen_name":"khalidbinalwale","name":"Abu Muslim"})"
          "\n"
          R"({"user_id":"4","screen_name":"profomar0","name":"prof"})"
          "\n");
    write(dir.path() / "empty.jsonl", "");
    const auto r = run_cli({"--workspace", dir.path().string(), "--format", "delimited", "match", "--profiles",
                            "p.jsonl", "--report", "out/match.json"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("0,Ahmes_Zirve__,1,Ahmes__Zirve,0.969") != std::string::npos);
    CHECK(r.out.find("khalidbinalwale,2") == std::string::npos);
    CHECK(r.out.find("profomar0") == std::string::npos);
    CHECK(std::filesystem::exists(dir.path() / "out" / "match.json"));

    const auto again = run_cli({"--workspace", dir.path().string(), "--format", "delimited", "match", "--profiles",
                                "p.jsonl"});
    CHECK(again.out == r.out);

    const auto e = run_cli({"--workspace", dir.path().string(), "match", "--profiles", "empty.jsonl"});
    CHECK(e.code == 0);
    CHECK(e.out.find("edges: 0") != std::string::npos);

    const auto sweep = run_cli({"--workspace", dir.path().string(), "--format", "delimited", "sweep", "--profiles",
                                "p.jsonl", "--grid", "0,0.5,1"});
    REQUIRE(sweep.code == 0);
    CHECK(sweep.out.find("\n0,6,") != std::string::npos);
}

TEST_CASE("train") {
    TempDir dir("cli-train");
    write(dir.path() / "d.csv", training_csv(false));
    write(dir.path() / "g.csv", training_csv(true));
    const std::vector<std::string> base{"--workspace", dir.path().string(), "--format", "delimited", "train"};

    auto args = base;
    args.insert(args.end(), {"--kind", "suspension", "--data", "d.csv", "--lambda", "0.1,1,1000000"});
    const auto a = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(std::filesystem::exists(dir.path() / "models" / "suspension.json"));
    CHECK(std::filesystem::exists(dir.path() / "reports" / "suspension_roc.csv"));
    CHECK(a.out.find("chosen_lambda,1000000") == std::string::npos);
    CHECK(run_cli(args).out == a.out);

    auto grouped = base;
    grouped.insert(grouped.end(), {"--kind", "refollow", "--data", "g.csv", "--group-split", "--lambda", "0.001"});
    const auto b = run_cli(grouped);
    REQUIRE(b.code == 0);
    CHECK(b.out.find("family,quadratic_kernel") != std::string::npos);
    const auto model = io::model_from_json(io::parse_json(io::read_file(dir.path() / "models" / "refollow.json"), "m"));
    CHECK(model.zscore.has_value());

    write(dir.path() / "one.csv", "x,label\n1,1\n2,1\n3,1\n4,1\n");
    auto one = base;
    one.insert(one.end(), {"--kind", "match", "--data", "one.csv"});
    const auto c = run_cli(one);
    CHECK(c.code == 1);
    CHECK(c.err.find("refused:") != std::string::npos);
}

TEST_CASE("instance") {
    TempDir dir("cli-instance");
    write(dir.path() / "model.json", constant_refollow_model(0.0));
    write(dir.path() / "edges.csv", "follower_id,friend_id\nu,10\nu,9\nu,p\nu,x\n9,u\n");
    write(dir.path() / "accounts.jsonl",
          R"({"id":"u","followers_count":5})"
          "\n"
          R"({"id":"10","followers_count":7001})"
          "\n"
          R"({"id":"9","followers_count":12})"
          "\n"
          R"({"id":"p","followers_count":12,"protected":true})"
          "\n");
    const auto r = run_cli({"--workspace", dir.path().string(), "--format", "delimited", "instance", "--user", "u",
                            "--edges", "edges.csv", "--accounts", "accounts.jsonl", "--model", "model.json",
                            "--page-size", "5000"});
    REQUIRE(r.code == 0);
    CHECK(r.out == "friend,followers,queries,phi\n9,12,1,0.5\n10,7001,2,0.5\n");
    const auto inst =
        io::instance_from_json(io::parse_json(io::read_file(dir.path() / "instances" / "u.json"), "i"));
    CHECK(inst.size() == 2);
    CHECK(inst.rho0() == 1.0);

    write(dir.path() / "edges2.csv", "u,p\n");
    const auto refused = run_cli({"--workspace", dir.path().string(), "instance", "--user", "u", "--edges",
                                  "edges2.csv", "--accounts", "accounts.jsonl", "--model", "model.json"});
    CHECK(refused.code == 1);
    CHECK(refused.err.find("private") != std::string::npos);
}

TEST_CASE("search and simulate") {
    TempDir dir("cli-search");
    write(dir.path() / "one.json", R"({"friends":[{"id":"a","followers":10,"phi":0.4}],"page_size":10,"rho0":1})");
    write(dir.path() / "two.json",
          R"({"friends":[{"id":"a","followers":1,"phi":0.1},{"id":"b","followers":1,"phi":0.9}],"page_size":1,"rho0":1})");
    const std::vector<std::string> base{"--workspace", dir.path().string(), "--format", "delimited"};

    auto one = base;
    one.insert(one.end(), {"search", "--instance", "one.json", "--policies", "optimal,greedy"});
    const auto r1 = run_cli(one);
    REQUIRE(r1.code == 0);
    CHECK(r1.out.find("optimal,0.6\n") != std::string::npos);
    CHECK(r1.out.find("greedy,0.6\n") != std::string::npos);

    auto ab = base;
    ab.insert(ab.end(), {"search", "--instance", "two.json", "--policies", "optimal", "--order", "a,b"});
    const auto r2 = run_cli(ab);
    REQUIRE(r2.code == 0);
    CHECK(r2.out.find("forced,0.99\n") != std::string::npos);
    CHECK(r2.out.find("optimal,0.1899999") != std::string::npos);

    auto sim = base;
    sim.insert(sim.end(), {"--seed", "5", "simulate", "--instance", "two.json", "--runs", "2000", "--out", "s.json"});
    const auto s1 = run_cli(sim);
    REQUIRE(s1.code == 0);
    CHECK(run_cli(sim).out == s1.out);
    const auto rep = io::sim_report_from_json(io::parse_json(io::read_file(dir.path() / "s.json"), "s"));
    CHECK(rep.runs == 2000);
    CHECK(std::abs(rep.mean_unsuccessful_queries - 0.19) <= 3 * rep.std_error + 1e-12);

    auto full = base;
    full.insert(full.end(), {"search", "--instance", "two.json", "--runs", "500", "--show-policy"});
    const auto f1 = run_cli(full);
    REQUIRE(f1.code == 0);
    CHECK(count_lines(f1.out) == 6);
    CHECK(run_cli(full).out == f1.out);

    auto bad = base;
    bad.insert(bad.end(), {"search", "--instance", "two.json", "--order", "a,a"});
    CHECK(run_cli(bad).code == 1);
}

}  // TEST_SUITE
