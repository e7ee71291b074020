#include <doctest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>

#include "helpers.hpp"
#include "reacquire/formats.hpp"
#include "reacquire/image.hpp"

using namespace reacquire;
using namespace reacquire::io;
using doctest::Approx;

namespace {

std::string error_where(const std::function<void()>& f) {
    try {
        f();
    } catch (const FormatError& e) {
        return e.where();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("formats") {

TEST_CASE("instance round trip") {
    const search::SearchInstance inst({{"12", 7001, 0.25}, {"abc", 3, 1.0}}, 5000, 0.4, 0.01);
    const auto back = instance_from_json(parse_json(to_json(inst).dump(), "mem"));
    REQUIRE(back.size() == 2);
    CHECK(back.friend_at(0).id == "12");
    CHECK(back.friend_at(0).follower_count == 7001);
    CHECK(back.friend_at(0).phi == 0.25);
    CHECK(back.page_size() == 5000);
    CHECK(back.rho0() == 0.4);
    CHECK(back.rho_bar() == 0.01);

    const auto numeric = instance_from_json(json::parse(R"({"friends":[{"id":42,"followers":1,"phi":0.5}],
        "page_size":10,"rho0":1})"));
    CHECK(numeric.friend_at(0).id == "42");
}

TEST_CASE("instance errors name the field") {
    const auto bad_phi = json::parse(R"({"friends":[{"id":"a","followers":1,"phi":0.5},
        {"id":"b","followers":1,"phi":0.1},{"id":"c","followers":1,"phi":1.5}],"page_size":10,"rho0":1})");
    CHECK(error_where([&] { instance_from_json(bad_phi); }) == "friends[2].phi");
    const auto no_page = json::parse(R"({"friends":[{"id":"a","followers":1,"phi":0.5}],"rho0":1})");
    CHECK(error_where([&] { instance_from_json(no_page); }) == "page_size");
    const auto zero = json::parse(R"({"friends":[{"id":"a","followers":0,"phi":0.5}],"page_size":1,"rho0":1})");
    CHECK(error_where([&] { instance_from_json(zero); }) == "friends[0].followers");
    CHECK_THROWS_AS(parse_json("{", "x.json"), FormatError);
}

TEST_CASE("truth and policy report round trips") {
    const search::SearchInstance inst({{"a", 1, 0.5}, {"b", 2, 0.9}}, 1, 1.0);
    search::GroundTruth truth;
    truth.reconnected = {1};
    const auto t = truth_from_json(to_json(truth, inst), inst);
    CHECK(t.exists);
    CHECK(t.reconnected == std::set<std::size_t>{1});
    CHECK_THROWS(truth_from_json(json::parse(R"({"exists":true,"reconnected":["zz"]})"), inst));

    auto report = search::optimal_policy(inst);
    report.gamma_trace.back() = std::numeric_limits<double>::infinity();
    const auto j = to_json(report, inst);
    const auto back = policy_report_from_json(j, inst);
    CHECK(back.name == report.name);
    CHECK(back.policy == report.policy);
    CHECK(back.expected_cost == report.expected_cost);
    CHECK(std::isinf(back.gamma_trace.back()));
    CHECK(j.dump().find("\"inf\"") != std::string::npos);
}

TEST_CASE("sim report round trip") {
    const search::SearchInstance inst({{"a", 3, 0.5}, {"b", 2, 0.9}}, 1, 0.8);
    const auto rep = search::simulate(inst, search::optimal_policy(inst).policy, 500, 3);
    CHECK(sim_report_from_json(to_json(rep)) == rep);
}

TEST_CASE("model round trips") {
    const auto ref = from_match_model(similarity::MatchModel::reference());
    const auto back = to_match_model(model_from_json(to_json(ref)));
    CHECK(back.intercept == -8.05);
    CHECK(back.coefficients[1] == 7.05);
    CHECK(back.threshold == 0.782);

    StoredModel k;
    k.kind = "refollow";
    k.feature_names = {"x", "y"};
    learn::KernelModel km;
    km.support_points = Eigen::MatrixXd{{1.0, 2.0}, {-0.5, 1.0 / 3.0}};
    km.alphas = Eigen::Vector2d(0.1, -0.7);
    km.lambda = 1e-3;
    k.model = km;
    k.zscore = featurize::ZScoreStats{{1.0, 2.0}, {0.5, 0.0}};
    const auto kb = model_from_json(json::parse(to_json(k).dump()));
    const std::vector<double> x{0.3, 4.0};
    CHECK(kb.predict(x) == k.predict(x));
    CHECK_THROWS_AS(to_match_model(kb), FormatError);

    auto j = to_json(k);
    j["sign_convention"] = "p=sigmoid(-score)";
    CHECK(error_where([&] { model_from_json(j); }) == "sign_convention");
}

TEST_CASE("profiles, edges, accounts") {
    testing::TempDir dir("formats");
    {
        std::ofstream(dir.str("p.pgm"), std::ios::binary) << similarity::encode_pgm(similarity::GrayImage(8, 8, 9));
    }
    const std::string text =
        R"({"user_id":"1","screen_name":"a","name":"A","profile_picture":"p.pgm"})"
        "\n\n"
        R"({"user_id":2,"screen_name":"b","name":"B","profile_picture_hash":"ff","banner_picture_hash":"0"})"
        "\n";
    const auto profiles = parse_profiles(text, dir.path());
    REQUIRE(profiles.size() == 2);
    CHECK(profiles[0].profile_picture->bits == 0);
    CHECK_FALSE(profiles[0].banner_picture.has_value());
    CHECK(profiles[1].user_id == "2");
    CHECK(profiles[1].profile_picture->bits == 0xff);
    const auto again = parse_profiles(format_profiles(profiles), dir.path());
    CHECK(again[1].banner_picture == profiles[1].banner_picture);
    CHECK(error_where([&] { parse_profiles("{\"user_id\":\"1\"}\nnot json\n", dir.path()); }).starts_with("line"));

    const auto edges = parse_edges("follower_id,friend_id\n1,2\n3,2\n");
    CHECK(edges == std::vector<Edge>{{"1", "2"}, {"3", "2"}});
    CHECK(parse_edges(format_edges(edges)) == edges);
    CHECK(parse_edges("1,2\n").size() == 1);
    CHECK(error_where([&] { parse_edges("1,2\n3\n"); }) == "line 2");

    featurize::AccountSnapshot s;
    s.id = "9";
    s.followers_count = 12;
    s.protected_account = true;
    s.language = "fr";
    const auto accounts = parse_accounts(format_accounts({{s, false}}));
    REQUIRE(accounts.size() == 1);
    CHECK(accounts[0].snapshot.followers_count == 12);
    CHECK(accounts[0].snapshot.protected_account);
    CHECK(accounts[0].snapshot.language == "fr");
    CHECK_FALSE(accounts[0].active);

    const auto inter = parse_interactions("user0_id,friend_id,mentions,retweets,replies\n1,2,3,4,5\n");
    REQUIRE(inter.size() == 1);
    CHECK(inter[0].counts.replies == 5);
}

TEST_CASE("atomic writes create parents") {
    testing::TempDir dir("atomic");
    const auto path = dir.path() / "deep" / "x.txt";
    write_file_atomic(path, "hello");
    CHECK(read_file(path) == "hello");
    write_file_atomic(path, "bye");
    CHECK(read_file(path) == "bye");
    CHECK_THROWS(read_file(dir.path() / "missing"));
}

}  // TEST_SUITE
