#include <catch2/catch_amalgamated.hpp>

#include "json.hpp"
#include "subprocess.hpp"

using testutil::hdcli_bin;
using testutil::run_command;

TEST_CASE("derive genus 1: counts and exact content") {
    const auto r = run_command(hdcli_bin() + " derive --genus 1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["schema"] == 1);
    CHECK(j["genus"] == 1);
    CHECK(j["fields"].size() == 3);
    CHECK(j["brackets"].size() == 3);
    CHECK(j["fields"]["L2"]["x[1,1]"] == "2/3*x[3,1] - 2*x[1,1]^2");
    CHECK(j["fields"]["L2"]["x[2,1]"] == "3*x[1,1]*x[2,1]");
    CHECK(j["fields"]["L2"]["x[3,1]"] == "3*x[2,1]^2 + 2*x[1,1]*x[3,1]");
    CHECK(j["brackets"]["L0,L2"]["L2"] == "2");
    CHECK(j["brackets"]["L1,L2"]["L1"] == "x[1,1]");
}

TEST_CASE("derive genus 2: counts") {
    const auto r = run_command(hdcli_bin() + " derive --genus 2");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["fields"].size() == 6);
    CHECK(j["brackets"].size() == 15);
}

TEST_CASE("pmap genus 1: polynomials and degrees") {
    const auto r = run_command(hdcli_bin() + " pmap --genus 1");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["lambda"]["4"] == "1/2*x[3,1] - 3*x[1,1]^2");
    CHECK(j["degrees"]["4"] == 2);
    CHECK(j["degrees"]["6"] == 3);
    CHECK(j["w"].empty());
}

TEST_CASE("kdv command") {
    const auto r = run_command(hdcli_bin() + " kdv 2 --format text");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("1/4*f(2) - 3/2*f(0)^2") != std::string::npos);
    const auto r1 = run_command(hdcli_bin() + " kdv 1");
    CHECK(nlohmann::json::parse(r1.output)["phi"] == "f(0)");
    const auto r3 = run_command(hdcli_bin() + " kdv 3 --embed --genus 2");
    const auto j3 = nlohmann::json::parse(r3.output);
    CHECK(j3["embedded"] == "1/4*x[3,3] + 1/8*x[2,1]^2 - 1/2*x[1,1]*x[3,1] + 5/2*x[1,1]^3");
    // beyond depth is rejected
    CHECK(run_command(hdcli_bin() + " kdv 9").exit_code != 0);
}

TEST_CASE("tangency command") {
    const auto r = run_command(hdcli_bin() + " tangency --genus 1 --method divisibility");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    REQUIRE(j["rows"].size() == 2);
    CHECK(j["rows"][0]["quotient"] == "12");
    CHECK(j["rows"][1]["quotient"] == "0");
    CHECK(j["all_pass"] == true);

    const auto rs = run_command(hdcli_bin() + " tangency --genus 3 --method sample --trials 10");
    REQUIRE(rs.exit_code == 0);
    const auto js = nlohmann::json::parse(rs.output);
    CHECK(js["rows"].size() == 60);  // 6 fields x 10 trials
    for (const auto& row : js["rows"]) CHECK(row["pass"] == true);

    // divisibility at genus 3 requires the flag
    CHECK(run_command(hdcli_bin() + " tangency --genus 3 --method divisibility").exit_code != 0);
}

TEST_CASE("verify genus 1 with numerics passes with exit code 0") {
    const auto r = run_command(hdcli_bin() + " verify --genus 1 --numeric");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["all_pass"] == true);
    bool saw_numeric = false;
    for (const auto& s : j["suites"]) {
        CHECK(s["pass"] == true);
        if (s["name"] == "numeric-fs") saw_numeric = true;
    }
    CHECK(saw_numeric);
}

TEST_CASE("verify --tamper L2 fails in the projectability suite (negative control)") {
    const auto r = run_command(hdcli_bin() + " verify --genus 1 --tamper L2");
    CHECK(r.exit_code != 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["all_pass"] == false);
    bool proj_failed = false;
    for (const auto& s : j["suites"])
        if (s["name"] == "projectability" && s["pass"] == false) proj_failed = true;
    CHECK(proj_failed);
}

TEST_CASE("numeric verification rejects genus > 1") {
    CHECK(run_command(hdcli_bin() + " verify --genus 2 --numeric").exit_code != 0);
}

TEST_CASE("genus guard and the experimental escape hatch") {
    CHECK(run_command(hdcli_bin() + " derive --genus 4").exit_code != 0);
    const auto r = run_command(hdcli_bin() + " pmap --genus 4 --experimental");
    REQUIRE(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.output);
    CHECK(j["validated"] == false);
    CHECK(j["lambda"].size() == 8);
}

TEST_CASE("latex output renders the classical notation") {
    const auto r = run_command(hdcli_bin() + " pmap --genus 1 --format latex");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("\\tfrac{1}{2}\\wp_{3;1} - 3\\wp_{1;1}^2") != std::string::npos);
}

TEST_CASE("determinism: identical config gives byte-identical output") {
    const auto a = run_command(hdcli_bin() + " derive --genus 1");
    const auto b = run_command(hdcli_bin() + " derive --genus 1");
    CHECK(a.output == b.output);
    const auto c = run_command(hdcli_bin() + " verify --genus 1 --seed 7");
    const auto d = run_command(hdcli_bin() + " verify --genus 1 --seed 7");
    CHECK(c.output == d.output);
}

TEST_CASE("golden regression: derive output for genus 1 and 2") {
    for (int g = 1; g <= 2; ++g) {
        const std::string golden_path = testutil::golden_dir() + "/derive_g" + std::to_string(g) + ".json";
        const std::string golden = testutil::read_file(golden_path);
        const auto r = run_command(hdcli_bin() + " derive --genus " + std::to_string(g));
        REQUIRE(r.exit_code == 0);
        CHECK(r.output == golden);
    }
}

TEST_CASE("--out writes a file identical to stdout output") {
    const std::string tmp = "/tmp/hdcli_out_test.json";
    const auto r = run_command(hdcli_bin() + " pmap --genus 1 --out " + tmp);
    REQUIRE(r.exit_code == 0);
    const auto direct = run_command(hdcli_bin() + " pmap --genus 1");
    CHECK(testutil::read_file(tmp) == direct.output);
}
