#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#ifndef KIT_PATH
#define KIT_PATH "toledo_kit"
#endif
#ifndef FIXTURE_DIR
#define FIXTURE_DIR "tests/fixtures"
#endif

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct KitRun {
    int code = -1;
    std::string out;
};

KitRun kit(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + "\"" KIT_PATH "\" " + args + " 2>/dev/null";
    KitRun r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fx(const char* name) { return std::string("--in \"") + FIXTURE_DIR + "/" + name + "\""; }

json parse(const KitRun& r) { return json::parse(r.out); }

}  // namespace

TEST(Cli, Rho) {
    KitRun r = kit("rho " + fx("u11_elliptic.json"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NEAR(parse(r)["total"].get<double>(), 2.0 / 3.0, 1e-12);
    KitRun sp = kit("rho " + fx("sp2_parabolic.json"));
    ASSERT_EQ(sp.code, 0);
    EXPECT_NEAR(parse(sp)["total"].get<double>(), -1.0, 1e-12);
    EXPECT_EQ(parse(sp)["family"], "sp");
}

TEST(Cli, RotAndCocycle) {
    KitRun r = kit("rot " + fx("u11_elliptic.json"));
    ASSERT_EQ(r.code, 0);
    json j = parse(r);
    EXPECT_NEAR(j["rot_frac"].get<double>(), 1.0 / 3.0, 1e-12);
    double lift = j["rot_lift"].get<double>();
    EXPECT_NEAR(lift - std::floor(lift), 1.0 / 3.0, 1e-9);
    KitRun c = kit("cocycle " + fx("u1_a.json") + " " + fx("u1_b.json"));
    ASSERT_EQ(c.code, 0);
    EXPECT_EQ(parse(c)["sign"].get<int>(), -1);
    KitRun sweep = kit("cocycle --sweep 5 --p 1 --q 1 --seed 2");
    EXPECT_EQ(sweep.code, 0);
    EXPECT_TRUE(parse(sweep)["passed"].get<bool>());
}

TEST(Cli, ToledoSign) {
    KitRun r = kit("toledo-sign " + fx("sp2_pants.json"));
    ASSERT_EQ(r.code, 0);
    json j = parse(r);
    EXPECT_NEAR(j["toledo"].get<double>(), 1.0, 1e-8);
    EXPECT_EQ(j["signature"].get<int>(), 2);
    EXPECT_EQ(j["euler_characteristic"].get<int>(), -1);
    EXPECT_TRUE(j["sp2_bound"]["holds"].get<bool>());
    KitRun so = kit("toledo-sign " + fx("so2_sigma3.json"));
    ASSERT_EQ(so.code, 0);
    EXPECT_EQ(parse(so)["milnor_wood"]["signature_slack"].get<double>(), 0.0);
}

TEST(Cli, NormalForm) {
    KitRun r = kit("normal-form " + fx("u11_nilpotent.json"));
    ASSERT_EQ(r.code, 0);
    json j = parse(r);
    ASSERT_EQ(j["blocks"].size(), 1u);
    EXPECT_EQ(j["blocks"][0]["dim"].get<int>(), 2);
    EXPECT_EQ(j["rho"].get<int>(), -j["blocks"][0]["sign"].get<int>());
    KitRun lg = kit("normal-form --log " + fx("sp2_parabolic.json"));
    ASSERT_EQ(lg.code, 0);
    EXPECT_EQ(parse(lg)["blocks"][0]["dim"].get<int>(), 2);
}

TEST(Cli, Verify) {
    KitRun r = kit("verify horn --p 3 --samples 20");
    ASSERT_EQ(r.code, 0);
    json j = parse(r);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["checked"].get<int>(), 20);
    KitRun again = kit("verify horn --p 3 --samples 20");
    EXPECT_EQ(again.out, r.out);
    EXPECT_EQ(kit("verify no-such-suite").code, 1);
}

TEST(Cli, FormatsAndOutput) {
    KitRun t = kit("rho --format table " + fx("u11_elliptic.json"));
    ASSERT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("total  0.666"), std::string::npos) << t.out;
    fs::path out = fs::temp_directory_path() / "toledo_cli_out.json";
    KitRun f = kit("rho --out \"" + out.string() + "\" " + fx("u11_elliptic.json"));
    ASSERT_EQ(f.code, 0);
    EXPECT_TRUE(f.out.empty());
    std::ifstream in(out);
    EXPECT_NEAR(json::parse(in)["total"].get<double>(), 2.0 / 3.0, 1e-12);
    fs::remove(out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(kit("").code, 1);
    EXPECT_EQ(kit("rho --in /nonexistent.json").code, 1);
    EXPECT_EQ(kit("rho --family bogus " + fx("u11_elliptic.json")).code, 1);
    EXPECT_EQ(kit("rho --tol nope=1 " + fx("u11_elliptic.json")).code, 1);

    fs::path dir = fs::temp_directory_path();
    fs::path bad_member = dir / "toledo_not_member.json";
    std::ofstream(bad_member) << R"({"rows":2,"cols":2,"re":[2,0,0,2],"family":"u","p":1,"q":1})";
    EXPECT_EQ(kit("rho --in \"" + bad_member.string() + "\"").code, 2);

    fs::path bad_rel = dir / "toledo_bad_relation.json";
    json rep = json::parse(std::ifstream(std::string(FIXTURE_DIR) + "/sp2_pants.json"));
    rep["generators"]["c3"] = rep["generators"]["c1"];
    std::ofstream(bad_rel) << rep.dump();
    EXPECT_EQ(kit("toledo-sign --in \"" + bad_rel.string() + "\"").code, 5);

    // A gate this small cannot be met by floating point sums.
    EXPECT_EQ(kit("cocycle --tol gate=1e-300 " + fx("u1_a.json") + " " + fx("u1_b.json")).code, 4);
    EXPECT_EQ(kit("cocycle " + fx("u1_a.json") + " " + fx("u1_b.json"), "TOLEDO_KIT_TOL=gate=1e-300").code, 4);
    EXPECT_EQ(kit("cocycle --tol gate=0.1 " + fx("u1_a.json") + " " + fx("u1_b.json"), "TOLEDO_KIT_TOL=gate=1e-300").code, 0);
    fs::remove(bad_member);
    fs::remove(bad_rel);
}
