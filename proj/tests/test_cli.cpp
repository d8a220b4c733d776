#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chatq/csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("chatq_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path spec_file(const std::string& name, const std::string& text) {
    const auto p = scratch() / name;
    chatq::write_text_file(p.string(), text);
    return p;
}

Run run(const std::string& args) {
    const auto out = scratch() / "stdout.txt";
    const auto err = scratch() / "stderr.txt";
    const std::string cmd = std::string(CHATQ_CLI) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

} // namespace

TEST_CASE("validate reports C1 on a cyclic graph") {
    const auto p = spec_file("cyclic.spec",
                             "N = 3\ntopology = custom\nbudget = 12\n"
                             "edge = 1 2 cells=2\nedge = 2 3 cells=2\nedge = 3 1 cells=2\n");
    const auto r = run("validate " + p.string());
    CHECK(r.code == 1);
    CHECK(r.out.find("C1") != std::string::npos);
}

TEST_CASE("validate accepts the serial chain") {
    const auto p = spec_file("chain.spec", "N = 4\nbudget = 16\nchat_rate = 1\n");
    const auto r = run("validate " + p.string());
    CHECK(r.code == 0);
}

TEST_CASE("predict on the no-chat fixed-rate network") {
    const auto p = spec_file("nochat.spec", "N = 4\nregime = fixed-rate\nbudget = 16\n");
    const auto r = run("predict " + p.string());
    REQUIRE(r.code == 0);
    const auto at = r.out.find("total = ");
    REQUIRE(at != std::string::npos);
    const double total = std::stod(r.out.substr(at + 8));
    CHECK(total == doctest::Approx(1.6276e-4).epsilon(1e-4));
}

TEST_CASE("regime flag overrides the spec file") {
    const auto p = spec_file("nochat_ec.spec", "N = 4\nregime = fixed-rate\nbudget = 16\n");
    const auto r = run("predict " + p.string() + " --regime entropy-constrained");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("entropy-constrained") != std::string::npos);
}

TEST_CASE("simulate is deterministic") {
    const auto p = spec_file("sim.spec", "N = 3\nbudget = 12\nchat_rate = 1\n");
    const auto a = run("simulate " + p.string() + " --trials 1000 --seed 7");
    const auto b = run("simulate " + p.string() + " --trials 1000 --seed 7 --workers 2");
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("replay_mismatches,0") != std::string::npos);
    const auto c = run("simulate " + p.string() + " --trials 1000 --seed 8");
    CHECK(c.out != a.out);
}

TEST_CASE("malformed spec names the line and key") {
    const auto p = spec_file("bad.spec", "N = 4\nbudget = lots\n");
    const auto r = run("predict " + p.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2: key 'budget'") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    const auto p = spec_file("u.spec", "N = 2\nbudget = 8\n");
    CHECK(run("simulate " + p.string() + " --decoder psychic").code == 2);
    CHECK(run("simulate " + p.string() + " --trials 0").code == 2);
}

TEST_CASE("help enumerates the flags") {
    const auto r = run("simulate --help");
    CHECK(r.code == 0);
    for (const char* flag : {"--trials", "--seed", "--decoder", "--workers", "--placement", "--regime", "--out"}) {
        CHECK(r.out.find(flag) != std::string::npos);
    }
}

TEST_CASE("allocate, design and sweeps run") {
    const auto p = spec_file("small.spec", "N = 3\nbudget = 12\nchat_rate = 1\n");
    const auto a = run("allocate " + p.string());
    CHECK(a.code == 0);
    CHECK(a.out.find("link,message,alpha,b,rate") != std::string::npos);
    CHECK(run("design " + p.string()).out.find("sensor 3 message 2") != std::string::npos);
    const auto rc = run("sweep-rc -N 3 --chat-rates 0 1");
    CHECK(rc.code == 0);
    CHECK(rc.out.rfind("N,alpha_c,R_c", 0) == 0);
    const auto p1 = run("sweep-p1 -N 2 --p1 0.3 0.5 --regime entropy-constrained");
    CHECK(p1.code == 0);
    CHECK(p1.out.find("\n2,0.5") != std::string::npos);
    const auto out = scratch() / "alloc.csv";
    CHECK(run("allocate " + p.string() + " --out " + out.string()).code == 0);
    CHECK(slurp(out).find("link,message") != std::string::npos);
}

TEST_CASE("infeasible designs exit 3") {
    const auto p = spec_file("dear.spec", "N = 4\nbudget = 2\nchat_rate = 3\nchat_cost = 1\n");
    CHECK(run("allocate " + p.string()).code == 3);
}
