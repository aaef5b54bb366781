// End-to-end checks of the command-line surface: exit codes, file outputs,
// and byte-stable reports. Each case shells out to the built binary.

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const auto out_path = fs::temp_directory_path() / "revcont_cli_out.txt";
    const std::string cmd = env + " " + std::string(REVCONT_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream f(out_path);
    std::stringstream ss;
    ss << f.rdbuf();
    res.output = ss.str();
    return res;
}

fs::path work_dir() {
    const auto dir = fs::temp_directory_path() / "revcont_cli_work";
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("examples then rev reproduces the constant-valuation revenue") {
    const auto dir = work_dir();
    const auto ex = run_cli("examples --out " + dir.string());
    REQUIRE(ex.exit_code == 0);

    const auto rev = run_cli("rev --dist " + (dir / "const12.json").string());
    CHECK(rev.exit_code == 0);
    CHECK(std::stod(rev.output) == doctest::Approx(3.0).epsilon(1e-9));

    // The emitted index carries the analytic values.
    const auto index = nlohmann::json::parse(read_file(dir / "examples_index.json"));
    CHECK(index["prohorov_gap"]["rev_x"] == 1.0);
    CHECK(index["no_lipschitz"]["w"] == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("rev mechanism classes and spaces") {
    const auto dir = work_dir();
    run_cli("examples --out " + dir.string());
    const auto dist = (dir / "const12.json").string();

    CHECK(std::stod(run_cli("rev --dist " + dist + " --class srev").output) ==
          doctest::Approx(3.0).epsilon(1e-9));
    CHECK(std::stod(run_cli("rev --dist " + dist + " --class brev").output) ==
          doctest::Approx(3.0).epsilon(1e-9));
    CHECK(std::stod(run_cli("rev --dist " + dist + " --class drev").output) ==
          doctest::Approx(3.0).epsilon(1e-9));
    // Unit demand can sell only one good; the constant (1,2) type pays 2.
    CHECK(std::stod(run_cli("rev --dist " + dist + " --space unit_demand").output) ==
          doctest::Approx(2.0).epsilon(1e-9));

    const auto bad_class = run_cli("rev --dist " + dist + " --class nope");
    CHECK(bad_class.exit_code == 1);
}

TEST_CASE("wasserstein of a file with itself is zero") {
    const auto dir = work_dir();
    run_cli("examples --out " + dir.string());
    const auto a = (dir / "sharp_equality_x.json").string();
    const auto res = run_cli("wasserstein --x " + a + " --y " + a);
    CHECK(res.exit_code == 0);
    CHECK(std::stod(res.output) == 0.0);

    const auto plan_path = dir / "plan.json";
    run_cli("wasserstein --x " + a + " --y " + (dir / "sharp_equality_y.json").string() +
            " --plan " + plan_path.string());
    const auto plan = nlohmann::json::parse(read_file(plan_path));
    CHECK(plan["cost"] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("discount rewrites menu prices") {
    const auto dir = work_dir();
    const auto menu_path = dir / "menu.json";
    {
        std::ofstream f(menu_path);
        f << R"({"space": "additive", "entries": [{"q": [1.0], "s": 1.0}]})";
    }
    const auto out_path = dir / "menu_discounted.json";
    const auto res = run_cli("discount --menu " + menu_path.string() + " --eta 0.02 --out " +
                             out_path.string());
    REQUIRE(res.exit_code == 0);
    const auto menu = nlohmann::json::parse(read_file(out_path));
    CHECK(menu["entries"][0]["s"] == doctest::Approx(0.98).epsilon(1e-15));

    CHECK(run_cli("discount --menu " + menu_path.string() + " --eta 1.5").exit_code == 1);
}

TEST_CASE("verify exits clean and writes deterministic CSV") {
    const auto dir = work_dir();
    const auto csv1 = dir / "report1.csv";
    const auto csv2 = dir / "report2.csv";
    const auto res1 = run_cli("verify --suite sqrt --count 12 --seed 7 --out " + csv1.string());
    const auto res2 = run_cli("verify --suite sqrt --count 12 --seed 7 --out " + csv2.string());
    CHECK(res1.exit_code == 0);
    CHECK(read_file(csv1) == read_file(csv2));

    std::stringstream body(read_file(csv1));
    std::string line;
    std::getline(body, line);
    CHECK(line == "suite,instance_digest,lhs,rhs,slack,holds");
    int rows = 0;
    while (std::getline(body, line))
        if (!line.empty()) {
            ++rows;
            CHECK(line.find("false") == std::string::npos);
        }
    CHECK(rows == 12);
}

TEST_CASE("verify sqrt at production scale: 2000 instances, zero violations") {
    const auto dir = work_dir();
    const auto csv = dir / "sqrt2000.csv";
    const auto res = run_cli("verify --suite sqrt --count 2000 --seed 7 --out " + csv.string());
    CHECK(res.exit_code == 0);

    std::stringstream body(read_file(csv));
    std::string line;
    std::getline(body, line);
    int rows = 0;
    bool any_false = false;
    while (std::getline(body, line))
        if (!line.empty()) {
            ++rows;
            if (line.find("false") != std::string::npos) any_false = true;
        }
    CHECK(rows == 2000);
    CHECK(!any_false);
}

TEST_CASE("verify honors REVCONT_TOL and gates with exit code 2") {
    // An absurd negative tolerance turns every slack into a violation, which
    // must surface as the dedicated exit code.
    const auto res = run_cli("verify --suite sqrt --count 3 --seed 5", "REVCONT_TOL=-1e9");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("VIOLATION") != std::string::npos);
}

TEST_CASE("learn pipeline produces a report file") {
    const auto dir = work_dir();
    const auto target = dir / "target.json";
    {
        std::ofstream f(target);
        f << R"({"k": 2, "support": [[1,1],[1,2],[2,1],[2,2]], "probs": [0.25,0.25,0.25,0.25]})";
    }
    const auto out = dir / "learn.json";
    const auto res = run_cli("learn --target " + target.string() +
                             " --n 500 --eps 0.2 --seed 3 --out " + out.string());
    REQUIRE(res.exit_code == 0);
    const auto rep = nlohmann::json::parse(read_file(out));
    CHECK(rep["n"] == 500);
    CHECK(rep["rev_target"].get<double>() > 0.0);
    CHECK(rep["regret"].get<double>() ==
          doctest::Approx(rep["rev_target"].get<double>() - rep["rev_achieved"].get<double>())
              .epsilon(1e-12));
}

TEST_CASE("parse failures exit with code 1, help with 0") {
    CHECK(run_cli("bogus-command").exit_code == 1);
    CHECK(run_cli("rev").exit_code == 1);  // missing --dist
    CHECK(run_cli("verify --suite nope --count 1").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
}

TEST_CASE("validation failures exit with code 1") {
    const auto dir = work_dir();
    const auto bad = dir / "bad.json";
    {
        std::ofstream f(bad);
        f << R"({"k": 1, "support": [[1.0]], "probs": [0.5]})";  // mass 0.5
    }
    CHECK(run_cli("rev --dist " + bad.string()).exit_code == 1);
    CHECK(run_cli("rev --dist /nonexistent.json").exit_code == 1);
    CHECK(run_cli("wasserstein --x " + bad.string() + " --y " + bad.string()).exit_code == 1);
}
