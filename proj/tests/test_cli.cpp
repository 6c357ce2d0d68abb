#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SWITCHBENCH_CLI
#error "SWITCHBENCH_CLI must name the switchbench executable"
#endif

namespace {

const std::string kCli = SWITCHBENCH_CLI;

int run(const std::string& args, const std::string& out = "cli_stdout.txt") {
    const std::string cmd = "\"" + kCli + "\" " + args + " > " + out + " 2> cli_stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

std::size_t count_data_rows(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::size_t rows = 0;
    std::getline(in, line);  // header
    while (std::getline(in, line)) rows += !line.empty() && line[0] != '#';
    return rows;
}

const char* kMinimal =
    "algorithm = bmfpl\nadversary = iid_bernoulli\nT = 1000\nn = 10\ndelta = 0.1\nreplications = 10\nseed = 1\n";

}  // namespace

TEST_CASE("run prints one row per replication") {
    write_file("cli_min.cfg", kMinimal);
    REQUIRE(run("run --config cli_min.cfg") == 0);
    const auto out = slurp("cli_stdout.txt");
    CHECK(out.rfind("run_id,algorithm,adversary,T,n,S,c,delta,seed,regret,switches,epochs\n", 0) == 0);
    CHECK(count_data_rows(out) == 10);
    CHECK(out.find("# mean_regret,") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
    write_file("cli_min.cfg", kMinimal);
    REQUIRE(run("run --config cli_min.cfg --jobs 1", "cli_a.txt") == 0);
    REQUIRE(run("run --config cli_min.cfg --jobs 8", "cli_b.txt") == 0);
    CHECK(slurp("cli_a.txt") == slurp("cli_b.txt"));
    REQUIRE(run("run --config cli_min.cfg --format json --out cli_c.json") == 0);
    REQUIRE(run("run --config cli_min.cfg --format json --out cli_d.json") == 0);
    CHECK(slurp("cli_c.json") == slurp("cli_d.json"));
}

TEST_CASE("seed precedence") {
    write_file("cli_min.cfg", kMinimal);
    REQUIRE(run("run --config cli_min.cfg --seed 7", "cli_flag.txt") == 0);
    REQUIRE(run("run --config cli_min.cfg", "cli_cfg.txt") == 0);
    CHECK(slurp("cli_flag.txt") != slurp("cli_cfg.txt"));
    const std::string env = "SWITCHBENCH_SEED=7 \"" + kCli + "\" run --config cli_min.cfg > cli_env.txt";
    REQUIRE(std::system(env.c_str()) == 0);
    CHECK(slurp("cli_env.txt") == slurp("cli_flag.txt"));
    const std::string both = "SWITCHBENCH_SEED=99 \"" + kCli + "\" run --config cli_min.cfg --seed 7 > cli_both.txt";
    REQUIRE(std::system(both.c_str()) == 0);
    CHECK(slurp("cli_both.txt") == slurp("cli_flag.txt"));
}

TEST_CASE("missing delta exits 2 and names the key") {
    write_file("cli_nodelta.cfg", "algorithm = bmfpl\nadversary = iid_bernoulli\nT = 100\nn = 4\n");
    CHECK(run("run --config cli_nodelta.cfg") == 2);
    CHECK(slurp("cli_stderr.txt").find("delta") != std::string::npos);
}

TEST_CASE("usage and I/O errors") {
    CHECK(run("") == 2);
    CHECK(run("run") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("run --config /nonexistent/x.cfg") == 3);
    write_file("cli_min.cfg", kMinimal);
    CHECK(run("run --config cli_min.cfg --out /nonexistent/dir/out.csv") == 3);
    CHECK(run("run --config cli_min.cfg --format xml") == 2);
}

TEST_CASE("sweep") {
    write_file("cli_sweep.cfg", "algorithm = capped_ftl\nadversary = iid_bernoulli\nT = 200\nn = 4\nS = 4\nreplications = 4\n");
    CHECK(run("sweep --config cli_sweep.cfg --param S --grid 2,4") == 2);
    CHECK(run("sweep --config cli_sweep.cfg --param S --grid 4,2,8") == 2);
    REQUIRE(run("sweep --config cli_sweep.cfg --param S --grid 2,4,8") == 0);
    const auto out = slurp("cli_stdout.txt");
    CHECK(out.find("# slope,") != std::string::npos);
    CHECK(count_data_rows(out) == 12);
}

TEST_CASE("verify") {
    CHECK(run("verify --suite binomial") == 0);
    CHECK(slurp("cli_stdout.txt").find("PASS") != std::string::npos);
    CHECK(run("verify --suite binomial --T 100 --r 1") == 0);
    CHECK(run("verify --suite binomial --T 100 --r 3") == 2);
    CHECK(run("verify --suite nope") == 2);
}

TEST_CASE("list") {
    REQUIRE(run("list") == 0);
    const auto out = slurp("cli_stdout.txt");
    for (const char* id : {"bmfpl", "bpr", "pfe_budget_high", "exp3p", "bcpr", "iid_bernoulli", "mrw", "follow_punisher"}) {
        CHECK(out.find(id) != std::string::npos);
    }
}
