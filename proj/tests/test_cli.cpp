#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& arguments)
{
    const std::string command = std::string(UDIFF_CLI) + " " + arguments + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("udiff-test-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("usage errors exit with 2")
{
    CHECK(run("") == 2);
    CHECK(run("frobnicate") == 2);
    CHECK(run("run") == 2);
    CHECK(run("report") == 2);
    CHECK(run("run a.ini --jobs many") == 2);
    CHECK(run("--help") == 0);
}

TEST_CASE("validate")
{
    CHECK(run(std::string("validate ") + UDIFF_CONFIGS + "/default.ini") == 0);
    CHECK(run(std::string("validate ") + UDIFF_CONFIGS + "/quick.ini") == 0);
    const auto dir = scratch("validate");
    std::ofstream(dir / "bad.ini") << "[run]\nsuites = nonsense\n";
    CHECK(run("validate " + (dir / "bad.ini").string()) == 2);
    CHECK(run("validate " + (dir / "missing.ini").string()) == 2);
}

TEST_CASE("run and report")
{
    const auto dir = scratch("run");
    std::ofstream(dir / "empty.ini") << "[run]\nsuites =\n";
    CHECK(run("run " + (dir / "empty.ini").string() + " --out " + (dir / "bundle").string()) == 0);
    CHECK(fs::exists(dir / "bundle" / "claims.csv"));
    CHECK(run("report " + (dir / "bundle").string()) == 0);
    CHECK(run("report " + (dir / "nowhere").string()) == 2);

    std::ofstream(dir / "lyap.ini") << "[params]\nN = 3\nalpha = 3\nbeta = 2\n[run]\nsuites = lyapunov\n";
    CHECK(run("run " + (dir / "lyap.ini").string() + " --seed 5 --jobs 2 --out " + (dir / "lyap").string()) == 0);
    CHECK(run("report " + (dir / "lyap").string()) == 0);

    fs::create_directories(dir / "failed");
    std::ofstream(dir / "failed" / "claims.csv") << "claim,suite,verdict,anchor,summary,evidence\n"
                                                 << "C1,lyapunov,fail,a,b,\n";
    CHECK(run("report " + (dir / "failed").string()) == 1);
}
