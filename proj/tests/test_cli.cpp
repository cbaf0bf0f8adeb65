#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// End-to-end checks of the command-line surface: flags, exit codes and
// output formats. The binary path arrives as the first program argument.

namespace {

std::string g_cli = "./lantern";

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string command = "'" + g_cli + "' " + args + " 2>/dev/null";
    CliResult result;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buffer{};
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.out.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    }
    return result;
}

std::size_t count_lines_starting(const std::string& text,
                                 const std::string& prefix) {
    std::size_t count = 0;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind(prefix, 0) == 0) {
            ++count;
        }
    }
    return count;
}

}  // namespace

TEST_CASE("mesh: OBJ record counts and parameter errors") {
    const auto obj = run_cli("mesh --n 4 --m 4 --a 1 --format obj");
    CHECK(obj.exit_code == 0);
    CHECK(count_lines_starting(obj.out, "v ") == 20);
    CHECK(count_lines_starting(obj.out, "f ") == 32);

    CHECK(run_cli("mesh --n 2 --m 1 --a 1").exit_code == 1);
    CHECK(run_cli("mesh --n 4 --m 4 --a -1").exit_code == 1);
    CHECK(run_cli("mesh --n 4096 --m 68719476736 --a 1").exit_code == 3);
    CHECK(run_cli("mesh --n 4 --m 4 --a 1 --format stl").exit_code == 1);
    CHECK(run_cli("mesh --m 4").exit_code == 1);  // missing required flag
}

TEST_CASE("mesh: JSON output parses with the documented keys") {
    const auto r = run_cli("mesh --n 4 --m 2 --a 1 --format json");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["params"]["n"] == 4);
    CHECK(j["params"]["m"] == 2);
    CHECK(j["vertices"].size() == 12);
    CHECK(j["triangles"].size() == 16);
}

TEST_CASE("limit: exit codes encode the verdict") {
    const auto jxi = run_cli("limit --schedule m=n^3 --a 1 --target jxi");
    CHECK(jxi.exit_code == 0);
    const auto wrong = run_cli("limit --schedule m=n^3 --a 1 --target ixk");
    CHECK(wrong.exit_code == 2);
    const auto mixture = run_cli(
        "limit --schedule m=c*n^2 --c-exp 0 --a 1 --target mixture");
    CHECK(mixture.exit_code == 0);

    CHECK(run_cli("limit --schedule m=n --i-min 5 --i-max 3").exit_code == 1);
    CHECK(run_cli("limit --schedule m=x").exit_code == 1);
    CHECK(run_cli("limit --schedule m=n --target mixture").exit_code == 1);
    // --c-exp must be spelled out for m=c*n^2
    CHECK(run_cli("limit --schedule m=c*n^2 --a 1").exit_code == 1);
    CHECK(run_cli("probe --schedule-a m=n --schedule-b m=c*n^2").exit_code ==
          1);

    SUBCASE("custom band counts") {
        const auto custom = run_cli(
            "limit --schedule custom --m-values 4,8,16 --i-min 2 --i-max 4 "
            "--target ixk");
        CHECK(custom.exit_code == 2);  // m=n-like sequence, far from settled
        std::stringstream ss(custom.out);
        std::string line;
        std::getline(ss, line);
        std::getline(ss, line);
        CHECK(line.rfind("2,4,4,", 0) == 0);
    }

    SUBCASE("csv header and row count") {
        const auto lines = [](const std::string& s) {
            std::vector<std::string> out;
            std::stringstream ss(s);
            std::string line;
            while (std::getline(ss, line)) {
                out.push_back(line);
            }
            return out;
        }(jxi.out);
        REQUIRE(lines.size() == 12);
        CHECK(lines[0] ==
              "i,n,m,b_xy,b_xz,b_yz,asym_b_xy,asym_b_xz,asym_b_yz,"
              "angle_to_prev_rad,angle_to_target_rad");
    }
}

TEST_CASE("limit: identical invocations produce identical bytes") {
    const std::string args =
        "limit --schedule m=c*n^2 --c-exp 1 --a 2 --target mixture";
    const auto first = run_cli(args);
    const auto second = run_cli(args);
    CHECK(first.out == second.out);
    CHECK(!first.out.empty());

    const auto json_first = run_cli(args + " --format json");
    const auto json_second = run_cli(args + " --format json");
    CHECK(json_first.out == json_second.out);
    CHECK(nlohmann::json::parse(json_first.out).is_object());
}

TEST_CASE("area: projected column appears only under --projected") {
    const auto bare = run_cli("area --schedule m=n --a 1 --i-max 6");
    CHECK(bare.exit_code == 0);
    CHECK(bare.out.find("i,n,m,area,projected_area\n") == 0);
    std::stringstream ss(bare.out);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) {
        CHECK(line.back() == ',');  // empty projected cell
    }

    const auto projected =
        run_cli("area --schedule m=n --a 1 --i-max 6 --projected");
    CHECK(projected.exit_code == 0);
    std::stringstream ps(projected.out);
    std::getline(ps, line);
    while (std::getline(ps, line)) {
        CHECK(line.back() != ',');
    }

    SUBCASE("json mirror parses") {
        const auto j = nlohmann::json::parse(
            run_cli("area --schedule m=n --a 1 --i-max 6 --format json").out);
        CHECK(j["rows"].size() == 5);
        CHECK(j["rows"][0]["projected_area"].is_null());
    }
}

TEST_CASE("projected sums are byte-identical across thread counts") {
    const std::string args =
        "area --schedule m=n --a 1 --i-max 8 --projected";
    const auto run_with_threads = [&](const char* threads) {
        std::string out;
        const std::string command = "OMP_NUM_THREADS=" +
                                    std::string(threads) + " '" + g_cli +
                                    "' " + args + " 2>/dev/null";
        FILE* pipe = popen(command.c_str(), "r");
        REQUIRE(pipe != nullptr);
        std::array<char, 4096> buffer{};
        std::size_t got = 0;
        while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
            out.append(buffer.data(), got);
        }
        pclose(pipe);
        return out;
    };
    const std::string one = run_with_threads("1");
    CHECK(!one.empty());
    CHECK(run_with_threads("2") == one);
    CHECK(run_with_threads("7") == one);
}

TEST_CASE("probe: verdict, separation and failure modes") {
    const auto same = run_cli("probe --schedule-a m=n --schedule-b m=n");
    CHECK(same.exit_code == 0);
    CHECK(same.out.find("verdict: AGREE") != std::string::npos);

    const auto differ =
        run_cli("probe --schedule-a m=n --schedule-b m=n^3 --format json");
    CHECK(differ.exit_code == 2);
    const auto j = nlohmann::json::parse(differ.out);
    CHECK(j["verdict"] == "DISAGREE");
    CHECK(j["report_a"]["cauchy_ok"] == true);

    // too few refinements to settle
    CHECK(run_cli("probe --schedule-a m=n --schedule-b m=n^3 --i-max 5")
              .exit_code == 4);
    CHECK(run_cli("probe --schedule-a m=n").exit_code == 1);
}

TEST_CASE("plot: structural SVG, bad ranges and unwritable paths") {
    namespace fs = std::filesystem;
    const fs::path svg_path = fs::temp_directory_path() / "lantern_plot.svg";
    const std::string args =
        "plot --schedule m=n --schedule m=n^3 --schedule m=c*n^2 --c-exp 0 "
        "--a 1 --i-min 2 --i-max 12 --target ixk --out " +
        svg_path.string();
    const auto r = run_cli(args);
    CHECK(r.exit_code == 0);
    std::ifstream in(svg_path);
    REQUIRE(in.good());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string svg = buffer.str();
    CHECK(count_lines_starting(svg, "<polyline") == 3);
    CHECK(svg.find("viewBox=\"0 0 800.00 500.00\"") != std::string::npos);

    SUBCASE("byte determinism on disk") {
        const fs::path again = fs::temp_directory_path() / "lantern_plot2.svg";
        run_cli("plot --schedule m=n --schedule m=n^3 --schedule m=c*n^2 "
                "--c-exp 0 --a 1 --i-min 2 --i-max 12 --target ixk --out " +
                again.string());
        std::ifstream in2(again);
        std::stringstream buffer2;
        buffer2 << in2.rdbuf();
        CHECK(buffer2.str() == svg);
        fs::remove(again);
    }
    fs::remove(svg_path);

    CHECK(run_cli("plot --schedule m=n --i-min 5 --i-max 5 --out x.svg")
              .exit_code == 1);
    CHECK(run_cli("plot --schedule m=n --out /nonexistent/dir/x.svg")
              .exit_code == 1);
    CHECK(run_cli("plot --schedule m=n").exit_code == 1);  // --out required
}

TEST_CASE("check-nesting: built-ins nest, tripled custom bands do not") {
    const auto mn = run_cli("check-nesting --schedule m=n --i-min 2 --i-max 6");
    CHECK(mn.exit_code == 0);
    CHECK(count_lines_starting(mn.out, "2,") == 1);

    const auto cubed =
        run_cli("check-nesting --schedule m=n^3 --i-min 2 --i-max 4");
    CHECK(cubed.exit_code == 0);

    const auto tripled = run_cli(
        "check-nesting --schedule custom --m-values 1,3,9,27,81 "
        "--i-min 2 --i-max 6");
    CHECK(tripled.exit_code == 2);
    CHECK(tripled.out.find("no") != std::string::npos);

    // custom list too short for the range
    CHECK(run_cli("check-nesting --schedule custom --m-values 1,2 "
                  "--i-min 2 --i-max 6")
              .exit_code == 1);

    // m = n^3 at i = 7 exceeds the mesh cap
    CHECK(run_cli("check-nesting --schedule m=n^3 --i-min 2 --i-max 7")
              .exit_code == 3);
}

int main(int argc, char** argv) {
    std::vector<char*> args;
    args.push_back(argv[0]);
    int start = 1;
    if (argc > 1 && argv[1][0] != '-') {
        g_cli = argv[1];
        start = 2;
    }
    for (int k = start; k < argc; ++k) {
        args.push_back(argv[k]);
    }
    doctest::Context context(static_cast<int>(args.size()), args.data());
    return context.run();
}
