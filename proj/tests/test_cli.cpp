// integration tests driving the command line binary; the path is supplied by
// ctest through the OPVAL_BIN environment variable

#include <catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct run_result {
    int exit_code = -1;
    std::string out;
};

std::string binary() {
    const char* p = std::getenv("OPVAL_BIN");
    REQUIRE(p != nullptr);
    return p;
}

run_result run(const std::string& args) {
    const std::string cmd = binary() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    run_result r;
    std::array<char, 4096> buf{};
    size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("nc enumerate --n 0").exit_code == 2);
    CHECK(run("nc enumerate").exit_code == 2);
    CHECK(run("bogus-subcommand").exit_code == 2);
    CHECK(run("rdiag check --model no-such-file.json").exit_code == 2);
}

TEST_CASE("noncrossing enumeration output") {
    auto r = run("nc enumerate --n 5 --json");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdicts"]["count"] == 42);
    CHECK(j["verdicts"]["partitions"].size() == 42);

    auto sigma = run("nc sigma --word aaa*a*");
    REQUIRE(sigma.exit_code == 0);
    CHECK(sigma.out.find("[[1],[2,3],[4]]") != std::string::npos);

    auto rot = run("nc rotate --blocks [[1,2],[3,4,5]]");
    REQUIRE(rot.exit_code == 0);
    CHECK(rot.out.find("[[1,5],[2,3,4]]") != std::string::npos);
}

TEST_CASE("certificates drive the exit code") {
    CHECK(run("rdiag check --model builtin:nofreepolar --max-len 4 --mode word").exit_code == 0);
    CHECK(run("rdiag check --model nofreepolar --max-len 2 --mode m2 --depth 2").exit_code == 0);
    CHECK(run("rdiag check --model nofreepolar --mode cumulant --max-k 3").exit_code == 0);
    CHECK(run("circular trace-check --model nofreepolar --tau 1/2,1/2").exit_code == 0);
    CHECK(run("circular trace-check --model nofreepolar --tau 1,0").exit_code == 1);
    CHECK(run("rdiag beta-symmetry --model nofreepolar").exit_code == 1);
    CHECK(run("rdiag beta-symmetry --model scalar-circular:1").exit_code == 0);
    CHECK(run("rdiag theta-twist --model dt:4 --theta flip").exit_code == 0);

    // a family with a forbidden nonzero cumulant fails the word certificate
    const std::string path = "opval_cli_bad_model.json";
    std::ofstream f(path);
    f << R"({"algebra":{"dimension":1},"labels":["a","a_star"],"kind":"cumulants","max_order":6,
         "maps":[{"word":["a","a_star"],"tensor":[[1,1,0,1]]},
                 {"word":["a_star","a"],"tensor":[[1,1,0,1]]},
                 {"word":["a","a"],"tensor":[[1,1,0,1]]}]})";
    f.close();
    CHECK(run("rdiag check --model " + path + " --max-len 4 --mode word").exit_code == 1);
    CHECK(run("rdiag check --model " + path + " --max-len 2 --mode cumulant --max-k 1").exit_code ==
          1);
    std::remove(path.c_str());
}

TEST_CASE("appendix verification and reports are reproducible") {
    auto r = run("spectral verify-appendix");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("quartic identity holds to order 30: yes") != std::string::npos);
    CHECK(r.out.find("17985/64") != std::string::npos);
    CHECK(r.out.find("2.18942") != std::string::npos);

    auto a = run("spectral verify-appendix --json");
    auto b = run("spectral verify-appendix --json");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);  // byte-identical reports
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["verdicts"]["quartic_identity"] == true);
}

TEST_CASE("density subcommand writes artifacts") {
    const std::string csv = "opval_cli_density.csv", svg = "opval_cli_density.svg";
    auto r = run("spectral density --points 200 --eps 1e-6 --out " + csv + " --svg " + svg);
    REQUIRE(r.exit_code == 0);
    std::ifstream cf(csv);
    REQUIRE(cf.good());
    std::string header;
    std::getline(cf, header);
    CHECK(header == "t,density");
    int lines = 0;
    std::string line;
    while (std::getline(cf, line)) ++lines;
    CHECK(lines == 200);
    std::ifstream sf(svg);
    REQUIRE(sf.good());
    std::string svg_text((std::istreambuf_iterator<char>(sf)), std::istreambuf_iterator<char>());
    CHECK(svg_text.find("<polyline") != std::string::npos);
    std::remove(csv.c_str());
    std::remove(svg.c_str());
}

TEST_CASE("builtin models resolve everywhere") {
    CHECK(run("circular moments --model dt:2 --order 2").exit_code == 0);
    CHECK(run("circular moments --model scalar-circular:1 --order 3").exit_code == 0);
    CHECK(run("series fg --model nofreepolar --order 6 --trace").exit_code == 0);
    auto r = run("series fg --model nofreepolar --order 6 --trace");
    CHECK(r.out.find("17985/64") != std::string::npos);
    CHECK(run("rdiag obstruction --model nofreepolar").out.find("obstructed") !=
          std::string::npos);
    CHECK(run("spectral atom --t0 0").exit_code == 0);
    CHECK(run("spectral norm").exit_code == 0);
    CHECK(run("spectral discriminant").exit_code == 0);
    CHECK(run("spectral eliminate").exit_code == 0);
    CHECK(run("spectral puiseux").exit_code == 0);
}
