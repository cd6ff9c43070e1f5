#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

// Integration tests drive the installed binary the way a user would. The
// build passes the binary location in QDSPIN_CLI_PATH.

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string(QDSPIN_CLI_PATH) + " " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (const char c : text)
        if (c == '\n') ++n;
    return n;
}

double value_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size()));
}

} // namespace

TEST_CASE("cli: steady prints the stationary fidelity") {
    const auto res = run_cli("steady --omega-ghz 0.5 --gamma-ghz 10");
    CHECK(res.exit_code == 0);
    const double fid = value_after(res.output, "fidelity = ");
    CHECK(fid == Catch::Approx(0.973).margin(0.003));
}

TEST_CASE("cli: init-time reports the crossing and the speed") {
    const auto res = run_cli("init-time --omega-ghz 0.5 --gamma-ghz 10");
    CHECK(res.exit_code == 0);
    const double t = value_after(res.output, "t_init_ns = ");
    const double speed = value_after(res.output, "speed_ghz = ");
    CHECK(t == Catch::Approx(0.52).margin(0.01));
    CHECK(speed == Catch::Approx(0.32).epsilon(0.10));
}

TEST_CASE("cli: init-time reports UNREACHABLE with exit code 0") {
    const auto res = run_cli("init-time --omega-ghz 3 --gamma-ghz 10");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("UNREACHABLE") != std::string::npos);
}

TEST_CASE("cli: evolve emits one row per sample") {
    const auto res = run_cli("evolve --omega-ghz 0.5 --gamma-ghz 10 --t-max-ns 1 --samples 5");
    CHECK(res.exit_code == 0);
    CHECK(count_lines(res.output) == 6); // header + 5 rows
    CHECK(res.output.rfind("t_ns,p_up,p_down,", 0) == 0);
    // first row is the balanced mixture at t = 0
    CHECK(res.output.find("\n0,0.5,0.5,0,0,0\n") != std::string::npos);
}

TEST_CASE("cli: sweep writes csv and svg files") {
    namespace fs = std::filesystem;
    const fs::path csv = fs::temp_directory_path() / "qdspin_cli_sweep.csv";
    const fs::path svg = fs::temp_directory_path() / "qdspin_cli_sweep.svg";
    const auto res = run_cli("sweep --grid omega:0.3:1:2:log,gamma:8:12:2:lin --out " +
                             csv.string() + " --svg " + svg.string());
    CHECK(res.exit_code == 0);

    std::ifstream cf(csv);
    REQUIRE(cf.good());
    std::string line;
    std::getline(cf, line);
    CHECK(line == "omega_ghz,gamma_ghz,fidelity,t_init_ns,speed_ghz,reachable");
    std::size_t rows = 0;
    while (std::getline(cf, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 4);

    std::ifstream sf(svg);
    REQUIRE(sf.good());
    std::string svg_text((std::istreambuf_iterator<char>(sf)), std::istreambuf_iterator<char>());
    CHECK(svg_text.rfind("<?xml", 0) == 0);
    CHECK(svg_text.find("class=\"cell\"") != std::string::npos);

    fs::remove(csv);
    fs::remove(svg);
}

TEST_CASE("cli: sweep to stdout with an unreachable corner") {
    const auto res = run_cli("sweep --grid omega:3:3:1:lin,gamma:10:10:1:lin");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find(",,,0\n") != std::string::npos); // empty time and speed fields
}

TEST_CASE("cli: usage errors exit with 1") {
    CHECK(run_cli("sweep --grid omega:5:0.01:10:log,gamma:5:20:3:lin", true).exit_code == 1);
    CHECK(run_cli("init-time --no-such-flag", true).exit_code == 1);
    CHECK(run_cli("", true).exit_code == 1);
    CHECK(run_cli("init-time --threshold 1.5", true).exit_code == 1);
    CHECK(run_cli("sweep --grid omega:1:2:3:weird,gamma:5:20:3:lin", true).exit_code == 1);
}

TEST_CASE("cli: io failures exit with 3") {
    const auto res =
        run_cli("sweep --grid omega:1:1:1:lin,gamma:10:10:1:lin --out /nonexistent-dir/x.csv", true);
    CHECK(res.exit_code == 3);
}

TEST_CASE("cli: rabi prints the reference drive strength") {
    const auto res = run_cli("rabi");
    CHECK(res.exit_code == 0);
    CHECK(value_after(res.output, "omega_two_photon_ghz = ") ==
          Catch::Approx(0.02203214205818386).epsilon(1e-8));
    CHECK(value_after(res.output, "l_e_nm = ") == Catch::Approx(3.29934284).epsilon(1e-8));
    CHECK(value_after(res.output, "phi = ") == Catch::Approx(1.0));

    // doubling the power doubles the drive
    const auto doubled = run_cli("rabi --power-uw 100");
    CHECK(value_after(doubled.output, "omega_two_photon_ghz = ") ==
          Catch::Approx(2.0 * 0.02203214205818386).epsilon(1e-8));

    // resonant intermediate state is a numerical error
    CHECK(run_cli("rabi --lambda-trion-nm 1800", true).exit_code == 2);
}

TEST_CASE("cli: config file supplies defaults, flags override") {
    namespace fs = std::filesystem;
    const fs::path cfg = fs::temp_directory_path() / "qdspin_cli_test.conf";
    {
        std::ofstream f(cfg);
        f << "# reference strong-drive point\n";
        f << "omega-ghz=3\n";
        f << "gamma-ghz=10\n";
    }

    const auto from_config = run_cli("init-time --config " + cfg.string());
    CHECK(from_config.exit_code == 0);
    CHECK(from_config.output.find("UNREACHABLE") != std::string::npos);

    // the command line wins over the config file
    const auto overridden = run_cli("init-time --config " + cfg.string() + " --omega-ghz 0.5");
    CHECK(overridden.exit_code == 0);
    CHECK(overridden.output.find("t_init_ns = ") != std::string::npos);

    fs::remove(cfg);
}
