#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "selftrap/params.hpp"

namespace {

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(SELFTRAP_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

double parse_kv(const std::string& text, const std::string& key) {
    const auto pos = text.find(key + " = ");
    REQUIRE(pos != std::string::npos);
    return std::stod(text.substr(pos + key.size() + 3));
}

} // namespace

TEST_CASE("cli rates at the symmetric optimum") {
    const auto res = run_cli("--eps2 21.967941834660387 --delta1 -3.5735533905932737 "
                             "--delta2 -3.5735533905932737 --kappa-a 1 --drive-ratio 1 rates");
    REQUIRE(res.exit_code == 0);
    CHECK(parse_kv(res.out, "gamma") == Catch::Approx(-0.9302316800253062).epsilon(1e-10));
    // exactly on resonance with equal fields the floor is 1/(4 omega_M^2)
    CHECK(parse_kv(res.out, "nmin") == Catch::Approx(1.0 / (4.0 * 2.72 * 2.72)).epsilon(1e-9));
}

TEST_CASE("cli json output parses") {
    const auto res = run_cli("--format json --eps2 10 --delta1 -1 --delta2 -2 "
                             "--kappa-a 1 --drive-ratio 0.5 equilibrium");
    REQUIRE(res.exit_code == 0);
    const nlohmann::json obj = nlohmann::json::parse(res.out);
    CHECK(obj.at("x0").get<double>() == Catch::Approx(0.039823232549401955).margin(1e-10));
    CHECK(obj.at("stable").get<bool>());
    CHECK(obj.at("n_roots").get<int>() == 1);
}

TEST_CASE("cli physical config matches direct scaled parameters") {
    namespace fs = std::filesystem;
    const fs::path cfg_path = fs::temp_directory_path() / "selftrap_test_cfg.txt";
    {
        std::ofstream cfg(cfg_path);
        cfg << "mode = physical\nkappa = 6e5\ncoupling = 3e5\nwavelength = 1064e-9\n"
               "power = 8e-3\ndrive_ratio = 0.5\nsphere_radius = 100e-9\n"
               "sphere_density = 2200\ndelta1 = -3e5\ndelta2 = -6e5\n";
    }
    const auto via_config = run_cli("--config " + cfg_path.string() + " equilibrium");
    REQUIRE(via_config.exit_code == 0);
    const auto direct = run_cli("--eps2 190.00005422542267 --delta1 -1 --delta2 -2 "
                                "--kappa-a 1 --drive-ratio 0.5 equilibrium");
    REQUIRE(direct.exit_code == 0);
    CHECK(parse_kv(via_config.out, "x0")
          == Catch::Approx(parse_kv(direct.out, "x0")).epsilon(1e-12));
    fs::remove(cfg_path);
}

TEST_CASE("cli sweep emits the documented CSV header") {
    const auto res = run_cli("--eps2 5 --kappa-a 1 --drive-ratio 0.5 sweep "
                             "--d1-min -3 --d1-max -1 --d2-min -3 --d2-max -1 --n1 4 --n2 4");
    REQUIRE(res.exit_code == 0);
    CHECK(res.out.rfind("delta1,delta2,d1x,d2x,x0,omegaM,gamma,nmin,stable\n", 0) == 0);
}

TEST_CASE("cli exit codes") {
    // 2: invalid parameters
    CHECK(run_cli("rates").exit_code == 2);
    CHECK(run_cli("--eps2 1 --kappa-a -1 --delta1 0 --delta2 0 rates").exit_code == 2);
    CHECK(run_cli("--definitely-not-a-flag 1 rates").exit_code == 2);

    // 2: malformed config
    namespace fs = std::filesystem;
    const fs::path bad_cfg = fs::temp_directory_path() / "selftrap_bad_cfg.txt";
    {
        std::ofstream cfg(bad_cfg);
        cfg << "mode = scaled\nepsilon_squared = 1\n";
    }
    CHECK(run_cli("--config " + bad_cfg.string() + " rates").exit_code == 2);
    fs::remove(bad_cfg);

    // 3: solver failure (zero drive has omega_M^2 = 0, no linearized rate)
    CHECK(run_cli("--eps2 0 --delta1 -1 --delta2 -2 --kappa-a 1 --drive-ratio 0.5 rates")
              .exit_code
          == 3);

    // 4: fit rejection at a zero-cooling point (flat energy envelope)
    const double two_x0 = std::atan(0.25);
    const double d1 = -0.5 * (1.0 + std::cos(two_x0));
    const double d2 = -0.5 * (1.0 + std::sin(two_x0));
    const auto res = run_cli("--eps2 5 --delta1 " + std::to_string(d1) + " --delta2 "
                             + std::to_string(d2)
                             + " --kappa-a 1 --drive-ratio 0.5 --out /dev/null simulate "
                               "--t-end 300");
    CHECK(res.exit_code == 4);
}

TEST_CASE("cli reports every root of an ambiguous trap") {
    const auto res = run_cli("--eps2 1 --delta1 -1.2 --delta2 -1.0 --kappa-a 0.05 "
                             "--drive-ratio 0.6 --format json equilibrium");
    REQUIRE(res.exit_code == 0);
    const nlohmann::json obj = nlohmann::json::parse(res.out);
    CHECK(obj.at("n_roots").get<int>() == 3);
    CHECK(obj.at("other_roots").size() == 2);
}

TEST_CASE("cli simulate writes a trajectory and a fit") {
    namespace fs = std::filesystem;
    const fs::path out = fs::temp_directory_path() / "selftrap_traj.csv";
    const auto res = run_cli("--eps2 0.5 --delta1 -1 --delta2 -1.5 --kappa-a 1 "
                             "--drive-ratio 0.5 --out " + out.string()
                             + " --format json simulate");
    REQUIRE(res.exit_code == 0);
    const nlohmann::json fit = nlohmann::json::parse(res.out);
    CHECK(fit.at("gamma_num").get<double>() < 0.0);
    CHECK(fit.at("r_squared").get<double>() > 0.95);

    std::ifstream csv(out);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,x,p,re_a1,im_a1,re_a2,im_a2,energy");
    fs::remove(out);
}

TEST_CASE("cli scan subcommands run") {
    const auto power = run_cli("--eps2 1 --kappa-a 1 --drive-ratio 0.5 power-scan "
                               "--eps2-min 1 --eps2-max 10 --n 3");
    REQUIRE(power.exit_code == 0);
    CHECK(power.out.rfind("eps2,gamma_sr,gamma_dr,omegaM_over_kappaA,sr_ok,dr_ok\n", 0) == 0);

    const auto phase = run_cli("--eps2 22 --delta1 -3.6 --delta2 -1.75 --kappa-a 1 "
                               "--drive-ratio 0.5 phase-sweep --n 5");
    REQUIRE(phase.exit_code == 0);
    CHECK(phase.out.rfind("phi,gamma,ok\n", 0) == 0);

    const auto loci = run_cli("--eps2 10 --kappa-a 1 --drive-ratio 0.5 loci "
                              "--d1-min -4 --d1-max -1 --d2-min -4 --d2-max -1 --n1 30 --n2 30");
    REQUIRE(loci.exit_code == 0);
    CHECK(loci.out.rfind("kind,segment,delta1,delta2\n", 0) == 0);
}

TEST_CASE("cli find-dr kinds") {
    const auto sr = run_cli("--eps2 0.5 --kappa-a 1 --drive-ratio 0.5 find-dr --kind sr");
    REQUIRE(sr.exit_code == 0);
    CHECK(parse_kv(sr.out, "delta1") == Catch::Approx(-1.0));
    CHECK(parse_kv(sr.out, "omega_m") == Catch::Approx(1.0).epsilon(1e-12));

    const auto dr = run_cli("--eps2 100 --kappa-a 1 --drive-ratio 0.5 find-dr --kind dr-numeric");
    REQUIRE(dr.exit_code == 0);
    CHECK(parse_kv(dr.out, "gamma_predicted") == Catch::Approx(-0.52).margin(0.02));

    const auto sym = run_cli("--eps2 21.967941834660387 --kappa-a 1 --drive-ratio 1 "
                             "find-dr --kind symmetric");
    REQUIRE(sym.exit_code == 0);
    CHECK(parse_kv(sym.out, "omega_m") == Catch::Approx(2.72).epsilon(1e-10));
    CHECK(parse_kv(sym.out, "gamma_predicted")
          == Catch::Approx(-0.9302316800253062).epsilon(1e-10));
}
