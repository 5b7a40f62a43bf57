#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using namespace kgq;
using namespace kgq::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("kgq_cli_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "kgq");
    std::vector<const char*> argv;
    for (auto& a : args) argv.push_back(a.c_str());
    std::ostringstream err;
    int rc = dispatch(static_cast<int>(argv.size()), argv.data(), err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::getline(in, line);  // hash
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<double> r;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) r.push_back(std::stod(c));
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("empty config gives the documented defaults") {
    ExperimentConfig c;
    apply_config_text(c, "");
    c.validate();
    CHECK(c.frequency().omega[0] == golden_frequency().omega[0]);
    CHECK(c.sigma == 1.0 / 200);
    CHECK(c.N_min == 20);
    CHECK(c.zeta == 0.32);
    CHECK(c.kappa == 6);
}

TEST_CASE("config text with comments, JSON values and bare strings") {
    ExperimentConfig c;
    apply_config_text(c, "# experiment\n"
                         "eps = 1e-3   # amplitude\n"
                         "sites=128\n"
                         "egrid = -1:1:5\n"
                         "tgrid = \"log:1:100:11\"\n"
                         "mlist = [0, 2.5]\n"
                         "modes = [[1, 0.0005], [2, 0.00025]]\n"
                         "out_dir = runs/a#1\n");
    c.validate();
    CHECK(c.eps == 1e-3);
    CHECK(c.sites == 128);
    CHECK(c.egrid == "-1:1:5");
    CHECK(c.tgrid == "log:1:100:11");
    CHECK(c.mlist == std::vector<double>{0.0, 2.5});
    CHECK(c.out_dir == "runs/a");
    auto P = c.potential();
    CHECK(P.coeffs.size() == 4);
    CHECK(P.coeffs.at({-2}) == 0.00025);
}

TEST_CASE("config validation errors") {
    auto fails = [](const std::string& text, const std::string& needle) {
        ExperimentConfig c;
        try {
            apply_config_text(c, text);
            c.validate();
        } catch (const ValidationError& e) {
            INFO(e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            return;
        }
        FAIL("no validation error for: " << text);
    };
    fails("kappa = 4\nzeta = 0.32\n", "zeta");
    fails("eps = 1.0\n", "eps");
    fails("eps = 1.5\n", "eps");
    fails("\n\nwibble = 3\n", "line 3: unknown key 'wibble'");
    fails("sites = \"many\"\n", "line 1: field 'sites'");
    fails("sites = 2\n", "sites");
    fails("just text\n", "line 1: expected key = value");
    fails("egrid = 1:0:5\n", "lo <= hi");
    fails("tgrid = log:0:10:5\n", "lo > 0");
    fails("dt = 0\n", "dt");
    fails("omega = [0.5, 0.3]\ntheta0 = [0.1]\n", "theta0");
    fails("modes = [[0, 0.1]]\n", "zero mode");
}

TEST_CASE("grid parsing") {
    auto g = parse_grid("-2:2:5").points();
    CHECK(g == std::vector<double>{-2, -1, 0, 1, 2});
    auto l = parse_grid("log:1:100:3").points();
    CHECK(l.front() == 1.0);
    CHECK(l.back() == 100.0);
    CHECK_THAT(l[1], Catch::Matchers::WithinRel(10.0, 1e-15));
    CHECK_THROWS_AS(parse_grid("1:2"), ValidationError);
    CHECK_THROWS_AS(parse_grid("1:2:x"), ValidationError);
}

TEST_CASE("config hash is canonical and ignores the output directory") {
    ExperimentConfig a, b;
    b.out_dir = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 64);
    b.eps = 1e-3;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("spectrum subcommand writes the Dirichlet eigenvalues") {
    TempDir tmp;
    REQUIRE(run({"spectrum", "--sites", "64", "--eps", "0", "--out", tmp.path.string()}) == 0);
    std::string text = slurp(tmp.path / "spectrum.csv");
    CHECK(text.rfind("# config_hash=", 0) == 0);
    CHECK(text.find("\nindex,eigenvalue\n") != std::string::npos);
    auto rows = csv_rows(tmp.path / "spectrum.csv");
    REQUIRE(rows.size() == 64);
    for (int k = 1; k <= 64; ++k) CHECK(std::abs(rows[k - 1][1] + 2 * std::cos(k * pi / 65)) < 1e-13);
    auto m = json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(m["code_version"] == version);
    CHECK(m["experiments"]["spectrum"]["files"] == json::array({"spectrum.csv"}));
    CHECK(m["experiments"]["spectrum"]["seed"] == 12345);
}

TEST_CASE("rotation subcommand on the free lattice") {
    TempDir tmp;
    REQUIRE(run({"rotation", "--egrid", "-2:2:21", "--eps", "0", "--n-iter", "20000", "--out", tmp.path.string()}) == 0);
    auto rows = csv_rows(tmp.path / "rotation.csv");
    REQUIRE(rows.size() == 21);
    for (auto& r : rows) CHECK(std::abs(r[1] - std::acos(std::clamp(-r[0] / 2, -1.0, 1.0))) < 2e-3);
}

TEST_CASE("outputs are byte-identical across reruns") {
    TempDir a, b;
    std::vector<std::string> args{"spectral", "--eps", "1e-3", "--egrid", "-1:1:3", "--cells", "64", "--window", "3"};
    auto with = [&](const fs::path& p) {
        auto v = args;
        v.push_back("--out");
        v.push_back(p.string());
        return v;
    };
    REQUIRE(run(with(a.path)) == 0);
    REQUIRE(run(with(b.path)) == 0);
    CHECK(slurp(a.path / "spectral.csv") == slurp(b.path / "spectral.csv"));
    CHECK(slurp(a.path / "spectral.json") == slurp(b.path / "spectral.json"));
    auto s = json::parse(slurp(a.path / "spectral.json"));
    CHECK(s["schema_version"] == schema_version);
    CHECK(s["grid"] == "perturbed");
}

TEST_CASE("kam subcommand emits the report schema") {
    TempDir tmp;
    REQUIRE(run({"kam", "--eps", "1e-4", "--energy", "0", "--out", tmp.path.string()}) == 0);
    auto j = json::parse(slurp(tmp.path / "kam.json"));
    REQUIRE(j["steps"].is_array());
    REQUIRE(j["steps"].size() == 4);
    for (const char* key : {"j", "xi", "k", "residual", "defect"}) CHECK(j["steps"][0].contains(key));
    CHECK(j["steps"][0]["residual"].get<double>() < 1e-7);
    CHECK(std::abs(j["rho_J"].get<double>() - pi / 2) < 1e-3);
    CHECK(j["stratum"] == 0);
}

TEST_CASE("decay and dispersion subcommands") {
    TempDir tmp;
    REQUIRE(run({"decay", "--eps", "1e-3", "--tmax", "200", "--out", tmp.path.string()}) == 0);
    auto d = json::parse(slurp(tmp.path / "decay.json"));
    CHECK(d.contains("exponent"));
    CHECK(d["exponent"].get<double>() < -0.2);
    CHECK(d["sites"] == 540);
    REQUIRE(run({"dispersion", "--tgrid", "log:10:100:2", "--mlist", "[0]", "--out", tmp.path.string()}) == 0);
    auto rows = csv_rows(tmp.path / "dispersion.csv");
    REQUIRE(rows.size() == 2);
    CHECK(std::abs(rows[0][2] + 0.60238768494488377) < 1e-10);
    auto m = json::parse(slurp(tmp.path / "manifest.json"));
    CHECK(m["experiments"].contains("decay"));
    CHECK(m["experiments"].contains("dispersion"));
    CHECK(run({"dispersion", "--eps", "1e-3", "--out", tmp.path.string()}) == 1);
}

TEST_CASE("evolve subcommand: linear energy column is constant") {
    TempDir tmp;
    REQUIRE(run({"evolve", "--sites", "200", "--eps", "1e-3", "--tgrid", "log:1:50:8", "--tmax", "50", "--out",
                 tmp.path.string()}) == 0);
    auto rows = csv_rows(tmp.path / "evolve.csv");
    REQUIRE(rows.size() == 9);
    for (auto& r : rows) CHECK(std::abs(r[4] - rows[0][4]) < 1e-12);
}

TEST_CASE("exit codes") {
    TempDir tmp;
    std::string err;
    CHECK(run({"frobnicate"}, &err) == 1);
    CHECK(run({"spectrum", "--bogus", "1"}, &err) == 1);
    CHECK(run({"spectrum", "--kappa", "4", "--out", tmp.path.string()}, &err) == 1);
    CHECK(err.find("validation error") != std::string::npos);
    CHECK(run({"spectrum", "--config", (tmp.path / "missing.cfg").string()}, &err) == 1);
    // focusing blow-up
    CHECK(run({"evolve", "--sites", "16", "--lambda", "1", "--amplitude", "3", "--tmax", "10", "--out",
               tmp.path.string()},
              &err) == 2);
    CHECK(err.find("numerical failure") != std::string::npos);
}

TEST_CASE("config file and flag precedence, environment output directory") {
    TempDir tmp;
    auto cfg = tmp.path / "exp.cfg";
    std::ofstream(cfg) << "sites = 10\neps = 0.01\n";
    fs::path out = tmp.path / "env_out";
    setenv("KGQ_OUT_DIR", out.string().c_str(), 1);
    REQUIRE(run({"spectrum", "--config", cfg.string(), "--sites", "12"}) == 0);
    unsetenv("KGQ_OUT_DIR");
    CHECK(csv_rows(out / "spectrum.csv").size() == 12);
}
