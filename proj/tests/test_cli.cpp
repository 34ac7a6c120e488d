#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

const std::string cli = DJL_CLI_PATH;

int run(const std::string& args) {
    std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : (rc >> 8) & 0xff;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

long line_count(const fs::path& p) {
    std::ifstream in(p);
    long n = 0;
    std::string line;
    while (std::getline(in, line)) ++n;
    return n;
}

struct Workspace {
    fs::path dir;
    explicit Workspace(const std::string& tag) {
        dir = fs::temp_directory_path() / ("djl_cli_" + tag);
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    fs::path model(const std::string& name, const std::string& text) {
        fs::path p = dir / (name + ".json");
        std::ofstream(p) << text;
        return p;
    }
};

const char* kMerton =
    R"({"model":"merton","params":{"sigma":0.2,"lambda":0.1,"mu":-0.1,"delta":0.15},"spot":1.0})";
const char* kRuin = R"({"model":"ruin","params":{"sigma":0.2,"lambda":0.02},"spot":1.0})";
const char* kVg = R"({"model":"vg","params":{"theta":-0.1,"nu":0.4,"sigma":0.2},"spot":1.0})";
const char* kBs = R"({"model":"bs","params":{"sigma":0.2},"spot":1.0})";

}  // namespace

TEST_CASE("version flag") { CHECK(run("--version") == 0); }

TEST_CASE("price writes the surface and manifest") {
    Workspace ws("price");
    auto m = ws.model("merton", kMerton);
    CHECK(run("--out " + ws.dir.string() + " --seed 9 price --model-file " +
              m.string() + " --strikes 0.8:1.2:21 --maturities 0.25:1.0:4") == 0);
    CHECK(line_count(ws.dir / "surface.csv") == 1 + 21 * 4);
    CHECK(fs::exists(ws.dir / "surface.json"));
    CHECK(fs::exists(ws.dir / "arbitrage_audit.txt"));

    json cfg = json::parse(slurp(ws.dir / "run_config.json"));
    CHECK(cfg["subcommand"] == "price");
    CHECK(cfg["seed"] == 9);
    CHECK(cfg["params"]["strikes"] == "0.8:1.2:21");
}

TEST_CASE("missing model file is an IO error") {
    Workspace ws("noent");
    CHECK(run("--out " + ws.dir.string() +
              " price --model-file /nonexistent/model.json") == 1);
}

TEST_CASE("VG local vol below the smoothness gate refuses with exit 3") {
    Workspace ws("vg");
    auto m = ws.model("vg", kVg);
    CHECK(run("--out " + ws.dir.string() + " localvol --model-file " + m.string() +
              " --eps 0.1 --strikes 0.9:1.1:3 --maturities 0.1:0.3:2") == 3);
    CHECK_FALSE(fs::exists(ws.dir / "localvol.csv"));
}

TEST_CASE("local vol with an affine time change") {
    Workspace ws("affine");
    auto m = ws.model("bs", kBs);
    CHECK(run("--out " + ws.dir.string() + " localvol --model-file " + m.string() +
              " --eps 0.05 --time-change affine:0.05,2 --strikes 0.9:1.1:3"
              " --maturities 0.1:0.3:2") == 0);
    // flat BS field scaled by tau' = 2: every entry is 0.08
    std::ifstream in(ws.dir / "localvol.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "K,T,sigma_loc_sq,provenance");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        auto c1 = line.find(','), c2 = line.find(',', line.find(',') + 1);
        double v = std::stod(line.substr(c2 + 1));
        CHECK(v == doctest::Approx(0.08).epsilon(1e-8));
    }
    CHECK(rows == 6);
}

TEST_CASE("blowup study on jump-to-ruin below spot") {
    Workspace ws("blowup");
    auto m = ws.model("ruin", kRuin);
    CHECK(run("--out " + ws.dir.string() + " blowup --model-file " + m.string() +
              " --strike 0.8 --t-grid 0.2:0.5:6 --source ruin") == 0);
    CHECK(line_count(ws.dir / "blowup.csv") == 7);

    CHECK(run("--out " + ws.dir.string() + " blowup --model-file " + m.string() +
              " --strike 0.8 --source nonsense") == 1);
}

TEST_CASE("saddle solver output") {
    Workspace ws("saddle");
    auto m = ws.model("ruin", kRuin);
    CHECK(run("--out " + ws.dir.string() + " saddle --model-file " + m.string() +
              " --log-strike 0.1 --maturity 0.25") == 0);
    json j = json::parse(slurp(ws.dir / "saddle.json"));
    CHECK(j["s_hat"].get<double>() == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(j["k"] == 0.1);
    CHECK(j["T"] == 0.25);
    // at-the-money saddle sits in [0,1]: approximation reported as null
    CHECK(run("--out " + ws.dir.string() + " saddle --model-file " + m.string() +
              " --log-strike -0.5 --maturity 1.0") == 5);  // NoSaddle
}

TEST_CASE("verify reruns are byte-identical") {
    Workspace a("verify_a"), b("verify_b");
    auto m = a.model("ruin", kRuin);
    std::string args = " verify --model-file " + m.string() +
                       " --strikes 0.9,1.1 --maturity 0.25 --eps-list 0.2,0.1"
                       " --paths 2000 --steps 50";
    CHECK(run("--out " + a.dir.string() + " --seed 42" + args) == 0);
    CHECK(run("--out " + b.dir.string() + " --seed 42" + args) == 0);
    CHECK(slurp(a.dir / "report.csv") == slurp(b.dir / "report.csv"));
    CHECK(slurp(a.dir / "report.csv").substr(0, 36) ==
          "K,eps,mc_price,stderr,analytic,z\n0.9");

    json r = json::parse(slurp(a.dir / "report.json"));
    CHECK(r["model"] == "ruin");
    CHECK(r["cells"].size() == 4);

    // different seed changes the Monte Carlo column
    Workspace c("verify_c");
    CHECK(run("--out " + c.dir.string() + " --seed 43" + args) == 0);
    CHECK(slurp(a.dir / "report.csv") != slurp(c.dir / "report.csv"));
}
