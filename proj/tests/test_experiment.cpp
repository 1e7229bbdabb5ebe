#include "reflect/experiment.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace reflect;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_ou() {
    return json::parse(R"({
        "kind": "strong-rate",
        "domain": {"type": "halfline", "lower": 0.0},
        "coefficients": {"name": "ou1d"},
        "x0": [0.0],
        "log2_fine_steps": 10,
        "master_seed": 31,
        "num_paths": 16,
        "n_list": [16, 32, 64, 128],
        "p_list": [2, 4],
        "reference": {"scheme": "projected_euler", "log2_steps": 10}
    })");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("reflect_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(REFLECT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing fills defaults and echoes them") {
    json doc = small_ou();
    doc.erase("n_list");
    doc.erase("p_list");
    const auto cfg = parse_config(doc);
    CHECK(cfg.n_list.size() == 9);
    CHECK(cfg.n_list.front() == 16.0);
    CHECK(cfg.n_list.back() == 4096.0);
    CHECK(cfg.p_list == std::vector<double>{2.0});
    CHECK(cfg.scheme == PenaltyScheme::Splitting);
    CHECK(cfg.canonical["coefficients"]["kappa"] == 1.0);
    CHECK(cfg.kind == ExperimentKind::StrongRate);
}

TEST_CASE("invalid configs are rejected") {
    auto with = [](const std::function<void(json&)>& edit) {
        json doc = small_ou();
        edit(doc);
        return doc;
    };
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["n_lsit"] = {16}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["domain"]["upper"] = 1; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["reference"]["steps"] = 3; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["n_list"] = {64, 32}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["n_list"] = json::array(); })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["p_list"] = {0.5}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["p_list"] = {9}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["x0"] = {-0.5}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["x0"] = {0.0, 0.0}; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["scheme"] = "rk4"; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["coefficients"]["kapa"] = 2; })), ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) { d["domain"] = {{"type", "ball"}, {"center", {0}}, {"radius", -1}}; })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(with([](json& d) {
                        d["domain"] = {{"type", "box"}, {"lower", {0.0}}, {"upper", {nullptr}}};
                        d["reference"] = {{"scheme", "halfline_map"}};
                    })),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(json::array()), ConfigError);
}

TEST_CASE("Euler levels above 1/h are dropped and reported") {
    json doc = small_ou();
    doc["scheme"] = "euler";
    doc["log2_fine_steps"] = 6;
    doc["reference"]["log2_steps"] = 6;
    std::vector<double> skipped;
    const auto spec = make_sweep_spec(parse_config(doc), 1, &skipped);
    CHECK(spec.levels == std::vector<double>{16, 32, 64});
    CHECK(skipped == std::vector<double>{128});
}

TEST_CASE("CSV layout and hashing") {
    ErrorTable t;
    t.rows.push_back({16, 400, 1.0 / 65536, 2.0, 0.1, 0.001});
    const std::string csv = format_error_csv({t});
    CHECK(csv.rfind("n,num_paths,p,error,stderr\n", 0) == 0);
    CHECK(csv.find("16,400,2,0.10000000000000001,0.001") != std::string::npos);
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
}

TEST_CASE("runs are reproducible and independent of the thread count") {
    const auto cfg = parse_config(small_ou());
    std::ostringstream log;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const auto ra = run_experiment(ExperimentKind::StrongRate, cfg, a, 1, log);
    const auto rb = run_experiment(ExperimentKind::StrongRate, cfg, b, 3, log);
    CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
    CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
    CHECK(ra.exit_code == 0);
    const json report = json::parse(slurp(a / "rate_report.json"));
    CHECK(report.contains("slope"));
    CHECK(report.contains("alternative"));
    CHECK(report["per_p"].size() == 2);

    json other = small_ou();
    other["master_seed"] = 32;
    const fs::path c = scratch("det_c");
    run_experiment(ExperimentKind::StrongRate, parse_config(other), c, 1, log);
    const json ma = json::parse(slurp(a / "manifest.json"));
    const json mc = json::parse(slurp(c / "manifest.json"));
    CHECK(ma["content_hash"] != mc["content_hash"]);

    CHECK_THROWS_AS(run_experiment(ExperimentKind::DistRate, cfg, c, 1, log), ConfigError);
}

TEST_CASE("weak-compare writes its table") {
    json doc = small_ou();
    doc["kind"] = "weak-compare";
    doc["weak_functional"] = "second_moment";
    std::ostringstream log;
    const fs::path dir = scratch("weak");
    run_experiment(ExperimentKind::WeakCompare, parse_config(doc), dir, 1, log);
    CHECK(fs::exists(dir / "weak_compare.csv"));
    CHECK(fs::exists(dir / "errors.csv"));
    const json report = json::parse(slurp(dir / "rate_report.json"));
    CHECK(report["functional"] == "second_moment");
}

TEST_CASE("CLI exit codes") {
    const fs::path dir = scratch("cli");
    const std::string configs = REFLECT_CONFIG_DIR;

    CHECK(run_cli("validate --config " + configs + "/quadrant2d_validate.json --out " +
                  (dir / "validate").string()) == 0);
    const json v = json::parse(slurp(dir / "validate" / "validation.json"));
    CHECK(v["pass"] == true);

    std::ofstream(dir / "typo.json") << R"({"kind": "validate", "domian": {}})";
    CHECK(run_cli("validate --config " + (dir / "typo.json").string() + " --out " +
                  (dir / "x").string()) == 2);
    CHECK(run_cli("validate --config " + (dir / "missing.json").string()) == 2);

    json blow = small_ou();
    blow["coefficients"] = {{"name", "gbm-box"}, {"mu", 1e200}, {"sigma0", 0.0}};
    blow["x0"] = {1.0};
    std::ofstream(dir / "blow.json") << blow.dump();
    CHECK(run_cli("strong-rate --config " + (dir / "blow.json").string() + " --out " +
                  (dir / "blow").string()) == 3);

    std::ofstream(dir / "ok.json") << small_ou().dump();
    CHECK(run_cli("strong-rate --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "ok").string() + " --threads 2") == 0);
    CHECK(fs::exists(dir / "ok" / "manifest.json"));
}
