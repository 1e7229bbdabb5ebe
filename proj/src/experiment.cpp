#include "reflect/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

namespace reflect {

using nlohmann::json;

namespace {

const std::set<std::string> kTopLevelKeys{
    "kind",        "domain",   "coefficients",    "x0",          "horizon_T",
    "log2_fine_steps", "master_seed", "num_paths", "n_list",     "scheme",
    "substeps",    "p_list",   "reference",       "weak_functional", "output_dir"};

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed,
                         const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key '" + key + "' in " + where);
        }
    }
}

const json& require(const json& object, const std::string& key, const std::string& where) {
    if (!object.contains(key)) throw ConfigError("missing key '" + key + "' in " + where);
    return object.at(key);
}

Scalar as_number(const json& value, const std::string& what) {
    if (!value.is_number()) throw ConfigError(what + " must be a number");
    const Scalar x = value.get<Scalar>();
    if (!std::isfinite(x)) throw ConfigError(what + " must be finite");
    return x;
}

// null stands for an infinite bound
Scalar as_bound(const json& value, Scalar infinity, const std::string& what) {
    if (value.is_null()) return infinity;
    return as_number(value, what);
}

long long as_integer(const json& value, const std::string& what) {
    if (value.is_number_integer()) return value.get<long long>();
    if (value.is_number_float()) {
        const Scalar x = value.get<Scalar>();
        if (std::isfinite(x) && x == std::floor(x) && std::abs(x) < 9e15) {
            return static_cast<long long>(x);
        }
    }
    throw ConfigError(what + " must be an integer");
}

Vector as_vector(const json& value, const std::string& what) {
    if (!value.is_array() || value.empty()) throw ConfigError(what + " must be a nonempty array");
    Vector v(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = as_number(value[i], what + "[" + std::to_string(i) + "]");
    }
    return v;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::string format_double(Scalar x) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.17g", x);
    return buffer;
}

void write_file(const std::filesystem::path& file, const std::string& contents) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + file.string());
}

json band_json(const std::optional<SlopeBand>& band) {
    if (!band) return nullptr;
    return {{"lower", band->lower}, {"upper", band->upper ? json(*band->upper) : json(nullptr)}};
}

json fit_json(const RateReport& r) {
    return {{"regressor", to_string(r.regressor)},
            {"slope", r.slope},
            {"intercept", r.intercept},
            {"residual", r.residual},
            {"rows_used", r.rows_used}};
}

json rate_json(const ErrorTable& table, const std::optional<SlopeBand>& band) {
    const RateReport primary = fit_rate(table, Regressor::LogLnNOverN, band);
    const RateReport alternative = fit_rate(table, Regressor::LogInvN);
    const bool monotone = decreasing_within_noise(table, 2.0);
    json out = fit_json(primary);
    out["p"] = table.rows.front().p;
    out["band"] = band_json(band);
    out["slope_in_band"] = primary.pass;
    out["strictly_decreasing"] = strictly_decreasing(table);
    out["decreasing_within_2se"] = monotone;
    out["pass"] = primary.pass && monotone;
    out["alternative"] = fit_json(alternative);
    return out;
}

json manifest_json(ExperimentKind kind, const ExperimentConfig& config,
                   const std::vector<std::pair<std::string, std::string>>& outputs) {
    json files = json::object();
    for (const auto& [name, contents] : outputs) files[name] = content_hash(contents);
    const std::string config_bytes = config.canonical.dump();
    return {{"tool", "reflect"},
            {"version", kToolVersion},
            {"kind", to_string(kind)},
            {"master_seed", config.master_seed},
            {"config", config.canonical},
            {"content_hash", content_hash(std::string(kToolVersion) + "\n" + to_string(kind) +
                                          "\n" + config_bytes)},
            {"outputs", files}};
}

std::vector<Scalar> per_path_powers(const std::vector<PathSample>& samples, std::size_t level,
                                    Scalar p, bool boundary) {
    std::vector<Scalar> values(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const LevelSample& s = samples[i].levels[level];
        values[i] = std::pow(boundary ? s.max_dist : s.sup_error, p);
    }
    return values;
}

RunResult finish(const std::filesystem::path& out_dir, ExperimentKind kind,
                 const ExperimentConfig& config,
                 std::vector<std::pair<std::string, std::string>> outputs, int exit_code,
                 std::string summary) {
    std::filesystem::create_directories(out_dir);
    RunResult result;
    result.exit_code = exit_code;
    result.summary = std::move(summary);
    const std::string manifest = manifest_json(kind, config, outputs).dump(2) + "\n";
    outputs.emplace_back("manifest.json", manifest);
    for (const auto& [name, contents] : outputs) {
        write_file(out_dir / name, contents);
        result.files.push_back(out_dir / name);
    }
    return result;
}

RunResult run_validate(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                       std::ostream& log) {
    const ProjectionDiagnostics geo =
        check_projection_properties(config.domain, 10'000, config.master_seed);
    const Scalar x0_dist = dist(config.domain, config.x0);
    json report;
    report["geometry"] = {{"domain", config.domain.kind()},
                          {"x0_dist", x0_dist},
                          {"samples", geo.samples},
                          {"idempotence", geo.idempotence},
                          {"nonexpansive_excess", geo.nonexpansive_excess},
                          {"variational", geo.variational},
                          {"pass", geo.pass() && x0_dist <= 1e-12}};
    bool pass = geo.pass() && x0_dist <= 1e-12;

    const CoefficientField& f = config.coefficients.field;
    const SamplingBox box{100'000, 10.0, config.horizon_T, config.master_seed};
    json coeff = {{"name", f.name}, {"samples", box.samples}, {"box_radius", box.box_radius}};
    if (f.declared_growth_C) {
        const GrowthReport growth = check_linear_growth(f, *f.declared_growth_C, box);
        coeff["growth"] = {{"declared_C", *f.declared_growth_C},
                           {"max_ratio", growth.max_ratio},
                           {"pass", growth.pass}};
        pass = pass && growth.pass;
    }
    if (f.declared_lipschitz_L && config.coefficients.has_tag(CoefficientTag::Lipschitz)) {
        const LipschitzReport lip = check_lipschitz(f, *f.declared_lipschitz_L, box);
        coeff["lipschitz"] = {{"declared_L", *f.declared_lipschitz_L},
                              {"max_quotient", lip.max_quotient},
                              {"pass", lip.pass}};
        pass = pass && lip.pass;
    }
    report["coefficients"] = coeff;
    report["pass"] = pass;
    log << "validate: geometry " << (report["geometry"]["pass"].get<bool>() ? "ok" : "FAILED")
        << ", coefficients " << f.name << ", overall " << (pass ? "pass" : "FAIL") << "\n";
    return finish(out_dir, ExperimentKind::Validate, config,
                  {{"validation.json", report.dump(2) + "\n"}}, pass ? 0 : 3,
                  pass ? "validation passed" : "validation failed");
}

RunResult run_rate(ExperimentKind kind, const ExperimentConfig& config,
                   const std::filesystem::path& out_dir, unsigned threads, std::ostream& log) {
    std::vector<Scalar> skipped;
    SweepSpec spec = make_sweep_spec(config, threads, &skipped);
    spec.with_reference = kind == ExperimentKind::StrongRate;
    if (spec.levels.size() < 4) {
        throw ConfigError("rate experiments need at least four usable penalization levels");
    }
    log << to_string(kind) << ": " << spec.num_paths << " paths, " << spec.levels.size()
        << " levels, fine grid 2^" << spec.log2_fine_steps << "\n";
    const std::vector<PathSample> samples = run_sweep(spec);
    const Scalar h_fine = spec.fine_grid().step();

    std::vector<ErrorTable> tables;
    for (const Scalar p : config.p_list) {
        ErrorTable table;
        for (std::size_t j = 0; j < spec.levels.size(); ++j) {
            const auto powers =
                per_path_powers(samples, j, p, kind == ExperimentKind::DistRate);
            const PooledNorm norm = pooled_norm(powers, p);
            table.rows.push_back({spec.levels[j], spec.num_paths, h_fine, p, norm.value,
                                  norm.std_error});
        }
        tables.push_back(std::move(table));
    }

    const auto band = default_band(kind, config.domain);
    json report = rate_json(tables.front(), band);
    report["kind"] = to_string(kind);
    report["estimator"] = "(mean over paths of sup^p)^(1/p); root bias not corrected";
    json per_p = json::array();
    bool pass = report["pass"].get<bool>();
    for (const auto& table : tables) {
        per_p.push_back(rate_json(table, band));
        pass = pass && per_p.back()["pass"].get<bool>();
    }
    report["per_p"] = per_p;
    report["skipped_levels"] = skipped;
    report["all_pass"] = pass;
    log << "slope " << report["slope"].get<Scalar>() << " vs " << report["regressor"].get<std::string>()
        << (report["pass"].get<bool>() ? " (pass)" : " (outside band or not decreasing)") << "\n";
    return finish(out_dir, kind, config,
                  {{"errors.csv", format_error_csv(tables)},
                   {"rate_report.json", report.dump(2) + "\n"}},
                  0, "rate experiment completed");
}

RunResult run_weak(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                   unsigned threads, std::ostream& log) {
    SweepSpec spec = make_sweep_spec(config, threads);
    spec.with_reference = true;
    if (config.weak_functional == WeakFunctional::CdfDistance && spec.coeffs.dim != 1) {
        throw ConfigError("weak_functional cdf_distance needs a one-dimensional problem");
    }
    log << "weak-compare: " << spec.num_paths << " paths, functional "
        << to_string(config.weak_functional) << "\n";
    const auto rows = weak_compare(spec, config.weak_functional);

    ErrorTable table;
    std::ostringstream detail;
    detail << "n,num_paths,approx,reference,distance,stderr\n";
    for (const WeakRow& row : rows) {
        table.rows.push_back({row.level, spec.num_paths, spec.fine_grid().step(), 1.0,
                              row.distance, row.std_error});
        detail << format_double(row.level) << ',' << spec.num_paths << ','
               << format_double(row.approx) << ',' << format_double(row.reference) << ','
               << format_double(row.distance) << ',' << format_double(row.std_error) << '\n';
    }
    json report;
    report["kind"] = to_string(ExperimentKind::WeakCompare);
    report["functional"] = to_string(config.weak_functional);
    const Scalar first = rows.front().distance;
    const Scalar last = rows.back().distance;
    report["first_distance"] = first;
    report["last_distance"] = last;
    report["decrease_factor"] = last > 0.0 ? json(first / last) : json(nullptr);
    const bool positive = std::all_of(rows.begin(), rows.end(),
                                      [](const WeakRow& r) { return r.distance > 0.0; });
    if (positive && rows.size() >= 4) {
        const json fit = rate_json(table, std::nullopt);
        for (const auto& key : {"regressor", "slope", "intercept", "residual", "rows_used",
                                "alternative", "strictly_decreasing", "decreasing_within_2se"}) {
            report[key] = fit[key];
        }
    } else {
        report["slope"] = nullptr;
    }
    report["band"] = nullptr;
    // exact agreement counts as converged
    report["pass"] = last == 0.0 || (first > 0.0 && first / last >= 2.0);
    log << "weak-compare: distance " << first << " -> " << last << "\n";
    return finish(out_dir, ExperimentKind::WeakCompare, config,
                  {{"errors.csv", format_error_csv({table})},
                   {"weak_compare.csv", detail.str()},
                   {"rate_report.json", report.dump(2) + "\n"}},
                  0, "weak comparison completed");
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Validate: return "validate";
        case ExperimentKind::DistRate: return "dist-rate";
        case ExperimentKind::StrongRate: return "strong-rate";
        case ExperimentKind::WeakCompare: return "weak-compare";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "validate") return ExperimentKind::Validate;
    if (name == "dist-rate") return ExperimentKind::DistRate;
    if (name == "strong-rate") return ExperimentKind::StrongRate;
    if (name == "weak-compare") return ExperimentKind::WeakCompare;
    throw ConfigError("unknown experiment kind '" + name + "'");
}

ConvexDomain parse_domain(const json& spec) {
    if (!spec.is_object()) throw ConfigError("domain must be an object");
    const std::string type = require(spec, "type", "domain").get<std::string>();
    try {
        if (type == "halfline") {
            reject_unknown_keys(spec, {"type", "lower"}, "domain");
            return ConvexDomain::half_line(as_number(require(spec, "lower", "domain"), "domain.lower"));
        }
        if (type == "box") {
            reject_unknown_keys(spec, {"type", "lower", "upper"}, "domain");
            const json& lo = require(spec, "lower", "domain");
            const json& hi = require(spec, "upper", "domain");
            if (!lo.is_array() || !hi.is_array() || lo.empty() || lo.size() != hi.size()) {
                throw ConfigError("box bounds must be nonempty arrays of equal length");
            }
            Vector lower(static_cast<Eigen::Index>(lo.size()));
            Vector upper(static_cast<Eigen::Index>(hi.size()));
            for (std::size_t i = 0; i < lo.size(); ++i) {
                lower(static_cast<Eigen::Index>(i)) = as_bound(lo[i], -kInf, "domain.lower");
                upper(static_cast<Eigen::Index>(i)) = as_bound(hi[i], kInf, "domain.upper");
            }
            return ConvexDomain::box(std::move(lower), std::move(upper));
        }
        if (type == "polyhedron") {
            reject_unknown_keys(spec, {"type", "normals", "offsets"}, "domain");
            const json& rows = require(spec, "normals", "domain");
            const Vector offsets = as_vector(require(spec, "offsets", "domain"), "domain.offsets");
            if (!rows.is_array() || rows.empty()) throw ConfigError("domain.normals must be a nonempty array");
            const Vector first = as_vector(rows[0], "domain.normals[0]");
            Matrix normals(static_cast<Eigen::Index>(rows.size()), first.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const Vector row = as_vector(rows[i], "domain.normals[" + std::to_string(i) + "]");
                if (row.size() != first.size()) throw ConfigError("polyhedron normals differ in length");
                normals.row(static_cast<Eigen::Index>(i)) = row.transpose();
            }
            return ConvexDomain::polyhedron(std::move(normals), offsets);
        }
        if (type == "ball") {
            reject_unknown_keys(spec, {"type", "center", "radius"}, "domain");
            return ConvexDomain::ball(as_vector(require(spec, "center", "domain"), "domain.center"),
                                      as_number(require(spec, "radius", "domain"), "domain.radius"));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid domain: ") + e.what());
    }
    throw ConfigError("unknown domain type '" + type + "'");
}

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(doc, kTopLevelKeys, "config");
    ExperimentConfig cfg;
    json canonical;

    try {
        if (doc.contains("kind")) cfg.kind = parse_experiment_kind(doc["kind"].get<std::string>());

        cfg.domain = parse_domain(require(doc, "domain", "config"));
        canonical["domain"] = doc["domain"];

        const json& coeff = require(doc, "coefficients", "config");
        if (!coeff.is_object()) throw ConfigError("coefficients must be an object");
        const std::string name = require(coeff, "name", "coefficients").get<std::string>();
        ParameterMap params;
        for (const auto& [key, value] : coeff.items()) {
            if (key != "name") params[key] = as_number(value, "coefficients." + key);
        }
        try {
            cfg.coefficients = make_catalog_entry(name, params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        json coeff_canonical = {{"name", name}};
        for (const auto& [key, value] : catalog_defaults().at(name)) {
            coeff_canonical[key] = params.contains(key) ? params.at(key) : value;
        }
        canonical["coefficients"] = coeff_canonical;

        cfg.x0 = as_vector(require(doc, "x0", "config"), "x0");
        if (cfg.x0.size() != cfg.domain.dim() || cfg.coefficients.field.dim != cfg.domain.dim()) {
            std::ostringstream msg;
            msg << "dimension mismatch: domain " << cfg.domain.dim() << ", coefficients "
                << cfg.coefficients.field.dim << ", x0 " << cfg.x0.size();
            throw ConfigError(msg.str());
        }
        if (!contains(cfg.domain, cfg.x0, 1e-12)) throw ConfigError("x0 must lie in the closed domain");
        canonical["x0"] = to_json(cfg.x0);

        if (doc.contains("horizon_T")) cfg.horizon_T = as_number(doc["horizon_T"], "horizon_T");
        if (!(cfg.horizon_T > 0.0)) throw ConfigError("horizon_T must be positive");
        if (doc.contains("log2_fine_steps")) {
            cfg.log2_fine_steps = static_cast<int>(as_integer(doc["log2_fine_steps"], "log2_fine_steps"));
        }
        if (cfg.log2_fine_steps < 1 || cfg.log2_fine_steps > 24) {
            throw ConfigError("log2_fine_steps must lie in [1, 24]");
        }
        if (doc.contains("master_seed")) {
            const json& seed = doc["master_seed"];
            if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<long long>() >= 0)) {
                throw ConfigError("master_seed must be a nonnegative integer");
            }
            cfg.master_seed = seed.get<std::uint64_t>();
        }
        if (doc.contains("num_paths")) {
            const long long paths = as_integer(doc["num_paths"], "num_paths");
            if (paths < 1) throw ConfigError("num_paths must be at least 1");
            cfg.num_paths = static_cast<std::size_t>(paths);
        }

        if (doc.contains("n_list")) {
            const json& list = doc["n_list"];
            if (!list.is_array() || list.empty()) throw ConfigError("n_list must be a nonempty array");
            for (const auto& v : list) cfg.n_list.push_back(as_number(v, "n_list entry"));
        } else {
            for (int e = 4; e <= 12; ++e) cfg.n_list.push_back(std::ldexp(1.0, e));
        }
        for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
            if (!(cfg.n_list[i] > 1.0)) throw ConfigError("n_list entries must exceed 1");
            if (i > 0 && !(cfg.n_list[i] > cfg.n_list[i - 1])) {
                throw ConfigError("n_list must be strictly ascending");
            }
        }

        if (doc.contains("scheme")) {
            try {
                cfg.scheme = parse_penalty_scheme(doc["scheme"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (doc.contains("substeps")) cfg.substeps = static_cast<int>(as_integer(doc["substeps"], "substeps"));
        if (cfg.substeps < 1 || cfg.substeps > 1024) throw ConfigError("substeps must lie in [1, 1024]");

        if (doc.contains("p_list")) {
            const json& list = doc["p_list"];
            if (!list.is_array() || list.empty()) throw ConfigError("p_list must be a nonempty array");
            cfg.p_list.clear();
            for (const auto& v : list) cfg.p_list.push_back(as_number(v, "p_list entry"));
        }
        for (const Scalar p : cfg.p_list) {
            if (p < 1.0 || p > 8.0) throw ConfigError("p_list entries must lie in [1, 8]");
        }

        if (doc.contains("reference")) {
            const json& ref = doc["reference"];
            if (!ref.is_object()) throw ConfigError("reference must be an object");
            reject_unknown_keys(ref, {"scheme", "log2_steps"}, "reference");
            const std::string scheme = require(ref, "scheme", "reference").get<std::string>();
            if (scheme == "projected_euler") {
                cfg.reference.scheme = ReferenceScheme::ProjectedEuler;
                if (ref.contains("log2_steps")) {
                    cfg.reference.log2_steps = static_cast<int>(as_integer(ref["log2_steps"], "reference.log2_steps"));
                }
            } else if (scheme == "halfline_map") {
                if (ref.contains("log2_steps")) {
                    throw ConfigError("halfline_map runs on the fine grid; drop reference.log2_steps");
                }
                if (!std::holds_alternative<HalfLine>(cfg.domain.shape())) {
                    throw ConfigError("halfline_map reference needs a half-line domain");
                }
                cfg.reference.scheme = ReferenceScheme::HalflineMap;
                cfg.reference.log2_steps = cfg.log2_fine_steps;
            } else {
                throw ConfigError("unknown reference scheme '" + scheme + "'");
            }
        } else {
            cfg.reference.log2_steps = std::min(cfg.reference.log2_steps, cfg.log2_fine_steps);
        }
        if (cfg.reference.log2_steps < 1 || cfg.reference.log2_steps > cfg.log2_fine_steps) {
            throw ConfigError("reference.log2_steps must lie in [1, log2_fine_steps]");
        }

        if (doc.contains("weak_functional")) {
            try {
                cfg.weak_functional = parse_weak_functional(doc["weak_functional"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    canonical["horizon_T"] = cfg.horizon_T;
    canonical["log2_fine_steps"] = cfg.log2_fine_steps;
    canonical["master_seed"] = cfg.master_seed;
    canonical["num_paths"] = cfg.num_paths;
    canonical["n_list"] = cfg.n_list;
    canonical["scheme"] = to_string(cfg.scheme);
    canonical["substeps"] = cfg.substeps;
    canonical["p_list"] = cfg.p_list;
    canonical["reference"] = {{"scheme", to_string(cfg.reference.scheme)},
                              {"log2_steps", cfg.reference.log2_steps}};
    canonical["weak_functional"] = to_string(cfg.weak_functional);
    if (cfg.kind) canonical["kind"] = to_string(*cfg.kind);
    cfg.canonical = std::move(canonical);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config file " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + file.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

SweepSpec make_sweep_spec(const ExperimentConfig& config, unsigned threads,
                          std::vector<Scalar>* skipped) {
    SweepSpec spec{.domain = config.domain,
                   .coeffs = config.coefficients.field,
                   .x0 = config.x0,
                   .horizon = config.horizon_T,
                   .log2_fine_steps = config.log2_fine_steps,
                   .master_seed = config.master_seed,
                   .num_paths = config.num_paths,
                   .levels = {},
                   .scheme = config.scheme,
                   .substeps = config.substeps,
                   .reference = config.reference,
                   .with_reference = true,
                   .threads = threads};
    const Scalar limit = euler_level_limit(spec.fine_grid());
    for (const Scalar n : config.n_list) {
        if (config.scheme == PenaltyScheme::Euler && n > limit) {
            if (skipped != nullptr) skipped->push_back(n);
            continue;
        }
        spec.levels.push_back(n);
    }
    return spec;
}

std::optional<SlopeBand> default_band(ExperimentKind kind, const ConvexDomain& domain) {
    switch (kind) {
        case ExperimentKind::DistRate: return SlopeBand{0.40, std::nullopt};
        case ExperimentKind::StrongRate:
            if (domain.is_polyhedral()) return SlopeBand{0.35, 0.70};
            return SlopeBand{0.20, std::nullopt};
        default: return std::nullopt;
    }
}

std::string content_hash(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (const unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << hash;
    return out.str();
}

std::string format_error_csv(const std::vector<ErrorTable>& tables) {
    std::ostringstream out;
    out << "n,num_paths,p,error,stderr\n";
    for (const auto& table : tables) {
        for (const ErrorRow& r : table.rows) {
            out << format_double(r.level) << ',' << r.num_paths << ',' << format_double(r.p) << ','
                << format_double(r.value) << ',' << format_double(r.std_error) << '\n';
        }
    }
    return out.str();
}

RunResult run_experiment(ExperimentKind kind, const ExperimentConfig& config,
                         const std::filesystem::path& out_dir, unsigned threads,
                         std::ostream& log) {
    if (config.kind && *config.kind != kind) {
        throw ConfigError("config declares kind '" + to_string(*config.kind) +
                          "' but the '" + to_string(kind) + "' subcommand was invoked");
    }
    switch (kind) {
        case ExperimentKind::Validate: return run_validate(config, out_dir, log);
        case ExperimentKind::DistRate:
        case ExperimentKind::StrongRate: return run_rate(kind, config, out_dir, threads, log);
        case ExperimentKind::WeakCompare: return run_weak(config, out_dir, threads, log);
    }
    throw ConfigError("unknown experiment kind");
}

}  // namespace reflect
