#include "fme/config.hpp"

#include <ctime>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

#include "fme/drift.hpp"
#include "fme/io.hpp"

namespace fme {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

std::string join_path(const std::string& base, const std::string& rel) {
    if (rel.empty() || rel.front() == '/' || base.empty()) return rel;
    return base + "/" + rel;
}

std::string dir_of(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

LevyDriverSpec parse_driver(const json& j) {
    std::vector<JumpMark> marks;
    for (const auto& m : j.value("marks", json::array()))
        marks.push_back({m.at("xi").get<double>(), m.at("w").get<double>()});
    std::optional<CumulantWindow> window;
    if (j.contains("window")) {
        const auto& w = j.at("window");
        window = CumulantWindow{w.at("M").get<double>(), w.value("eps", 0.0),
                                w.value("allow_positive_halfline", false)};
    }
    return LevyDriverSpec(j.value("b", 0.0), j.value("c", 0.0), std::move(marks),
                          j.value("wiener_factors", std::size_t{0}), window);
}

Surface parse_loading(const json& j, const SurfaceGrid& grid, const LevyDriverSpec& driver,
                      VolKind kind, const std::string& base_dir) {
    std::string type = j.at("type").get<std::string>();
    if (type == "constant") return Surface(grid, j.at("value").get<double>());
    if (type == "example") {
        ExampleField field = kind == VolKind::improvement_vol ? ExampleField::b : ExampleField::sigma;
        return example_loading_surface(j.at("example").get<int>(), field, grid, driver);
    }
    if (type == "csv") {
        Surface s = read_surface_csv(join_path(base_dir, j.at("csv").get<std::string>()));
        if (!s.grid().same_as(grid)) throw std::invalid_argument("config: loading csv grid mismatch");
        return s;
    }
    throw std::invalid_argument("config: unknown volatility type '" + type + "'");
}

Curve parse_gamma0(const json& j, const SurfaceGrid& grid) {
    if (j.is_number()) return Curve(grid.h, std::vector<double>(grid.n_z, j.get<double>()));
    std::vector<double> v = j.get<std::vector<double>>();
    if (v.size() != grid.n_z) throw std::invalid_argument("config: gamma0 needs one value per age node");
    return Curve(grid.h, std::move(v));
}

void parse_initial(const json& j, const SurfaceGrid& grid, ScenarioConfig& cfg,
                   const std::string& base_dir) {
    std::string type = j.at("type").get<std::string>();
    if (type == "flat") {
        cfg.mu0 = Surface(grid, j.at("mu").get<double>());
    } else if (type == "gompertz") {
        auto th = j.at("theta").get<std::vector<double>>();
        if (th.size() != 5) throw std::invalid_argument("config: gompertz needs 5 parameters");
        GompertzParams p{th[0], th[1], th[2], th[3], th[4]};
        p.validate();
        auto gs = gompertz_makeham_surfaces(p, grid);
        cfg.mu0 = gs.mu0;
        cfg.j0 = gs.j0;
        cfg.gamma0 = gs.gamma0;
    } else if (type == "mu0_csv") {
        cfg.mu0 = read_surface_csv(join_path(base_dir, j.at("path").get<std::string>()));
    } else if (type == "j0_csv") {
        cfg.j0 = read_surface_csv(join_path(base_dir, j.at("path").get<std::string>()));
        cfg.gamma0 = parse_gamma0(j.at("gamma0"), grid);
    } else {
        throw std::invalid_argument("config: unknown initial type '" + type + "'");
    }
}

std::string iso_now() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    if (j.value("schema_version", 0) != kSchemaVersion)
        throw std::invalid_argument("config: unsupported schema_version");

    RunConfig run;
    run.base_dir = dir_of(path);
    ScenarioConfig& cfg = run.scenario;

    const auto& g = j.at("grid");
    cfg.grid = SurfaceGrid(g.at("h").get<double>(), g.at("n_s").get<std::size_t>(),
                           g.at("n_z").get<std::size_t>());
    cfg.driver = parse_driver(j.at("driver"));

    std::string mode = j.value("mode", "rates");
    if (mode == "rates")
        cfg.mode = SimMode::rates;
    else if (mode == "improvements")
        cfg.mode = SimMode::improvements;
    else
        throw std::invalid_argument("config: mode must be 'rates' or 'improvements'");

    const auto& v = j.at("volatility");
    VolKind kind = v.value("kind", "improvement") == std::string("rate") ? VolKind::rate_vol
                                                                         : VolKind::improvement_vol;
    cfg.vol_scalar = LevyScalarVol{kind, parse_loading(v, cfg.grid, cfg.driver, kind, run.base_dir)};

    parse_initial(j.at("initial"), cfg.grid, cfg, run.base_dir);

    cfg.dt = j.at("dt").get<double>();
    cfg.t_end = j.at("t_end").get<double>();
    cfg.n_paths = j.value("n_paths", std::size_t{1});
    cfg.seed = j.value("seed", std::uint64_t{0});
    for (const auto& tr : j.value("triples", json::array()))
        cfg.triples.push_back(
            {tr.at("t").get<double>(), tr.at("T").get<double>(), tr.at("x").get<double>()});
    cfg.cohorts = j.value("cohorts", std::vector<double>{});
    cfg.zero_drift = j.value("zero_drift", false);
    cfg.vol_scale = j.value("vol_scale", 1.0);

    if (j.contains("cohort")) {
        const auto& c = j.at("cohort");
        CohortRunConfig cc;
        cc.n_individuals = c.at("n_individuals").get<std::size_t>();
        cc.lln_t = c.value("lln_t", cfg.t_end);
        cc.checkpoints = c.value("checkpoints", std::vector<double>{});
        run.cohort = cc;
    }
    if (j.contains("pricing")) {
        const auto& p = j.at("pricing");
        PricingRunConfig pc;
        pc.discount_csv = join_path(run.base_dir, p.at("discount_csv").get<std::string>());
        for (const auto& ins : p.at("instruments")) {
            InstrumentSpec spec;
            spec.type = ins.at("type").get<std::string>();
            spec.t = ins.value("t", 0.0);
            spec.dates = ins.at("dates").get<std::vector<double>>();
            spec.x = ins.at("x").get<double>();
            pc.instruments.push_back(std::move(spec));
        }
        run.pricing = pc;
    }
    if (j.contains("drift_table")) {
        DriftTableConfig dc;
        dc.example = j.at("drift_table").value("example", 0);
        run.drift_table = dc;
    }
    return run;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for hashing: " + path);
    std::uint64_t h = 14695981039346656037ULL;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j{{"config_hash", m.config_hash}, {"seed", m.seed},
                     {"tool_version", m.tool_version}, {"started_at", m.started_at},
                     {"finished_at", m.finished_at},   {"outputs", m.outputs}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << j.dump(2) << '\n';
}

std::string iso_timestamp_now() { return iso_now(); }

}  // namespace fme
