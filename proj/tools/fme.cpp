#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fme/cohort.hpp"
#include "fme/config.hpp"
#include "fme/drift.hpp"
#include "fme/io.hpp"
#include "fme/pricing.hpp"
#include "fme/simulate.hpp"

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

// exit codes
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kDomainError = 3;
constexpr int kDiagnosticFailure = 4;

int log_level() {
    const char* env = std::getenv("FME_LOG_LEVEL");
    if (!env) return 1;  // info
    std::string v = env;
    if (v == "debug") return 0;
    if (v == "info") return 1;
    if (v == "warn") return 2;
    return 3;
}

void log_info(const std::string& msg) {
    if (log_level() <= 1) std::cerr << "[info] " << msg << '\n';
}

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    unsigned threads = 1;
};

struct Run {
    fme::RunConfig cfg;
    fme::RunManifest manifest;
    std::string out_dir;

    std::string out_path(const std::string& name) {
        manifest.outputs.push_back(name);
        return out_dir + "/" + name;
    }
    void finish() {
        manifest.finished_at = fme::iso_timestamp_now();
        fme::write_manifest(manifest, out_dir + "/manifest.json");
    }
};

Run open_run(const Options& opt) {
    Run run;
    run.cfg = fme::load_config(opt.config_path);
    if (opt.seed) run.cfg.scenario.seed = *opt.seed;
    if (opt.paths) run.cfg.scenario.n_paths = *opt.paths;
    std::filesystem::create_directories(opt.out_dir);
    run.out_dir = opt.out_dir;
    run.manifest.config_hash = fme::hash_file(opt.config_path);
    run.manifest.seed = run.cfg.scenario.seed;
    run.manifest.tool_version = kVersion;
    run.manifest.started_at = fme::iso_timestamp_now();
    return run;
}

void write_martingale_csv(const fme::PathEnsemble& ens, const std::string& path) {
    std::ofstream out(path);
    out << "t,T,x,mean_G,std_err,z\n";
    for (const auto& ts : ens.triples) {
        auto st = fme::martingale_diagnostic(ens, ts.triple.t, ts.triple.T, ts.triple.x);
        out << fme::format_sig(ts.triple.t) << ',' << fme::format_sig(ts.triple.T) << ','
            << fme::format_sig(ts.triple.x) << ',' << fme::format_sig(st.mean) << ','
            << fme::format_sig(st.std_err) << ',' << fme::format_sig(st.z) << '\n';
    }
}

json diagnostics_json(const fme::PathEnsemble& ens) {
    auto neg = fme::negativity_diagnostic(ens);
    json j{{"n_paths", ens.n_paths},
           {"negativity",
            {{"fraction_negative_nodes", neg.fraction_negative_nodes}, {"min_value", neg.min_value}}},
           {"g_above_one", ens.g_above_one},
           {"g_nonpositive", ens.g_nonpositive}};
    if (!ens.identity_sup.empty()) {
        j["identity_sup"] = ens.identity_sup;
        j["checkpoint_times"] = ens.checkpoint_times;
    }
    return j;
}

int cmd_simulate(const Options& opt) {
    Run run = open_run(opt);
    auto prep = fme::prepare_scenario(run.cfg.scenario);
    log_info("simulating " + std::to_string(prep.n_paths) + " paths");
    auto ens = fme::simulate_ensemble(prep, opt.threads);
    write_martingale_csv(ens, run.out_path("martingale.csv"));
    std::ofstream(run.out_path("diagnostics.json")) << diagnostics_json(ens).dump(2) << '\n';
    run.finish();
    return kOk;
}

int cmd_drift_table(const Options& opt) {
    Run run = open_run(opt);
    const auto& sc = run.cfg.scenario;
    if (!sc.vol_scalar) throw std::invalid_argument("drift-table: scalar volatility required");
    const fme::LevyScalarVol& vol = *sc.vol_scalar;
    fme::Surface drift = vol.kind == fme::VolKind::improvement_vol
                             ? fme::drift_j_levy(vol, sc.driver)
                             : fme::drift_mu_levy(vol, sc.driver);
    fme::write_surface_csv(drift, run.out_path("drift.csv"));
    run.manifest.outputs.push_back("drift.csv.json");

    if (run.cfg.drift_table && run.cfg.drift_table->example > 0) {
        int which = run.cfg.drift_table->example;
        fme::ExampleField field = vol.kind == fme::VolKind::improvement_vol ? fme::ExampleField::a
                                                                            : fme::ExampleField::alpha;
        double sup_abs = 0.0, sup_rel = 0.0;
        const auto& g = sc.grid;
        for (std::size_t i = 0; i < g.n_s; ++i)
            for (std::size_t j = 0; j < g.n_z; ++j) {
                double ref = fme::example_closed_form(which, field, g.s(i), g.z(j) - g.s(i), sc.driver);
                double err = std::abs(drift.at(i, j) - ref);
                sup_abs = std::max(sup_abs, err);
                sup_rel = std::max(sup_rel, err / std::max(1.0, std::abs(ref)));
            }
        json rep{{"example", which}, {"sup_abs_error", sup_abs}, {"sup_rel_error", sup_rel}};
        std::ofstream(run.out_path("drift_report.json")) << rep.dump(2) << '\n';
    }
    run.finish();
    return kOk;
}

int cmd_cohort(const Options& opt) {
    Run run = open_run(opt);
    if (!run.cfg.cohort) throw std::invalid_argument("cohort: config lacks a 'cohort' section");
    const auto& cc = *run.cfg.cohort;
    auto prep = fme::prepare_scenario(run.cfg.scenario);
    if (prep.cohorts.empty()) throw std::invalid_argument("cohort: no cohort ages configured");
    double x = prep.cohorts.front();
    auto path = fme::simulate_path(prep, 0);
    auto haz = fme::accumulate_hazard(path, x);
    auto rng = fme::path_rng(prep.seed, prep.n_paths + 1);  // stream distinct from path streams
    auto sample = fme::sample_death_times(haz.hazard, x, cc.n_individuals, rng);

    std::ofstream deaths(run.out_path("deaths.csv"));
    deaths << "index,tau,censored\n";
    for (std::size_t i = 0; i < sample.death_times.size(); ++i)
        deaths << i << ',' << fme::format_sig(sample.death_times[i]) << ','
               << int(sample.censored[i]) << '\n';

    auto lln = fme::lln_diagnostic(sample, cc.lln_t);
    std::vector<double> checkpoints =
        cc.checkpoints.empty() ? haz.hazard.times() : cc.checkpoints;
    auto resid = fme::compensator_residual(sample, checkpoints);
    json residuals = json::array();
    for (const auto& r : resid)
        residuals.push_back({{"t", r.t}, {"mean", r.mean}, {"std_err", r.std_err}});
    json rep{{"x", x},
             {"n_individuals", cc.n_individuals},
             {"floored_spot_count", haz.floored_count},
             {"lln",
              {{"t", cc.lln_t},
               {"empirical_fraction", lln.empirical_fraction},
               {"model_G", lln.model_g},
               {"abs_error", lln.abs_error},
               {"ci_halfwidth", lln.ci_halfwidth}}},
             {"compensator_residuals", residuals}};
    std::ofstream(run.out_path("cohort_report.json")) << rep.dump(2) << '\n';
    run.finish();
    return kOk;
}

int cmd_price(const Options& opt) {
    Run run = open_run(opt);
    if (!run.cfg.pricing) throw std::invalid_argument("price: config lacks a 'pricing' section");
    const auto& pc = *run.cfg.pricing;
    fme::DiscountCurve curve = fme::read_discount_csv(pc.discount_csv);
    auto prep = fme::prepare_scenario(run.cfg.scenario);
    auto path = fme::simulate_path(prep, 0);

    auto state_at = [&](double t) -> const fme::PathState& {
        for (const auto& st : path)
            if (std::abs(st.t - t) < 1e-9) return st;
        throw std::invalid_argument("price: valuation time is not a path checkpoint");
    };

    std::ofstream out(run.out_path("prices.csv"));
    out << "type,t,x,price\n";
    for (const auto& ins : pc.instruments) {
        const fme::PathState& st = state_at(ins.t);
        double price;
        if (ins.type == "survivor_bond") {
            if (ins.dates.size() != 1)
                throw std::invalid_argument("price: survivor_bond needs exactly one date");
            price = fme::survivor_bond_price(st, curve, ins.dates.front(), ins.x);
        } else if (ins.type == "annuity") {
            price = fme::annuity_value(st, curve, ins.dates, ins.x);
        } else {
            throw std::invalid_argument("price: unknown instrument type '" + ins.type + "'");
        }
        out << ins.type << ',' << fme::format_sig(ins.t) << ',' << fme::format_sig(ins.x) << ','
            << fme::format_sig(price) << '\n';
    }
    run.finish();
    return kOk;
}

int cmd_validate(const Options& opt) {
    Run run = open_run(opt);
    const auto& sc = run.cfg.scenario;
    json report;
    bool all_pass = true;
    auto record = [&](const std::string& name, bool pass, json detail) {
        detail["pass"] = pass;
        report[name] = detail;
        all_pass = all_pass && pass;
        log_info(name + std::string(pass ? ": pass" : ": FAIL"));
    };

    // Drift oracle on a dedicated fine grid, independent of the scenario grid.
    {
        int which = run.cfg.drift_table ? run.cfg.drift_table->example : 1;
        fme::SurfaceGrid g(0.02, 151, 301);
        fme::LevyScalarVol vol{fme::VolKind::improvement_vol,
                               fme::example_loading_surface(which, fme::ExampleField::b, g, sc.driver)};
        fme::Surface a = fme::drift_j_levy(vol, sc.driver);
        double sup_rel = 0.0;
        for (std::size_t i = 0; i < g.n_s; ++i)
            for (std::size_t j = 0; j < g.n_z; ++j) {
                double ref =
                    fme::example_closed_form(which, fme::ExampleField::a, g.s(i), g.z(j) - g.s(i), sc.driver);
                sup_rel = std::max(sup_rel, std::abs(a.at(i, j) - ref) / std::max(1.0, std::abs(ref)));
            }
        record("drift_oracle", sup_rel <= 1e-3, {{"example", which}, {"sup_rel_error", sup_rel}});
    }

    auto prep = fme::prepare_scenario(sc);
    auto ens = fme::simulate_ensemble(prep, opt.threads);
    write_martingale_csv(ens, run.out_path("martingale.csv"));

    if (!ens.triples.empty()) {
        std::size_t within = 0;
        double worst = 0.0;
        for (const auto& ts : ens.triples) {
            auto st = fme::martingale_diagnostic(ens, ts.triple.t, ts.triple.T, ts.triple.x);
            if (std::abs(st.z) <= 3.0) ++within;
            worst = std::max(worst, std::abs(st.z));
        }
        bool pass = within + 1 >= ens.triples.size();  // all but at most one
        record("martingale_band", pass,
               {{"triples", ens.triples.size()}, {"within_3se", within}, {"worst_abs_z", worst}});
    }

    if (!ens.identity_sup.empty()) {
        double scale = 1.0;
        for (double v : prep.mu0.values()) scale = std::max(scale, std::abs(v));
        double bound = 10.0 * (prep.dt + sc.grid.h * sc.grid.h) * scale;
        double worst = 0.0;
        for (double v : ens.identity_sup) worst = std::max(worst, v);
        record("identity_diagnostic", worst <= bound, {{"sup", worst}, {"bound", bound}});
    }

    if (run.cfg.cohort) {
        const auto& cc = *run.cfg.cohort;
        double x = prep.cohorts.empty() ? 0.0 : prep.cohorts.front();
        auto path = fme::simulate_path(prep, 0);
        auto haz = fme::accumulate_hazard(path, x);
        auto rng = fme::path_rng(prep.seed, prep.n_paths + 1);
        auto sample = fme::sample_death_times(haz.hazard, x, cc.n_individuals, rng);
        auto lln = fme::lln_diagnostic(sample, cc.lln_t);
        record("lln", lln.abs_error <= lln.ci_halfwidth,
               {{"abs_error", lln.abs_error}, {"ci_halfwidth", lln.ci_halfwidth}});
        auto resid = fme::compensator_residual(sample, haz.hazard.times());
        bool pass = true;
        double worst = 0.0;
        for (const auto& r : resid) {
            if (std::abs(r.mean) < 1e-12) continue;  // roundoff, e.g. at a birth knot
            if (r.std_err > 0.0) {
                double z = std::abs(r.mean) / r.std_err;
                worst = std::max(worst, z);
                pass = pass && z <= 3.0;
            } else {
                pass = false;
            }
        }
        record("compensator", pass, {{"worst_abs_z", worst}});
    }

    std::ofstream(run.out_path("diagnostics.json")) << diagnostics_json(ens).dump(2) << '\n';
    report["all_pass"] = all_pass;
    std::ofstream(run.out_path("validate_report.json")) << report.dump(2) << '\n';
    run.finish();
    return all_pass ? kOk : kDiagnosticFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward mortality surface toolkit"};
    app.require_subcommand(1);

    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "config file (JSON)")->required();
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option_function<std::uint64_t>(
            "--seed", [&](std::uint64_t v) { opt.seed = v; }, "seed override");
        sub->add_option_function<std::size_t>(
            "--paths", [&](std::size_t v) { opt.paths = v; }, "path-count override");
        sub->add_option("--threads", opt.threads, "worker thread count");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run a scenario ensemble");
    CLI::App* drift = app.add_subcommand("drift-table", "emit the consistency drift surface");
    CLI::App* cohort = app.add_subcommand("cohort", "sample cohort death times");
    CLI::App* price = app.add_subcommand("price", "value survivor instruments");
    CLI::App* validate = app.add_subcommand("validate", "run the diagnostic battery");
    for (CLI::App* sub : {sim, drift, cohort, price, validate}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return cmd_simulate(opt);
        if (drift->parsed()) return cmd_drift_table(opt);
        if (cohort->parsed()) return cmd_cohort(opt);
        if (price->parsed()) return cmd_price(opt);
        if (validate->parsed()) return cmd_validate(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDomainError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfigError;
    }
    return kOk;
}
