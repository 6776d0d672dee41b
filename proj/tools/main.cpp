#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cascade/metrics.hpp"
#include "cascade/scan.hpp"
#include "cascade/scheme.hpp"
#include "cascade/version.hpp"

namespace {

using nlohmann::json;

struct Options {
    double eta = 0.6;
    double xi = 0.0;
    double eps = 0.8;
    double mu = -1.0;
    double p = 0.5;
    int layers = 1;
    double A = 2.0;
    double B = 0.0;
    bool use_ab = false;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    int threads = 1;

    // region axes
    std::string x_param = "eta";
    double x_min = 0.0, x_max = 1.0;
    int x_steps = 201;
    std::string y_param = "eps";
    double y_min = 0.0, y_max = 1.0;
    int y_steps = 201;
    std::string compare = "info";
};

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            flatten(value, prefix.empty() ? key : prefix + "." + key, rows);
        }
    } else if (j.is_array()) {
        std::size_t i = 0;
        for (const auto& value : j) {
            flatten(value, prefix + "." + std::to_string(i++), rows);
        }
    } else if (j.is_number_float()) {
        rows.emplace_back(prefix, cascade::format_double(j.get<double>()));
    } else if (j.is_boolean()) {
        rows.emplace_back(prefix, j.get<bool>() ? "true" : "false");
    } else if (j.is_null()) {
        rows.emplace_back(prefix, "");
    } else if (j.is_string()) {
        rows.emplace_back(prefix, j.get<std::string>());
    } else {
        rows.emplace_back(prefix, j.dump());
    }
}

std::string report_to_csv(const json& report) {
    std::ostringstream os;
    os << "# spec_version " << cascade::kSpecVersion << "\n";
    os << "key,value\n";
    std::vector<std::pair<std::string, std::string>> rows;
    flatten(report, "", rows);
    for (const auto& [key, value] : rows) os << key << "," << value << "\n";
    return os.str();
}

void emit_report(const json& report, const Options& opt) {
    const std::string text =
        opt.format == "json" ? report.dump(2) + "\n" : report_to_csv(report);
    if (opt.out.empty()) {
        std::cout << text;
        return;
    }
    const std::filesystem::path path(opt.out);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open output file " + opt.out);
    file << text;
}

cascade::CopierModel make_copier(const Options& opt) {
    if (opt.use_ab) {
        return cascade::general_ab_canonical(opt.A, opt.B);
    }
    return cascade::NoisyWZ(opt.eps, opt.mu);
}

json params_json(const Options& opt) {
    json j{{"layers", opt.layers}, {"eta", opt.eta}, {"xi", opt.xi}, {"p", opt.p}};
    if (opt.use_ab) {
        j["copier"] = "general_ab";
        j["A"] = opt.A;
        j["B"] = opt.B;
    } else {
        j["copier"] = "noisy_wz";
        j["eps"] = opt.eps;
        j["mu"] = opt.mu;
    }
    return j;
}

json info_json(const cascade::InfoResult& info) {
    return {{"mutual_information", info.i_m},
            {"eta_e", info.eta_e ? json(*info.eta_e) : json(nullptr)}};
}

json ml_json(const cascade::MLResult& ml) {
    return {{"q", ml.q},
            {"degenerate", ml.degenerate},
            {"estimator_map", ml.estimator_map}};
}

int cmd_detect(const Options& opt) {
    const cascade::SchemeConfig cfg(opt.layers, make_copier(opt),
                                    cascade::DetectorModel(opt.eta, opt.xi), opt.p);
    const cascade::OutcomeTable table = cascade::build_outcome_table(cfg);
    const auto info = cascade::evaluate_info(table, opt.p);
    const auto ml = cascade::ml_estimate(table, opt.p);

    json report{{"spec_version", cascade::kSpecVersion},
                {"command", "detect"},
                {"params", params_json(opt)},
                {"outcome_table", cascade::outcome_table_to_json(table)},
                {"info", info_json(info)},
                {"ml", ml_json(ml)},
                {"entropy_prior", cascade::binary_entropy(opt.p)}};

    if (!opt.use_ab && opt.xi == 0.0 && opt.mu == -1.0) {
        json checks{{"eta_e_recursion", cascade::eta_e_recursion(opt.eps, opt.eta, opt.layers)},
                    {"eta_e_limit", opt.eps > 0.5 ? 2.0 - 1.0 / opt.eps : 0.0},
                    {"gain_threshold_eps", 1.0 / (2.0 - opt.eta)}};
        if (opt.p > 0.0 && opt.p < 1.0) {
            checks["gain_condition"] = cascade::ml_gain_condition(opt.eps, opt.eta, 0.0, opt.p);
        }
        if (opt.eps == 1.0) {
            const auto simple = cascade::simple_scheme_probs(opt.eta, opt.layers, opt.p);
            checks["simple_scheme"] = {
                {"p_count_given_photon", simple.p_count_given_photon},
                {"p_nophoton_given_nocount", simple.p_nophoton_given_nocount}};
        }
        report["cross_checks"] = std::move(checks);
    } else {
        report["cross_checks"] = nullptr;
    }
    emit_report(report, opt);
    return 0;
}

int cmd_mlcompare(const Options& opt) {
    const cascade::DetectorModel detector(opt.eta, opt.xi);
    const cascade::CopierModel copier = make_copier(opt);
    const auto bare = cascade::build_outcome_table(cascade::SchemeConfig(0, copier, detector, opt.p));
    const auto one = cascade::build_outcome_table(cascade::SchemeConfig(1, copier, detector, opt.p));
    const auto ml0 = cascade::ml_estimate(bare, opt.p);
    const auto ml1 = cascade::ml_estimate(one, opt.p);

    json report{{"spec_version", cascade::kSpecVersion},
                {"command", "mlcompare"},
                {"params", params_json(opt)},
                {"bare", ml_json(ml0)},
                {"one_copier", ml_json(ml1)},
                {"gain_observed", ml1.q > ml0.q}};

    const bool closed_forms_apply = !opt.use_ab && opt.mu == -1.0;
    report["closed_forms_apply"] = closed_forms_apply;
    if (closed_forms_apply) {
        const auto regime = cascade::ml_usefulness(opt.eps, opt.eta, opt.xi, opt.p);
        const char* name = regime == cascade::MLUsefulness::count_means_photon
                               ? "count-means-photon"
                               : regime == cascade::MLUsefulness::count_means_vacuum_like
                                     ? "count-means-vacuum-like"
                                     : "degenerate";
        report["usefulness"] = name;
        report["q0_closed_form"] = cascade::q0_closed_form(opt.eta, opt.xi, opt.p);
        report["q1_closed_form"] = cascade::q1_closed_form(opt.eps, opt.eta, opt.xi, opt.p);
        if (regime == cascade::MLUsefulness::count_means_photon && opt.p > 0.0) {
            report["gain_condition"] =
                cascade::ml_gain_condition(opt.eps, opt.eta, opt.xi, opt.p);
        } else {
            report["gain_condition"] = nullptr;
        }
    }
    emit_report(report, opt);
    return 0;
}

json dataset_to_json(const cascade::Dataset& dataset) {
    return {{"name", dataset.name}, {"columns", dataset.columns}, {"rows", dataset.rows}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot open output file " + path.string());
    file << text;
}

void write_dataset_csv(const std::filesystem::path& dir, const cascade::Dataset& dataset) {
    std::ofstream file(dir / (dataset.name + ".csv"));
    if (!file) throw std::runtime_error("cannot open output file in " + dir.string());
    cascade::write_csv(file, dataset);
}

int cmd_region(const Options& opt) {
    if (opt.out.empty()) throw std::invalid_argument("region requires --out <directory>");
    cascade::SweepSpec spec;
    spec.x = {cascade::parse_sweep_param(opt.x_param), opt.x_min, opt.x_max, opt.x_steps};
    spec.y = {cascade::parse_sweep_param(opt.y_param), opt.y_min, opt.y_max, opt.y_steps};
    spec.layers = opt.layers;
    spec.fixed = {opt.eta, opt.eps, opt.mu, opt.xi, opt.p, opt.A, opt.B};
    if (opt.compare == "info") {
        spec.comparison = cascade::GainComparison::info_gain;
    } else if (opt.compare == "ml") {
        spec.comparison = cascade::GainComparison::ml_gain;
    } else if (opt.compare == "ratio") {
        spec.comparison = cascade::GainComparison::eta_e_ratio;
    } else {
        throw std::invalid_argument("compare must be one of info, ml, ratio");
    }

    const cascade::RegionGrid grid = cascade::run_sweep(spec, opt.threads);
    const auto grid_data = cascade::grid_dataset("region_grid", grid);
    const auto boundary_data = cascade::boundary_dataset("region_boundary", grid);

    json meta{{"spec_version", cascade::kSpecVersion},
              {"command", "region"},
              {"compare", opt.compare},
              {"layers", opt.layers},
              {"x", {{"param", opt.x_param}, {"min", opt.x_min}, {"max", opt.x_max}, {"steps", opt.x_steps}}},
              {"y", {{"param", opt.y_param}, {"min", opt.y_min}, {"max", opt.y_max}, {"steps", opt.y_steps}}},
              {"fixed",
               {{"eta", opt.eta}, {"eps", opt.eps}, {"mu", opt.mu}, {"xi", opt.xi}, {"p", opt.p},
                {"A", opt.A}, {"B", opt.B}}}};

    const std::filesystem::path dir(opt.out);
    std::filesystem::create_directories(dir);
    if (opt.format == "json") {
        json everything = meta;
        everything["datasets"] = {dataset_to_json(grid_data), dataset_to_json(boundary_data)};
        write_text(dir / "region.json", everything.dump(2) + "\n");
    } else {
        write_dataset_csv(dir, grid_data);
        write_dataset_csv(dir, boundary_data);
        write_text(dir / "region_meta.json", meta.dump(2) + "\n");
    }
    return 0;
}

int cmd_figure(const std::string& id, const Options& opt) {
    if (opt.out.empty()) throw std::invalid_argument("figure requires --out <directory>");
    const cascade::FigurePreset preset = cascade::figure_preset(id, opt.threads);
    const std::filesystem::path dir(opt.out);
    std::filesystem::create_directories(dir);
    for (const auto& dataset : preset.datasets) write_dataset_csv(dir, dataset);
    write_text(dir / (preset.id + "_meta.json"), preset.metadata.dump(2) + "\n");
    return 0;
}

int cmd_oracle(const Options& opt) {
    const cascade::DetectorModel detector(opt.eta, opt.xi);
    const cascade::SchemeConfig cfg(opt.layers, make_copier(opt), detector, opt.p);
    const auto exact = cascade::build_outcome_table(cfg);
    const auto sample = cascade::sample_outcomes(cfg, opt.trials, opt.seed);

    double max_dev_mc = 0.0;
    double max_ratio = 0.0;
    bool mc_pass = true;
    auto check_row = [&](const std::vector<double>& probs, const std::vector<std::uint64_t>& counts,
                         std::uint64_t n) {
        if (n == 0) return;
        for (std::size_t j = 0; j < probs.size(); ++j) {
            const double freq = static_cast<double>(counts[j]) / static_cast<double>(n);
            const double dev = std::abs(freq - probs[j]);
            const double bound =
                4.0 * std::sqrt(probs[j] * (1.0 - probs[j]) / static_cast<double>(n));
            max_dev_mc = std::max(max_dev_mc, dev);
            if (bound > 0.0) {
                max_ratio = std::max(max_ratio, dev / bound);
            }
            if (dev > bound) mc_pass = false;
        }
    };
    check_row(exact.p_given_photon(), sample.counts_given_photon, sample.photon_trials());
    check_row(exact.p_given_vacuum(), sample.counts_given_vacuum, sample.vacuum_trials());

    // Density-matrix reference at eps = 1, mu = -1 (the CNOT case) with the
    // same detector and the prior-mixed input.
    const auto perfect = cascade::build_outcome_table(
        cascade::SchemeConfig(1, cascade::NoisyWZ(1.0, -1.0), detector, opt.p));
    const cascade::DensityMatrix2 mixed{{{std::complex<double>(1.0 - opt.p), 0.0},
                                         {0.0, std::complex<double>(opt.p)}}};
    const auto oracle = cascade::cnot_oracle(mixed, detector);
    double max_dev_cnot = 0.0;
    for (int j = 0; j < 4; ++j) {
        const double expected = opt.p * perfect.p_given_photon()[j] +
                                (1.0 - opt.p) * perfect.p_given_vacuum()[j];
        max_dev_cnot = std::max(max_dev_cnot, std::abs(oracle.outcome_probs[j] - expected));
    }
    const bool cnot_pass = max_dev_cnot < 1e-12;
    const bool pass = mc_pass && cnot_pass;

    std::cout << "monte-carlo max |P_hat - P| = " << cascade::format_double(max_dev_mc)
              << " (worst dev / 4-sigma bound = " << cascade::format_double(max_ratio)
              << "): " << (mc_pass ? "PASS" : "FAIL") << "\n";
    std::cout << "cnot-oracle max |P_cnot - P_table| = " << cascade::format_double(max_dev_cnot)
              << " (tolerance 1e-12): " << (cnot_pass ? "PASS" : "FAIL") << "\n";
    std::cout << "oracle: " << (pass ? "PASS" : "FAIL") << "\n";

    if (!opt.out.empty()) {
        json report{{"spec_version", cascade::kSpecVersion},
                    {"command", "oracle"},
                    {"params", params_json(opt)},
                    {"trials", opt.trials},
                    {"seed", opt.seed},
                    {"monte_carlo",
                     {{"max_abs_dev", max_dev_mc},
                      {"max_dev_over_bound", max_ratio},
                      {"photon_trials", sample.photon_trials()},
                      {"vacuum_trials", sample.vacuum_trials()},
                      {"pass", mc_pass}}},
                    {"cnot",
                     {{"max_abs_dev", max_dev_cnot}, {"tolerance", 1e-12}, {"pass", cnot_pass}}},
                    {"pass", pass}};
        emit_report(report, opt);
    }
    return pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    Options opt;
    CLI::App app{"copier-cascade: exact statistics, information metrics and parameter sweeps "
                 "for copier-enhanced photon detection"};
    app.require_subcommand(1);
    app.set_config("--config", "", "plain-text config file with key = value lines");

    app.add_option("--eta", opt.eta, "detector quantum efficiency")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--xi", opt.xi, "dark-count parameter (click prob on vacuum is eta*xi)")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--eps", opt.eps, "copier success probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--mu", opt.mu, "copier failure output (-1 vacuum, 0 noise, +1 photons)")
        ->check(CLI::Range(-1.0, 1.0))
        ->capture_default_str();
    app.add_option("--p", opt.p, "a priori photon probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app.add_option("--N", opt.layers, "number of copier layers (2^N detectors)")
        ->check(CLI::Range(0, 16))
        ->capture_default_str();
    auto* opt_a = app.add_option("--A", opt.A, "copier parameter A = 1 + a1 - a2")
                      ->check(CLI::Range(0.0, 2.0));
    auto* opt_b = app.add_option("--B", opt.B, "copier parameter B = 1 + b1 - b2")
                      ->check(CLI::Range(0.0, 2.0));
    app.add_option("--trials", opt.trials, "Monte Carlo trials")->capture_default_str();
    app.add_option("--seed", opt.seed, "Monte Carlo seed")->capture_default_str();
    app.add_option("--out,-o", opt.out, "output file (detect/mlcompare/oracle) or directory "
                                        "(region/figure)");
    app.add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--threads", opt.threads, "sweep evaluation threads")
        ->check(CLI::Range(1, 256))
        ->envname("COPIER_CASCADE_THREADS");

    auto* detect = app.add_subcommand("detect", "outcome table, information and ML metrics "
                                                "of one configuration");
    detect->fallthrough();
    auto* mlcompare = app.add_subcommand("mlcompare", "bare-detector vs one-copier ML guessing");
    mlcompare->fallthrough();

    auto* region = app.add_subcommand("region", "2-D gain-region sweep with boundary extraction");
    region->fallthrough();
    region->add_option("--x-param", opt.x_param, "x axis parameter")->capture_default_str();
    region->add_option("--x-min", opt.x_min, "x axis minimum")->capture_default_str();
    region->add_option("--x-max", opt.x_max, "x axis maximum")->capture_default_str();
    region->add_option("--x-steps", opt.x_steps, "x axis grid points")->capture_default_str();
    region->add_option("--y-param", opt.y_param, "y axis parameter")->capture_default_str();
    region->add_option("--y-min", opt.y_min, "y axis minimum")->capture_default_str();
    region->add_option("--y-max", opt.y_max, "y axis maximum")->capture_default_str();
    region->add_option("--y-steps", opt.y_steps, "y axis grid points")->capture_default_str();
    region->add_option("--compare", opt.compare, "gain comparison: info, ml or ratio")
        ->check(CLI::IsMember({"info", "ml", "ratio"}))
        ->capture_default_str();

    auto* figure = app.add_subcommand("figure", "emit a ready-made figure dataset");
    figure->fallthrough();
    std::string figure_id;
    figure->add_option("id", figure_id, "figure id (fig2..fig7)")->required();

    auto* oracle = app.add_subcommand("oracle", "cross-check the exact tables against the Monte "
                                                "Carlo sampler and the density-matrix reference");
    oracle->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    opt.use_ab = !opt_a->empty() || !opt_b->empty();
    if (opt.use_ab && (opt_a->empty() || opt_b->empty())) {
        std::cerr << "error: A and B must be given together\n";
        return 2;
    }

    try {
        if (app.got_subcommand(detect)) return cmd_detect(opt);
        if (app.got_subcommand(mlcompare)) return cmd_mlcompare(opt);
        if (app.got_subcommand(region)) return cmd_region(opt);
        if (app.got_subcommand(figure)) return cmd_figure(figure_id, opt);
        if (app.got_subcommand(oracle)) {
            if (app.get_option("--xi")->empty()) opt.xi = 0.01; // oracle default
            return cmd_oracle(opt);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "error: no command given\n";
    return 2;
}
