// Command line front end: one experiment per invocation, CSV tables plus
// summary.json written into --out. Exit codes: 0 success, 2 invalid
// configuration or arguments, 1 runtime failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bapc/bapc.hpp"

namespace fs = std::filesystem;

namespace {

/// One config-file key: same spelling as the long flag, an assigner that
/// pulls a typed value out of the JSON, and a printer for the conflict log.
struct KeyBinding {
    std::string key;
    std::function<void(const nlohmann::json&)> assign;
    std::function<std::string()> show;
};

/// Defaults come from the file, the command line wins on conflict, unknown
/// keys are rejected outright.
void apply_config_file(const std::string& path, const CLI::App& cmd,
                       const std::vector<KeyBinding>& bindings) {
    std::ifstream file(path);
    if (!file.good()) throw bapc::ValidationError("config: cannot open '" + path + "'");
    nlohmann::json data;
    try {
        data = nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
        throw bapc::ValidationError(std::string("config: ") + e.what());
    }
    if (!data.is_object())
        throw bapc::ValidationError("config: top level must be a JSON object");

    for (const auto& [key, value] : data.items()) {
        const KeyBinding* binding = nullptr;
        for (const auto& candidate : bindings)
            if (candidate.key == key) binding = &candidate;
        if (binding == nullptr)
            throw bapc::ValidationError("config: unknown key '" + key + "'");
        if (cmd.count("--" + key) > 0) {
            std::fprintf(stderr, "config: '%s' = %s from file overridden by --%s=%s\n",
                         key.c_str(), value.dump().c_str(), key.c_str(),
                         binding->show().c_str());
            continue;
        }
        try {
            binding->assign(value);
        } catch (const nlohmann::json::exception& e) {
            throw bapc::ValidationError("config: key '" + key + "': " + e.what());
        }
    }
}

std::vector<double> parse_radii(const std::string& text) {
    std::istringstream in(text);
    double lo = 0.0, hi = 0.0, step = 0.0;
    char sep1 = 0, sep2 = 0;
    if (!(in >> lo >> sep1 >> hi >> sep2 >> step) || sep1 != ':' || sep2 != ':' ||
        !(in >> std::ws).eof())
        throw bapc::ValidationError("radii must look like lo:hi:step, got '" + text + "'");
    if (!(lo > 0.0) || !(step > 0.0) || !(hi >= lo))
        throw bapc::ValidationError("radii need 0 < lo <= hi and step > 0");
    std::vector<double> radii;
    for (double r = lo; r <= hi + 1e-9; r += step) radii.push_back(r);
    return radii;
}

fs::path prepare_out_dir(const std::string& out) {
    const fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void report(const fs::path& path) { std::printf("wrote %s\n", path.string().c_str()); }

struct DragCli {
    std::string noise = "gaussian";
    double sigma = 2.0;
    std::uint64_t seed = 0;
    std::string out = "bapc-out";
    std::string config_path;
    bool allow_extrapolation = false;
};

void run_drag_command(const DragCli& cli, const CLI::App& cmd) {
    DragCli resolved = cli;
    if (!cli.config_path.empty()) {
        const std::vector<KeyBinding> bindings = {
            {"noise", [&](const nlohmann::json& v) { resolved.noise = v.get<std::string>(); },
             [&] { return resolved.noise; }},
            {"sigma", [&](const nlohmann::json& v) { resolved.sigma = v.get<double>(); },
             [&] { return bapc::io::format_real(resolved.sigma); }},
            {"seed", [&](const nlohmann::json& v) { resolved.seed = v.get<std::uint64_t>(); },
             [&] { return std::to_string(resolved.seed); }},
            {"out", [&](const nlohmann::json& v) { resolved.out = v.get<std::string>(); },
             [&] { return resolved.out; }},
            {"allow-extrapolation",
             [&](const nlohmann::json& v) { resolved.allow_extrapolation = v.get<bool>(); },
             [&] { return resolved.allow_extrapolation ? "true" : "false"; }},
        };
        apply_config_file(cli.config_path, cmd, bindings);
    }

    bapc::drag::DragRunOptions opts;
    opts.noise.kind = bapc::io::parse_noise_kind(resolved.noise);
    opts.noise.sigma = opts.noise.kind == bapc::drag::NoiseKind::none ? 0.0 : resolved.sigma;
    opts.seed = resolved.seed;
    if (opts.noise.kind != bapc::drag::NoiseKind::none && !resolved.allow_extrapolation &&
        opts.noise.sigma != 1.0 && opts.noise.sigma != 2.0 && opts.noise.sigma != 3.0)
        throw bapc::ValidationError(
            "sigma " + bapc::io::format_real(opts.noise.sigma) +
            " is outside the studied grid {1,2,3}; pass --allow-extrapolation to run anyway");

    const fs::path out_dir = prepare_out_dir(resolved.out);
    const auto run = bapc::drag::run_drag(opts);

    bapc::drag::CriteriaSweepOptions sweep_opts;
    sweep_opts.noises = {opts.noise};
    sweep_opts.seed = resolved.seed;
    const auto scenarios = bapc::drag::run_criteria_sweep(sweep_opts);

    bapc::io::write_fits_csv(out_dir / "fits.csv", run.curves);
    report(out_dir / "fits.csv");
    bapc::io::write_criteria_csv(out_dir / "criteria.csv", scenarios);
    report(out_dir / "criteria.csv");
    bapc::io::write_delta_sweep_csv(out_dir / "delta_sweep.csv", scenarios);
    report(out_dir / "delta_sweep.csv");
    bapc::io::write_summary(out_dir / "summary.json", bapc::io::drag_summary(opts, run));
    report(out_dir / "summary.json");
}

struct NewsvendorCli {
    std::string corrector = "rf";
    double delta = 0.1;
    int repeats = 100;
    std::uint64_t seed = 0;
    std::string out = "bapc-out";
    std::string config_path;
};

void run_newsvendor_command(const NewsvendorCli& cli, const CLI::App& cmd) {
    NewsvendorCli resolved = cli;
    if (!cli.config_path.empty()) {
        const std::vector<KeyBinding> bindings = {
            {"corrector",
             [&](const nlohmann::json& v) { resolved.corrector = v.get<std::string>(); },
             [&] { return resolved.corrector; }},
            {"delta", [&](const nlohmann::json& v) { resolved.delta = v.get<double>(); },
             [&] { return bapc::io::format_real(resolved.delta); }},
            {"repeats", [&](const nlohmann::json& v) { resolved.repeats = v.get<int>(); },
             [&] { return std::to_string(resolved.repeats); }},
            {"seed", [&](const nlohmann::json& v) { resolved.seed = v.get<std::uint64_t>(); },
             [&] { return std::to_string(resolved.seed); }},
            {"out", [&](const nlohmann::json& v) { resolved.out = v.get<std::string>(); },
             [&] { return resolved.out; }},
        };
        apply_config_file(cli.config_path, cmd, bindings);
    }

    bapc::newsvendor::NewsvendorConfig cfg;
    cfg.mc_repeats = resolved.repeats;
    cfg.seed = resolved.seed;
    const auto kind = bapc::io::parse_corrector(resolved.corrector);

    const fs::path out_dir = prepare_out_dir(resolved.out);
    const auto records = bapc::newsvendor::generate_newsvendor_dataset(cfg);
    const auto in_sample = bapc::newsvendor::run_single_sample(cfg, kind, resolved.delta);
    const auto mc = bapc::newsvendor::monte_carlo_cv(cfg, kind, resolved.delta);
    const auto opt = bapc::newsvendor::optimize_delta(cfg, kind);

    bapc::io::write_months_csv(out_dir / "months.csv", records);
    report(out_dir / "months.csv");
    bapc::io::write_corrections_csv(out_dir / "corrections.csv", records, in_sample);
    report(out_dir / "corrections.csv");
    bapc::io::write_shift_histogram_csv(out_dir / "shift_histogram.csv", kind,
                                        resolved.delta, mc);
    report(out_dir / "shift_histogram.csv");
    bapc::io::write_delta_curve_csv(out_dir / "delta_curve.csv", opt);
    report(out_dir / "delta_curve.csv");
    bapc::io::write_summary(
        out_dir / "summary.json",
        bapc::io::newsvendor_summary(cfg, kind, resolved.delta, in_sample, mc, opt));
    report(out_dir / "summary.json");
}

struct CriteriaCli {
    std::vector<double> etas = {1.0, 0.75, 0.5, 0.3, 0.1};
    std::string radii = "0.1:2.0:0.1";
    std::uint64_t seed = 0;
    std::string out = "bapc-out";
    std::string config_path;
};

void run_criteria_command(const CriteriaCli& cli, const CLI::App& cmd) {
    CriteriaCli resolved = cli;
    if (!cli.config_path.empty()) {
        const std::vector<KeyBinding> bindings = {
            {"eta",
             [&](const nlohmann::json& v) { resolved.etas = v.get<std::vector<double>>(); },
             [&] {
                 std::string text;
                 for (double eta : resolved.etas)
                     text += (text.empty() ? "" : " ") + bapc::io::format_real(eta);
                 return text;
             }},
            {"radii", [&](const nlohmann::json& v) { resolved.radii = v.get<std::string>(); },
             [&] { return resolved.radii; }},
            {"seed", [&](const nlohmann::json& v) { resolved.seed = v.get<std::uint64_t>(); },
             [&] { return std::to_string(resolved.seed); }},
            {"out", [&](const nlohmann::json& v) { resolved.out = v.get<std::string>(); },
             [&] { return resolved.out; }},
        };
        apply_config_file(cli.config_path, cmd, bindings);
    }

    bapc::drag::CriteriaSweepOptions opts;
    opts.etas = resolved.etas;
    opts.radii = parse_radii(resolved.radii);
    opts.seed = resolved.seed;

    const fs::path out_dir = prepare_out_dir(resolved.out);
    const auto scenarios = bapc::drag::run_criteria_sweep(opts);

    bapc::io::write_criteria_csv(out_dir / "criteria.csv", scenarios);
    report(out_dir / "criteria.csv");
    bapc::io::write_delta_sweep_csv(out_dir / "delta_sweep.csv", scenarios);
    report(out_dir / "delta_sweep.csv");
    bapc::io::write_summary(out_dir / "summary.json",
                            bapc::io::criteria_summary(opts, scenarios));
    report(out_dir / "summary.json");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local surrogate explanations via base-model parameter shifts"};
    app.require_subcommand(1);

    DragCli drag_cli;
    CLI::App* drag_cmd = app.add_subcommand(
        "drag", "Falling-body experiment: fit curves and criteria tables");
    drag_cmd->add_option("--noise", drag_cli.noise, "Noise kind")
        ->check(CLI::IsMember({"none", "gaussian", "uniform"}));
    drag_cmd->add_option("--sigma", drag_cli.sigma, "Noise scale, studied grid {1,2,3}");
    drag_cmd->add_option("--seed", drag_cli.seed, "Root seed");
    drag_cmd->add_option("--out", drag_cli.out, "Output directory");
    drag_cmd->add_option("--config", drag_cli.config_path, "JSON config file (flags win)");
    drag_cmd->add_flag("--allow-extrapolation", drag_cli.allow_extrapolation,
                       "Permit sigma outside {1,2,3}");

    NewsvendorCli nv_cli;
    CLI::App* nv_cmd = app.add_subcommand(
        "newsvendor", "Newsvendor experiment: parameter-shift Monte Carlo");
    nv_cmd->add_option("--corrector", nv_cli.corrector, "Corrector kind")
        ->check(CLI::IsMember({"rf", "mlp"}));
    nv_cmd->add_option("--delta", nv_cli.delta, "Demand neighborhood half-width");
    nv_cmd->add_option("--repeats", nv_cli.repeats, "Monte Carlo repeats");
    nv_cmd->add_option("--seed", nv_cli.seed, "Root seed");
    nv_cmd->add_option("--out", nv_cli.out, "Output directory");
    nv_cmd->add_option("--config", nv_cli.config_path, "JSON config file (flags win)");

    CriteriaCli crit_cli;
    CLI::App* crit_cmd = app.add_subcommand(
        "criteria-sweep", "Accuracy/fidelity violation fractions over eta and radius");
    crit_cmd->add_option("--eta", crit_cli.etas, "Criteria thresholds in (0,1]")
        ->delimiter(',');
    crit_cmd->add_option("--radii", crit_cli.radii, "Radius grid as lo:hi:step");
    crit_cmd->add_option("--seed", crit_cli.seed, "Root seed");
    crit_cmd->add_option("--out", crit_cli.out, "Output directory");
    crit_cmd->add_option("--config", crit_cli.config_path, "JSON config file (flags win)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(drag_cmd)) run_drag_command(drag_cli, *drag_cmd);
        if (app.got_subcommand(nv_cmd)) run_newsvendor_command(nv_cli, *nv_cmd);
        if (app.got_subcommand(crit_cmd)) run_criteria_command(crit_cli, *crit_cmd);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
