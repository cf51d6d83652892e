#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bapc/drag.hpp"
#include "bapc/errors.hpp"
#include "bapc/newsvendor.hpp"

namespace bapc::io {

/// 17 significant digits round-trip any binary64 value exactly.
inline std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string noise_kind_name(drag::NoiseKind kind) {
    switch (kind) {
        case drag::NoiseKind::none: return "none";
        case drag::NoiseKind::gaussian: return "gaussian";
        case drag::NoiseKind::uniform: return "uniform";
    }
    throw ValidationError("noise kind out of range");
}

inline drag::NoiseKind parse_noise_kind(const std::string& name) {
    if (name == "none") return drag::NoiseKind::none;
    if (name == "gaussian") return drag::NoiseKind::gaussian;
    if (name == "uniform") return drag::NoiseKind::uniform;
    throw ValidationError("noise must be none, gaussian or uniform, got '" + name + "'");
}

inline std::string corrector_name(newsvendor::CorrectorChoice kind) {
    return kind == newsvendor::CorrectorChoice::random_forest ? "rf" : "mlp";
}

inline newsvendor::CorrectorChoice parse_corrector(const std::string& name) {
    if (name == "rf") return newsvendor::CorrectorChoice::random_forest;
    if (name == "mlp") return newsvendor::CorrectorChoice::mlp;
    throw ValidationError("corrector must be rf or mlp, got '" + name + "'");
}

using CsvRow = std::vector<std::string>;

/// Header plus rows, comma separated, LF line endings. Cells are written
/// verbatim, so none may contain a separator; every value we emit is a
/// number, a short name, or empty.
inline void write_csv(const std::filesystem::path& path, const CsvRow& header,
                      const std::vector<CsvRow>& rows) {
    std::string text;
    const auto append_row = [&text, &header](const CsvRow& cells) {
        if (cells.size() != header.size())
            throw ValidationError("csv: row width differs from header");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of(",\"\r\n") != std::string::npos)
                throw ValidationError("csv: cell contains a separator: '" + cells[i] + "'");
            if (i > 0) text += ',';
            text += cells[i];
        }
        text += '\n';
    };
    append_row(header);
    for (const CsvRow& row : rows) append_row(row);

    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) throw IoError("cannot write " + path.string());
}

inline void write_fits_csv(const std::filesystem::path& path,
                           const std::vector<drag::CurveRow>& curves) {
    const CsvRow header = {"t",          "v_true",           "v_noisy_or_empty",
                           "f_theta",    "f_corrected",      "f_theta_prime_I1",
                           "f_tilde_I1", "f_theta_prime_I2", "f_tilde_I2"};
    std::vector<CsvRow> rows;
    rows.reserve(curves.size());
    for (const auto& r : curves)
        rows.push_back({format_real(r.t), format_real(r.v_true),
                        r.v_noisy ? format_real(*r.v_noisy) : std::string(),
                        format_real(r.f_theta), format_real(r.f_corrected),
                        format_real(r.f_theta_prime_i1), format_real(r.f_tilde_i1),
                        format_real(r.f_theta_prime_i2), format_real(r.f_tilde_i2)});
    write_csv(path, header, rows);
}

inline void write_criteria_csv(const std::filesystem::path& path,
                               const std::vector<drag::CriteriaScenario>& scenarios) {
    const CsvRow header = {"noise", "sigma",         "eta",
                           "t",     "eps",           "abs_delta_eps",
                           "abs_fidelity_gap",       "c1_ok",
                           "c2_ok", "eps_is_zero"};
    std::vector<CsvRow> rows;
    for (const auto& scenario : scenarios) {
        const std::string noise = noise_kind_name(scenario.noise.kind);
        const std::string sigma = format_real(scenario.noise.sigma);
        const std::string eta = format_real(scenario.eta);
        for (const auto& pt : scenario.points.points)
            rows.push_back({noise, sigma, eta, format_real(pt.x(0)), format_real(pt.eps),
                            format_real(pt.abs_delta_eps), format_real(pt.abs_fidelity_gap),
                            pt.c1_ok ? "1" : "0", pt.c2_ok ? "1" : "0",
                            pt.eps_is_zero ? "1" : "0"});
    }
    write_csv(path, header, rows);
}

inline void write_delta_sweep_csv(const std::filesystem::path& path,
                                  const std::vector<drag::CriteriaScenario>& scenarios) {
    const CsvRow header = {"noise", "sigma", "eta", "radius", "delta1_hat", "delta2_hat"};
    std::vector<CsvRow> rows;
    for (const auto& scenario : scenarios) {
        const std::string noise = noise_kind_name(scenario.noise.kind);
        const std::string sigma = format_real(scenario.noise.sigma);
        const std::string eta = format_real(scenario.eta);
        for (const auto& row : scenario.sweep)
            rows.push_back({noise, sigma, eta, format_real(row.radius),
                            format_real(row.delta1_hat), format_real(row.delta2_hat)});
    }
    write_csv(path, header, rows);
}

inline void write_months_csv(const std::filesystem::path& path,
                             const std::vector<newsvendor::MonthRecord>& records) {
    const CsvRow header = {"month_index", "demand", "order", "profit", "success",
                           "perturbed"};
    std::vector<CsvRow> rows;
    rows.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        rows.push_back({std::to_string(i), format_real(records[i].demand),
                        format_real(records[i].order), format_real(records[i].profit),
                        format_real(records[i].success), records[i].perturbed ? "1" : "0"});
    write_csv(path, header, rows);
}

inline void write_corrections_csv(const std::filesystem::path& path,
                                  const std::vector<newsvendor::MonthRecord>& records,
                                  const newsvendor::FoldRunResult& run) {
    if (run.corrections.size() != records.size())
        throw DimensionError("corrections table: run does not match the records");
    const CsvRow header = {"month_index", "demand",     "success",
                           "perturbed",   "correction", "corrected_success"};
    std::vector<CsvRow> rows;
    rows.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i)
        rows.push_back({std::to_string(i), format_real(records[i].demand),
                        format_real(records[i].success), records[i].perturbed ? "1" : "0",
                        format_real(run.corrections[i]),
                        format_real(records[i].success - run.corrections[i])});
    write_csv(path, header, rows);
}

inline void write_shift_histogram_csv(const std::filesystem::path& path,
                                      newsvendor::CorrectorChoice kind, double delta,
                                      const newsvendor::MonteCarloResult& mc) {
    const CsvRow header = {"repeat_index", "corrector", "delta", "delta_lambda"};
    const std::string corrector = corrector_name(kind);
    const std::string delta_text = format_real(delta);
    std::vector<CsvRow> rows;
    rows.reserve(mc.repeats.size());
    for (const auto& rep : mc.repeats)
        rows.push_back({std::to_string(rep.repeat_index), corrector, delta_text,
                        format_real(rep.delta_lambda)});
    write_csv(path, header, rows);
}

inline void write_delta_curve_csv(const std::filesystem::path& path,
                                  const newsvendor::DeltaOptimization& opt) {
    const CsvRow header = {"delta", "mean_delta_lambda", "std_delta_lambda"};
    std::vector<CsvRow> rows;
    rows.reserve(opt.curve.size());
    for (const auto& pt : opt.curve)
        rows.push_back({format_real(pt.delta), format_real(pt.mean_delta_lambda),
                        format_real(pt.std_delta_lambda)});
    write_csv(path, header, rows);
}

inline nlohmann::json real_array(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline nlohmann::json interval_json(const BapcResult& result) {
    return {{"center", result.neighborhood.center(0)},
            {"radius", result.neighborhood.radius},
            {"theta", real_array(result.theta())},
            {"theta_prime", real_array(result.theta_prime())},
            {"delta_theta", real_array(result.delta_theta())},
            {"delta_theta_reflected", real_array(result.delta_theta_reflected())},
            {"eps_hat_at_xn", result.eps_hat_at_xn},
            {"corrected_prediction", result.corrected_prediction},
            {"delta_f_at_xn", result.delta_f_at_xn}};
}

inline nlohmann::json drag_params_json(const drag::DragParams& p) {
    return {{"g", p.g},   {"m", p.m},   {"rho", p.rho},
            {"area", p.area}, {"cd", p.cd}, {"v_i", p.v_i}};
}

inline nlohmann::json drag_summary(const drag::DragRunOptions& opts,
                                   const drag::DragRunResult& run) {
    const nlohmann::json config = {{"noise", noise_kind_name(opts.noise.kind)},
                                   {"sigma", opts.noise.sigma},
                                   {"seed", opts.seed},
                                   {"n", opts.n},
                                   {"hidden_units", opts.hidden_units},
                                   {"max_iterations", opts.max_iterations},
                                   {"curve_points", opts.curve_points},
                                   {"params", drag_params_json(opts.params)}};
    const nlohmann::json results = {
        {"intervals", {{"I1", interval_json(run.i1)}, {"I2", interval_json(run.i2)}}},
        {"reflected_slope_shift",
         {{"I1", run.reflected_slope_shift_i1()}, {"I2", run.reflected_slope_shift_i2()}}},
        {"corrector",
         {{"converged", run.corrector_diagnostics.converged},
          {"iterations", run.corrector_diagnostics.iterations},
          {"final_loss", run.corrector_diagnostics.final_loss}}}};
    return {{"experiment", "drag"},
            {"seed", opts.seed},
            {"substreams", {"time-points", "noise", "corrector-init"}},
            {"config", config},
            {"results", results}};
}

inline nlohmann::json criteria_summary(const drag::CriteriaSweepOptions& opts,
                                       const std::vector<drag::CriteriaScenario>& scenarios) {
    nlohmann::json noises = nlohmann::json::array();
    for (const auto& noise : opts.noises)
        noises.push_back(
            {{"noise", noise_kind_name(noise.kind)}, {"sigma", noise.sigma}});
    const nlohmann::json config = {{"noises", noises},
                                   {"etas", opts.etas},
                                   {"radii", opts.radii},
                                   {"seed", opts.seed},
                                   {"n", opts.n},
                                   {"hidden_units", opts.hidden_units},
                                   {"max_iterations", opts.max_iterations},
                                   {"params", drag_params_json(opts.params)}};
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& scenario : scenarios)
        rows.push_back({{"noise", noise_kind_name(scenario.noise.kind)},
                        {"sigma", scenario.noise.sigma},
                        {"eta", scenario.eta},
                        {"delta1_hat", scenario.points.delta1_hat},
                        {"delta2_hat", scenario.points.delta2_hat},
                        {"mean_abs_eps", scenario.points.mean_abs_eps},
                        {"point_count", scenario.points.points.size()}});
    return {{"experiment", "criteria-sweep"},
            {"seed", opts.seed},
            {"substreams", {"time-points", "noise", "corrector-init"}},
            {"config", config},
            {"results", {{"scenarios", rows}}}};
}

inline nlohmann::json newsvendor_summary(const newsvendor::NewsvendorConfig& cfg,
                                         newsvendor::CorrectorChoice kind, double delta,
                                         const newsvendor::FoldRunResult& in_sample,
                                         const newsvendor::MonteCarloResult& mc,
                                         const newsvendor::DeltaOptimization& opt) {
    const nlohmann::json config = {{"price", cfg.price},
                                   {"cost", cfg.cost},
                                   {"lambda_true", cfg.lambda_true},
                                   {"perturbation", cfg.perturbation},
                                   {"fold_size", cfg.fold_size},
                                   {"mc_repeats", cfg.mc_repeats},
                                   {"lambda_lo", cfg.lambda_lo},
                                   {"lambda_hi", cfg.lambda_hi},
                                   {"lambda_grid_points", cfg.lambda_grid_points},
                                   {"smoothing_span", cfg.smoothing_span},
                                   {"delta_grid", cfg.delta_grid},
                                   {"seed", cfg.seed},
                                   {"corrector", corrector_name(kind)},
                                   {"delta", delta}};
    double mean_from_train = 0.0;
    for (const auto& rep : mc.repeats) mean_from_train += rep.delta_lambda_from_train;
    mean_from_train /= static_cast<double>(mc.repeats.size());
    double acc = 0.0;
    for (const auto& rep : mc.repeats) {
        const double d = rep.delta_lambda_from_train - mean_from_train;
        acc += d * d;
    }
    const double std_from_train =
        mc.repeats.size() < 2
            ? 0.0
            : std::sqrt(acc / static_cast<double>(mc.repeats.size() - 1));

    const nlohmann::json results = {
        {"shift",
         {{"mean", mc.mean_shift()},
          {"std", mc.std_shift()},
          {"mean_from_train", mean_from_train},
          {"std_from_train", std_from_train},
          {"repeats", mc.repeats.size()}}},
        {"in_sample",
         {{"lambda_train", in_sample.lambda_train},
          {"lambda_star", in_sample.lambda_star},
          {"lambda_prime_star", in_sample.lambda_prime_star},
          {"delta_lambda", in_sample.delta_lambda},
          {"delta_lambda_from_train", in_sample.delta_lambda_from_train},
          {"degenerate_train", in_sample.degenerate_train},
          {"degenerate_eval", in_sample.degenerate_eval}}},
        {"delta_star", opt.delta_star}};
    return {{"experiment", "newsvendor"},
            {"seed", cfg.seed},
            {"substreams", {"demand", "corrector-init", "fold-split"}},
            {"config", config},
            {"results", results}};
}

inline void write_summary(const std::filesystem::path& path, const nlohmann::json& summary) {
    const std::string text = summary.dump(2) + "\n";
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!file) throw IoError("cannot write " + path.string());
}

} // namespace bapc::io
