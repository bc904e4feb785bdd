#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kltrack/comparison.hpp"
#include "kltrack/csv.hpp"
#include "kltrack/errors.hpp"
#include "kltrack/report.hpp"
#include "kltrack/scale.hpp"
#include "kltrack/simulation.hpp"

namespace {

using nlohmann::json;

// Model spec strings look like "x1,x2" or "bmi:quadratic,age,sex".
kltrack::ModelSpec parse_model_spec(const std::string& text) {
    kltrack::ModelSpec spec;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        kltrack::ModelTerm term;
        const auto colon = item.find(':');
        term.column = item.substr(0, colon);
        if (colon != std::string::npos) {
            const std::string map = item.substr(colon + 1);
            if (map == "linear") {
                term.map = kltrack::FeatureMap::linear;
            } else if (map == "quadratic") {
                term.map = kltrack::FeatureMap::quadratic;
            } else if (map == "tercile") {
                term.map = kltrack::FeatureMap::tercile;
            } else {
                throw CLI::ValidationError("unknown feature map '" + map +
                                           "' (use linear, quadratic or tercile)");
            }
        }
        spec.terms.push_back(term);
    }
    if (spec.terms.empty()) throw CLI::ValidationError("empty model spec '" + text + "'");
    return spec;
}

bool same_term(const kltrack::ModelTerm& a, const kltrack::ModelTerm& b) {
    return a.column == b.column && a.map == b.map;
}

bool subset_of(const kltrack::ModelSpec& inner, const kltrack::ModelSpec& outer) {
    for (const auto& term : inner.terms) {
        bool found = false;
        for (const auto& other : outer.terms) {
            if (same_term(term, other)) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

// "auto" resolves to nested only for a proper subset with identical feature
// maps on the shared columns; everything else is treated as non-nested.
kltrack::Relation resolve_relation(const std::string& requested, const kltrack::ModelSpec& g,
                                   const kltrack::ModelSpec& h) {
    if (requested == "nested") return kltrack::Relation::nested_g_in_h;
    if (requested == "non-nested") return kltrack::Relation::non_nested;
    const bool g_in_h = subset_of(g, h);
    const bool h_in_g = subset_of(h, g);
    if (g_in_h && !h_in_g) return kltrack::Relation::nested_g_in_h;
    if (h_in_g && !g_in_h) {
        throw CLI::ValidationError(
            "model h is nested in model g; swap the models or pass --relation explicitly");
    }
    return kltrack::Relation::non_nested;
}

void emit(const std::string& format, const std::string& text, const json& structured) {
    if (format == "structured") {
        std::cout << structured.dump(2) << "\n";
    } else {
        std::cout << text;
    }
}

struct ScaleRequest {
    std::optional<double> kl;
    std::optional<double> normal_variance;
    std::optional<double> odds_ratio;
    std::optional<std::pair<int, int>> risk;  // (p, n)
};

void run_scale(const ScaleRequest& request, const std::string& format) {
    json results = json::array();
    std::ostringstream text;

    const auto add = [&](const std::string& kind, std::optional<double> input, double kl) {
        const kltrack::RiskQualification q = kltrack::qualify(kl);
        json entry;
        entry["input"] = kind;
        entry["value"] = input ? json(*input) : json();
        entry["kl"] = kl;
        entry["category"] = kltrack::to_string(q.category);
        entry["relative_error"] = kltrack::relative_error(kl);
        results.push_back(entry);
        text << "  " << kind << (input ? " " + kltrack::fmt4(*input) : std::string())
             << ": KL = " << kltrack::fmt4(kl)
             << ", relative error = " << kltrack::fmt4(kltrack::relative_error(kl))
             << ", category = " << kltrack::to_string(q.category) << "\n";
    };

    text << "KL risk scale\n";
    if (request.kl) add("kl", *request.kl, *request.kl);
    if (request.normal_variance) {
        add("normal-variance", *request.normal_variance,
            kltrack::kl_normal_variance(*request.normal_variance));
    }
    if (request.odds_ratio) {
        if (!(*request.odds_ratio > 0.0)) {
            throw kltrack::DomainError("odds ratio must be positive");
        }
        add("odds-ratio", *request.odds_ratio, kltrack::kl_binary_or(std::log(*request.odds_ratio)));
    }
    if (request.risk) {
        add("statistical-risk(p=" + std::to_string(request.risk->first) +
                ", n=" + std::to_string(request.risk->second) + ")",
            std::nullopt,
            kltrack::statistical_risk(request.risk->first, request.risk->second));
    }

    json j;
    j["command"] = "scale";
    j["results"] = results;
    emit(format, text.str(), j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"difference-of-risks estimation from normalized AIC differences"};
    app.require_subcommand(1);

    std::string format = "text";
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"text", "structured"}))
        ->capture_default_str();

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "fit one logistic model");
    std::string fit_input, fit_response, fit_model;
    fit_cmd->add_option("--input", fit_input, "CSV file")->required();
    fit_cmd->add_option("--response", fit_response, "response column name")->required();
    fit_cmd->add_option("--model-g", fit_model, "model terms, e.g. x1:tercile,x2")->required();

    // compare
    auto* cmp_cmd = app.add_subcommand("compare", "compare two models");
    std::string cmp_input, cmp_response, cmp_model_g, cmp_model_h;
    std::string cmp_relation = "auto";
    double cmp_alpha = 0.05;
    std::optional<int> cmp_per_measurement;
    std::optional<double> cmp_loglik_g, cmp_loglik_h, cmp_omega_sq;
    std::optional<int> cmp_params_g, cmp_params_h, cmp_n_obs;
    cmp_cmd->add_option("--input", cmp_input, "CSV file");
    cmp_cmd->add_option("--response", cmp_response, "response column name");
    cmp_cmd->add_option("--model-g", cmp_model_g, "reference model terms");
    cmp_cmd->add_option("--model-h", cmp_model_h, "challenger model terms");
    cmp_cmd->add_option("--relation", cmp_relation, "nested | non-nested | auto")
        ->check(CLI::IsMember({"nested", "non-nested", "auto"}))
        ->capture_default_str();
    cmp_cmd->add_option("--alpha", cmp_alpha, "interval level")->capture_default_str();
    cmp_cmd->add_option("--per-measurement", cmp_per_measurement,
                        "divide D and the interval bounds by this measurement count");
    cmp_cmd->add_option("--loglik-g", cmp_loglik_g, "summary mode: log-likelihood of g");
    cmp_cmd->add_option("--loglik-h", cmp_loglik_h, "summary mode: log-likelihood of h");
    cmp_cmd->add_option("--params-g", cmp_params_g, "summary mode: parameter count of g");
    cmp_cmd->add_option("--params-h", cmp_params_h, "summary mode: parameter count of h");
    cmp_cmd->add_option("--n-obs", cmp_n_obs, "summary mode: sample size");
    cmp_cmd->add_option("--omega-sq", cmp_omega_sq,
                        "summary mode: omega-hat squared (required when non-nested)");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run a replication study");
    std::string sim_design = "nonnested";
    int sim_n = 250;
    int sim_reps = 1000;
    double sim_alpha = 0.05;
    std::uint64_t sim_seed = 20250808;
    int sim_threads = 0;
    int sim_calibration = 100000;
    std::string sim_emit_sample;
    sim_cmd->add_option("--design", sim_design, "nonnested | nested-f1 | nested-f2")
        ->check(CLI::IsMember({"nonnested", "nested-f1", "nested-f2"}))
        ->capture_default_str();
    sim_cmd->add_option("--n", sim_n, "sample size per replication")->capture_default_str();
    sim_cmd->add_option("--reps", sim_reps, "replication count")->capture_default_str();
    sim_cmd->add_option("--alpha", sim_alpha, "interval level")->capture_default_str();
    sim_cmd->add_option("--seed", sim_seed, "master seed")->capture_default_str();
    sim_cmd->add_option("--threads", sim_threads, "worker threads (0 = one)")
        ->capture_default_str();
    sim_cmd->add_option("--calibration-size", sim_calibration, "calibration sample size")
        ->capture_default_str();
    sim_cmd->add_option("--emit-sample", sim_emit_sample,
                        "write one generated sample to this CSV and exit");

    // scale
    auto* scale_cmd = app.add_subcommand("scale", "evaluate the KL interpretation scale");
    ScaleRequest scale_request;
    double scale_kl = 0.0, scale_nv = 0.0, scale_or = 0.0;
    std::vector<int> scale_risk;
    auto* kl_opt = scale_cmd->add_option("--kl", scale_kl, "qualify a KL value");
    auto* nv_opt = scale_cmd->add_option("--normal-variance", scale_nv,
                                         "KL of a normal with this variance vs variance 1");
    auto* or_opt =
        scale_cmd->add_option("--odds-ratio", scale_or, "KL of a symmetric binary OR model");
    auto* risk_opt = scale_cmd
                         ->add_option("--statistical-risk", scale_risk,
                                      "p n: risk of estimating p parameters from n observations")
                         ->expected(2);

    CLI11_PARSE(app, argc, argv);

    try {
        if (fit_cmd->parsed()) {
            const kltrack::Dataset data = kltrack::load_csv(fit_input, fit_response);
            const kltrack::FittedModel model =
                kltrack::fit_logistic(data, parse_model_spec(fit_model));
            emit(format, kltrack::render_fit_text(model), kltrack::fit_to_json(model));
        } else if (cmp_cmd->parsed()) {
            kltrack::ComparisonResult result;
            const bool summary_mode = cmp_loglik_g.has_value() || cmp_loglik_h.has_value();
            if (summary_mode) {
                if (!cmp_loglik_g || !cmp_loglik_h || !cmp_params_g || !cmp_params_h ||
                    !cmp_n_obs) {
                    throw CLI::ValidationError(
                        "summary mode needs --loglik-g, --loglik-h, --params-g, --params-h "
                        "and --n-obs");
                }
                if (cmp_relation == "auto") {
                    throw CLI::ValidationError(
                        "summary mode cannot resolve --relation auto; pass nested or "
                        "non-nested");
                }
                result = kltrack::compare_summaries(
                    *cmp_loglik_g, *cmp_params_g, *cmp_loglik_h, *cmp_params_h, *cmp_n_obs,
                    cmp_relation == "nested" ? kltrack::Relation::nested_g_in_h
                                             : kltrack::Relation::non_nested,
                    cmp_alpha, cmp_omega_sq, cmp_per_measurement);
            } else {
                if (cmp_input.empty() || cmp_response.empty() || cmp_model_g.empty() ||
                    cmp_model_h.empty()) {
                    throw CLI::ValidationError(
                        "data mode needs --input, --response, --model-g and --model-h");
                }
                const kltrack::Dataset data = kltrack::load_csv(cmp_input, cmp_response);
                const kltrack::ModelSpec spec_g = parse_model_spec(cmp_model_g);
                const kltrack::ModelSpec spec_h = parse_model_spec(cmp_model_h);
                const kltrack::Relation relation =
                    resolve_relation(cmp_relation, spec_g, spec_h);
                const kltrack::FittedModel fit_g = kltrack::fit_logistic(data, spec_g);
                const kltrack::FittedModel fit_h = kltrack::fit_logistic(data, spec_h);
                result = kltrack::compare(fit_g, fit_h, relation, cmp_alpha,
                                          cmp_per_measurement);
            }
            emit(format, kltrack::render_comparison_text(result),
                 kltrack::comparison_to_json(result));
        } else if (sim_cmd->parsed()) {
            if (!sim_emit_sample.empty()) {
                kltrack::RngStream rng(sim_seed, 1);
                const kltrack::Dataset sample =
                    sim_design == "nonnested"
                        ? kltrack::generate_nonnested_sample(sim_n, rng)
                        : kltrack::generate_nested_sample(
                              sim_n,
                              sim_design == "nested-f1" ? kltrack::NestedTruth::f1
                                                        : kltrack::NestedTruth::f2,
                              rng);
                kltrack::save_csv(sample, "y", sim_emit_sample);
                std::cout << "wrote " << sample.n_obs() << " observations to "
                          << sim_emit_sample << "\n";
            } else if (sim_design == "nonnested") {
                const kltrack::SimulationReport report = kltrack::run_nonnested_study(
                    sim_n, sim_reps, sim_alpha, sim_seed, sim_threads, sim_calibration);
                emit(format, kltrack::render_simulation_text(report),
                     kltrack::simulation_to_json(report));
            } else {
                const kltrack::NestedTruth truth = sim_design == "nested-f1"
                                                       ? kltrack::NestedTruth::f1
                                                       : kltrack::NestedTruth::f2;
                const kltrack::NestedFitReport report =
                    kltrack::run_nested_study(truth, sim_n, sim_reps, sim_seed, sim_threads);
                emit(format, kltrack::render_nested_fit_text(report),
                     kltrack::nested_fit_to_json(report));
            }
        } else if (scale_cmd->parsed()) {
            if (kl_opt->count() > 0) scale_request.kl = scale_kl;
            if (nv_opt->count() > 0) scale_request.normal_variance = scale_nv;
            if (or_opt->count() > 0) scale_request.odds_ratio = scale_or;
            if (risk_opt->count() > 0) {
                scale_request.risk = std::make_pair(scale_risk.at(0), scale_risk.at(1));
            }
            if (!scale_request.kl && !scale_request.normal_variance &&
                !scale_request.odds_ratio && !scale_request.risk) {
                throw CLI::ValidationError(
                    "scale needs at least one of --kl, --normal-variance, --odds-ratio, "
                    "--statistical-risk");
            }
            run_scale(scale_request, format);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: E_USAGE: " << e.what() << "\n";
        return 2;
    } catch (const kltrack::Error& e) {
        std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: E_INTERNAL: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
