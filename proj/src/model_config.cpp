#include "conjnet/model_config.hpp"

#include <fstream>

#include <json.hpp>

#include "conjnet/errors.hpp"

namespace conjnet {

const char* to_string(ContactFn fn) {
    return fn == ContactFn::Base ? "Base" : "Edge";
}

ModelConfig ModelConfig::make(ContactFn fn, double expr_lo, double expr_hi, double mat_lo,
                              double mat_hi, double contact_range, bool bias_correction) {
    ModelConfig cfg;
    cfg.contact_fn = fn;
    cfg.expression_delay = DelayModel::uniform(expr_lo, expr_hi, 'R');
    cfg.maturation_delay = DelayModel::uniform(mat_lo, mat_hi, 'M');
    cfg.contact_range = contact_range;
    cfg.maturity_bias_correction = bias_correction;
    cfg.name = std::string(to_string(fn)) + "_" + cfg.expression_delay.label + "_" +
               cfg.maturation_delay.label;
    return cfg;
}

std::vector<ModelConfig> default_model_grid(double contact_range, bool bias_correction) {
    std::vector<ModelConfig> grid;
    for (ContactFn fn : {ContactFn::Base, ContactFn::Edge}) {
        for (auto [elo, ehi] : {std::pair{30.0, 150.0}, std::pair{30.0, 120.0}}) {
            for (auto [mlo, mhi] : {std::pair{15.0, 75.0}, std::pair{30.0, 90.0}}) {
                grid.push_back(
                    ModelConfig::make(fn, elo, ehi, mlo, mhi, contact_range, bias_correction));
            }
        }
    }
    return grid;
}

std::vector<ModelConfig> load_model_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Kind::ConfigError, "cannot open model grid: " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Error::Kind::ConfigError, "bad model grid json: " + std::string(e.what()));
    }
    if (!doc.is_array() || doc.empty())
        throw Error(Error::Kind::ConfigError, "model grid must be a non-empty array");

    std::vector<ModelConfig> grid;
    for (const auto& entry : doc) {
        const std::string fn_name = entry.at("contact_fn").get<std::string>();
        ContactFn fn;
        if (fn_name == "Base")
            fn = ContactFn::Base;
        else if (fn_name == "Edge")
            fn = ContactFn::Edge;
        else
            throw Error(Error::Kind::ConfigError, "unknown contact_fn: " + fn_name);
        const auto expr = entry.at("expr_range");
        const auto mat = entry.at("mat_range");
        ModelConfig cfg = ModelConfig::make(
            fn, expr.at(0).get<double>(), expr.at(1).get<double>(), mat.at(0).get<double>(),
            mat.at(1).get<double>(), entry.value("contact_range_um", 0.5),
            entry.value("bias_correction", true));
        if (entry.contains("budget") && !entry["budget"].is_null())
            cfg.normalization_budget = entry["budget"].get<double>();
        cfg.raw_weight_scale = entry.value("raw_weight_scale", 1.0);
        grid.push_back(std::move(cfg));
    }
    return grid;
}

}  // namespace conjnet
