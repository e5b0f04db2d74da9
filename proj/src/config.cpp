#include "sfhd/config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace sfhd {

using nlohmann::json;

void MeasureConfig::validate() const {
    if (type == Type::discrete)
        discrete.validate();
    else
        matern.validate();
}

void RunConfig::validate() const {
    model.validate();
    measure.validate();
    kernel.validate();
    if (simulation) simulation->validate();
    if (output_dir.empty()) throw std::invalid_argument("output_dir must not be empty");
}

namespace {

DiscreteMeasure atoms_from_json(const json& arr) {
    DiscreteMeasure m;
    for (const auto& a : arr) {
        DiscreteAtom atom{};
        atom.mu = a.at("mu").get<double>();
        if (a.contains("sigma2"))
            atom.sigma2 = a.at("sigma2").get<double>();
        else if (a.contains("sigma")) {
            // Alternative convention: the file carries standard deviations.
            const double s = a.at("sigma").get<double>();
            atom.sigma2 = s * s;
        } else {
            throw std::invalid_argument("measure.atoms entries need sigma2 (or sigma)");
        }
        m.atoms.push_back(atom);
    }
    return m;
}

} // namespace

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    const auto& model = j.at("model");
    cfg.model.alpha = model.at("alpha").get<double>();
    cfg.model.beta = model.at("beta").get<double>();
    cfg.model.c = model.value("c", 1.0);
    cfg.model.d_coef = model.value("d_coef", 1.0);

    const auto& meas = j.at("measure");
    const std::string type = meas.at("type").get<std::string>();
    if (type == "discrete") {
        cfg.measure.type = MeasureConfig::Type::discrete;
        cfg.measure.discrete = atoms_from_json(meas.at("atoms"));
    } else if (type == "matern") {
        cfg.measure.type = MeasureConfig::Type::matern;
        cfg.measure.matern.sigma2 = meas.at("sigma2").get<double>();
        cfg.measure.matern.a = meas.at("a").get<double>();
        cfg.measure.matern.nu = meas.at("nu").get<double>();
    } else {
        throw std::invalid_argument("measure.type must be \"discrete\" or \"matern\"");
    }

    if (j.contains("kernel")) {
        const auto& k = j.at("kernel");
        cfg.kernel.n_terms = k.value("n_terms", cfg.kernel.n_terms);
        cfg.kernel.m_terms = k.value("m_terms", cfg.kernel.m_terms);
        cfg.kernel.term_log_threshold = k.value("term_log_threshold", cfg.kernel.term_log_threshold);
        cfg.kernel.oracle_tol = k.value("oracle_tol", cfg.kernel.oracle_tol);
    }
    if (j.contains("simulation")) {
        const auto& s = j.at("simulation");
        SimulationConfig sim;
        sim.l_max = s.value("l_max", sim.l_max);
        sim.seed = s.value("seed", sim.seed);
        sim.times = s.value("times", std::vector<double>{0.0});
        sim.grid_n_theta = s.value("grid_n_theta", sim.grid_n_theta);
        sim.grid_n_phi = s.value("grid_n_phi", sim.grid_n_phi);
        cfg.simulation = sim;
    }
    cfg.output_dir = j.value("output_dir", std::string{"."});
    return cfg;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["model"] = {{"alpha", cfg.model.alpha},
                  {"beta", cfg.model.beta},
                  {"c", cfg.model.c},
                  {"d_coef", cfg.model.d_coef}};
    if (cfg.measure.type == MeasureConfig::Type::discrete) {
        json atoms = json::array();
        for (const auto& a : cfg.measure.discrete.atoms)
            atoms.push_back({{"mu", a.mu}, {"sigma2", a.sigma2}});
        j["measure"] = {{"type", "discrete"}, {"atoms", atoms}};
    } else {
        j["measure"] = {{"type", "matern"},
                        {"sigma2", cfg.measure.matern.sigma2},
                        {"a", cfg.measure.matern.a},
                        {"nu", cfg.measure.matern.nu}};
    }
    j["kernel"] = {{"n_terms", cfg.kernel.n_terms},
                   {"m_terms", cfg.kernel.m_terms},
                   {"term_log_threshold", cfg.kernel.term_log_threshold},
                   {"oracle_tol", cfg.kernel.oracle_tol}};
    if (cfg.simulation) {
        j["simulation"] = {{"l_max", cfg.simulation->l_max},
                           {"seed", cfg.simulation->seed},
                           {"times", cfg.simulation->times},
                           {"grid_n_theta", cfg.simulation->grid_n_theta},
                           {"grid_n_phi", cfg.simulation->grid_n_phi}};
    }
    j["output_dir"] = cfg.output_dir;
    return j;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j = json::parse(in);
    RunConfig cfg = config_from_json(j);
    cfg.validate();
    return cfg;
}

} // namespace sfhd
