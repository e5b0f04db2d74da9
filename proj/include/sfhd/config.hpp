#ifndef SFHD_CONFIG_HPP
#define SFHD_CONFIG_HPP

#include "sfhd/fieldsim.hpp"
#include "sfhd/kernel.hpp"
#include "sfhd/spectra.hpp"

#include <nlohmann/json_fwd.hpp>

#include <optional>
#include <string>

namespace sfhd {

/// Tagged union of the supported spectral measures.
struct MeasureConfig {
    enum class Type { discrete, matern };
    Type type = Type::discrete;
    DiscreteMeasure discrete;
    MaternSpectrum matern{1.0, 1.0, 2.0};

    void validate() const;
};

/// Full run configuration (JSON file with sections model / measure / kernel /
/// simulation / output).
struct RunConfig {
    ModelParams model{1.0, 1.0, 1.0, 1.0};
    MeasureConfig measure;
    KernelConfig kernel;
    std::optional<SimulationConfig> simulation;
    std::string output_dir = ".";

    void validate() const;
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& cfg);

/// Parses and validates a config file. Throws std::invalid_argument (with a
/// field-specific message) or nlohmann::json::exception on bad input.
RunConfig load_config(const std::string& path);

} // namespace sfhd

#endif
