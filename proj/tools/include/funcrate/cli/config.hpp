#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "funcrate/funcs.hpp"
#include "funcrate/model.hpp"
#include "funcrate/simulate.hpp"

namespace funcrate::cli {

// Parsed form of the experiment file: `key = value` lines where a value is a
// number, a "string", true/false, an [array] or an inline { table }. Arrays
// and tables may span lines; `#` starts a comment.
struct ConfigValue {
    enum class Kind { number, string, boolean, array, table };

    Kind kind = Kind::number;
    int line = 0;
    std::string text;  // source spelling of numbers, contents of strings
    double number = 0.0;
    bool boolean = false;
    std::vector<ConfigValue> items;
    std::vector<std::pair<std::string, ConfigValue>> fields;

    [[nodiscard]] const ConfigValue* field(std::string_view key) const;
};

struct ConfigDocument {
    std::string source;
    std::vector<std::pair<std::string, ConfigValue>> entries;

    [[nodiscard]] const ConfigValue* find(std::string_view key) const;
};

/// Throws Errc::config with "source:line: message" on syntax errors and
/// duplicate keys.
ConfigDocument parse_config(std::string_view text, std::string source = "config");
ConfigDocument load_config_file(const std::filesystem::path& path);

enum class Mode { rates, bound_check, moment_check, oracle_compare };

std::string_view to_string(Mode mode) noexcept;

struct ExperimentConfig {
    Mode mode = Mode::rates;
    ProcessModel model;
    HolderFunction h;
    double T = 1.0;
    std::optional<GridSpec> grid;  // absent in moment-check mode
    std::size_t path_count = 0;
    std::uint64_t master_seed = 0;
    std::filesystem::path output;
    std::optional<std::size_t> fit_n_min;
    double slope_tolerance = 0.2;
    std::vector<double> deltas;  // moment-check only
    std::size_t block_size = 256;
    std::string model_kind;      // "brownian", "stable" or "euler"
    std::string function_kind;   // "constant", "linear", "power", "sine" or "clipped_power"
};

/// Builds and validates an experiment (grid nesting and bias ratio, model
/// parameters, gamma admissibility) before anything is simulated. Errors
/// carry the line of the offending key.
ExperimentConfig make_experiment(const ConfigDocument& doc);

}  // namespace funcrate::cli
