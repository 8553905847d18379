#include "doctest.h"

#include <string>

#include "funcrate/cli/config.hpp"
#include "funcrate/error.hpp"

using namespace funcrate;
using namespace funcrate::cli;

namespace {

const char* kStable = R"(# stable rates experiment
mode = "rates"
model = { kind = "stable", alpha = 1.5, scale = 1.0, x0 = 0.0 }
h = { kind = "power", gamma = 0.5, center = 0.0 }
T = 1.0
n_ref = 32_768
eval_ns = [8, 16, 32, 64,
           128, 256, 512]   # nested
M = 1e5
master_seed = 18446744073709551615
output = "out/stable"
)";

std::string error_of(const std::string& text) {
    try {
        (void)make_experiment(parse_config(text, "exp.toml"));
    } catch (const Error& e) {
        return std::string(to_string(e.code())) + ": " + e.what();
    }
    return "no error";
}

std::string with(std::string base, const std::string& from, const std::string& to) {
    const auto at = base.find(from);
    REQUIRE(at != std::string::npos);
    return base.replace(at, from.size(), to);
}

}  // namespace

TEST_CASE("parse the documented syntax") {
    const auto doc = parse_config(kStable);
    REQUIRE(doc.find("model") != nullptr);
    const auto& model = *doc.find("model");
    CHECK(model.kind == ConfigValue::Kind::table);
    CHECK(model.line == 3);
    CHECK(model.field("kind")->text == "stable");
    CHECK(model.field("alpha")->number == 1.5);
    CHECK(doc.find("eval_ns")->items.size() == 7);
    CHECK(doc.find("n_ref")->number == 32768.0);

    const auto config = make_experiment(doc);
    CHECK(config.mode == Mode::rates);
    CHECK(config.model.alpha() == 1.5);
    CHECK(config.h.gamma() == 0.5);
    CHECK(config.grid->n_ref() == 32768);
    CHECK(config.grid->eval_ns().back() == 512);
    CHECK(config.path_count == 100000);
    CHECK(config.master_seed == 18446744073709551615ULL);
    CHECK(config.output == "out/stable");
    CHECK(config.model_kind == "stable");
    CHECK(config.function_kind == "power");
}

TEST_CASE("every model and function kind parses") {
    CHECK(error_of(with(kStable, R"({ kind = "stable", alpha = 1.5, scale = 1.0, x0 = 0.0 })",
                        R"({ kind = "brownian", sigma = 2.0, x0 = [0.0, 1.0] })")) == "no error");
    CHECK(error_of(with(kStable, R"({ kind = "stable", alpha = 1.5, scale = 1.0, x0 = 0.0 })",
                        R"({ kind = "euler", drift = [0.0, -1.0], diffusion = [1.0, 0.0] })")) == "no error");
    for (const char* h : {R"({ kind = "constant", value = 2.0, gamma = 0.5 })", R"({ kind = "sine", frequency = 2.0, gamma = 0.5 })",
                          R"({ kind = "clipped_power", gamma = 0.5, center = 1.0, cap = 2.0 })"}) {
        CHECK(error_of(with(kStable, R"({ kind = "power", gamma = 0.5, center = 0.0 })", h)) == "no error");
    }
}

TEST_CASE("gamma above alpha/2 is rejected before simulation") {
    const auto message = error_of(with(kStable, "gamma = 0.5", "gamma = 0.9"));
    CHECK(message.rfind("GammaTooLarge", 0) == 0);
    CHECK(message.find("exp.toml:4") != std::string::npos);
}

TEST_CASE("config errors carry line context") {
    const auto syntax = error_of(with(kStable, "T = 1.0", "T = 1.0.0"));
    CHECK(syntax.rfind("ConfigError", 0) == 0);
    CHECK(syntax.find("exp.toml:5") != std::string::npos);
    CHECK(syntax.find("T = 1.0.0") != std::string::npos);

    CHECK(error_of(with(kStable, "M = 1e5", "M = 1e5\nM = 3")).find("duplicate key 'M'") != std::string::npos);
    CHECK(error_of(with(kStable, "M = 1e5", "paths = 3")).find("exp.toml:9: unknown key 'paths'") != std::string::npos);
    CHECK(error_of(with(kStable, "M = 1e5", "M = 10")).find("at least 100") != std::string::npos);
    CHECK(error_of(with(kStable, "alpha = 1.5", "alpha = 2.5")).find("exp.toml:3") != std::string::npos);
    CHECK(error_of(with(kStable, "\"stable\"", "\"levy\"")).find("unknown model kind 'levy'") != std::string::npos);
    CHECK(error_of(with(kStable, "scale = 1.0", "scail = 1.0")).find("unknown field 'scail'") != std::string::npos);
    CHECK(error_of(with(kStable, "[8, 16", "[3, 16")).rfind("NotNested", 0) == 0);
    CHECK(error_of(with(kStable, "n_ref = 32_768", "n_ref = 4096")).find("exp.toml:7") != std::string::npos);
    CHECK(error_of(with(kStable, "output = \"out/stable\"", "")).find("no error") != std::string::npos);
    CHECK(error_of(with(kStable, "T = 1.0\n", "")).find("missing required key 'T'") != std::string::npos);
    CHECK(error_of(with(kStable, "\"rates\"", "\"fast\"")).find("unknown mode") != std::string::npos);
    CHECK(error_of("model = { kind = \"stable\", alpha = 1.5\n").find("expected '}'") != std::string::npos);
}

TEST_CASE("mode-specific validation") {
    const auto oracle = with(kStable, "\"rates\"", "\"oracle-compare\"");
    CHECK(error_of(oracle).find("oracle-compare needs") != std::string::npos);

    const auto euler = with(with(kStable, R"({ kind = "stable", alpha = 1.5, scale = 1.0, x0 = 0.0 })",
                                 R"({ kind = "euler", drift = [0.0, -1.0] })"),
                            "\"rates\"", "\"bound-check\"");
    CHECK(error_of(euler).rfind("NotCertified", 0) == 0);

    const std::string moment = R"(mode = "moment-check"
model = { kind = "brownian" }
h = { kind = "power", gamma = 0.5 }
T = 1.0
M = 1000
master_seed = 1
deltas = [0.5, 0.25]
)";
    const auto config = make_experiment(parse_config(moment));
    CHECK_FALSE(config.grid.has_value());
    CHECK(config.deltas == std::vector<double>{0.5, 0.25});
    CHECK(error_of(with(moment, "0.5, 0.25", "2.0")).find("deltas must lie in (0, T]") != std::string::npos);
    const auto defaults = make_experiment(parse_config(with(moment, "deltas = [0.5, 0.25]\n", "")));
    REQUIRE(defaults.deltas.size() == 9);
    CHECK(defaults.deltas.front() == 0.25);
    CHECK(defaults.deltas.back() == 1.0 / 1024.0);
}
