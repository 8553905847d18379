#include "funcrate/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "funcrate/error.hpp"

#ifndef FUNCRATE_VERSION
#define FUNCRATE_VERSION "unknown"
#endif

namespace funcrate::cli {

using nlohmann::json;

unsigned workers_from_env() {
    const char* value = std::getenv("FUNCRATE_THREADS");
    if (value == nullptr || *value == '\0') {
        return std::max(1u, std::thread::hardware_concurrency());
    }
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096) {
        fail(Errc::config, std::string("FUNCRATE_THREADS must be a positive integer, got '") + value + "'");
    }
    return static_cast<unsigned>(n);
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

std::string format_double(double v) {
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", v);
    return buffer;
}

json optional_number(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? json(*v) : json(nullptr);
}

json kernel_json(const QKernel& kernel) {
    if (const auto* g = std::get_if<GaussianKernel>(&kernel)) {
        return {{"kind", "gaussian"}, {"c1", g->c1}, {"c2", g->c2}};
    }
    return {{"kind", "stable"}, {"alpha", std::get<StableKernel>(kernel).alpha}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) {
        fail(Errc::io, "cannot write '" + path.string() + "'");
    }
}

std::string curve_dat(const ErrorSummary& summary) {
    std::ostringstream out;
    out << "# log2_n log2_mse log2_bound\n";
    for (const ErrorRow& row : summary.rows) {
        const double lm = row.mse > 0.0 ? std::log2(row.mse) : NAN;
        const double lb = row.bound && *row.bound > 0.0 ? std::log2(*row.bound) : NAN;
        out << format_double(std::log2(static_cast<double>(row.n))) << ' ' << format_double(lm) << ' '
            << format_double(lb) << '\n';
    }
    return out.str();
}

double oracle_for(const ExperimentConfig& config, std::size_t n) {
    const double sigma = std::get<BrownianScaled>(config.model.kind()).sigma;
    const double slope = std::get<Linear>(config.h.descriptor()).slope * config.h.amplitude();
    return bm_linear_mse_oracle(config.T, n, sigma, slope);
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, unsigned workers, std::ostream& log) {
    std::filesystem::create_directories(config.output);

    RunOutcome outcome;
    const std::optional<DensityBoundCertificate> cert = certificate_for(config.model, config.T);

    json doc;
    doc["tool"] = "funcrate";
    doc["version"] = FUNCRATE_VERSION;
    doc["mode"] = std::string(to_string(config.mode));
    doc["model"] = {{"descriptor", config.model.describe()},
                    {"kind", config.model_kind},
                    {"alpha", config.model.alpha()},
                    {"dimension", config.model.dimension()},
                    {"exact_law", config.model.exact_law()}};
    doc["function"] = {{"descriptor", config.h.describe()},
                       {"kind", config.function_kind},
                       {"gamma", config.h.gamma()},
                       {"holder_norm", config.h.holder_norm()}};
    doc["T"] = config.T;
    doc["M"] = config.path_count;
    doc["master_seed"] = config.master_seed;
    doc["certified"] = cert.has_value();
    doc["certificate"] = nullptr;
    doc["theory"] = nullptr;
    doc["fit"] = nullptr;

    const double gamma = config.h.gamma();
    const double alpha = config.model.alpha();
    std::optional<TheoryBound> bound;
    if (cert) {
        json c = {{"alpha", cert->alpha()},
                  {"c_T", cert->c_T()},
                  {"horizon", cert->horizon()},
                  {"q_kernel", kernel_json(cert->q_kernel())}};
        if (gamma > 0.0 && (gamma < 0.5 * alpha || alpha == 2.0)) {
            c["q_moment"] = q_moment(*cert, gamma);
        }
        doc["certificate"] = c;
    }

    auto add_check = [&](const std::string& name, bool ok) {
        outcome.checks.emplace_back(name, ok);
        doc["checks"][name] = ok;
    };
    doc["checks"] = json::object();

    if (config.mode == Mode::moment_check) {
        doc["deltas"] = config.deltas;
        const MomentDiagnostic md =
            moment_diagnostic(config.model, *cert, gamma, config.deltas, config.path_count, config.master_seed);
        std::ostringstream csv;
        csv << "delta,ratio,std_error,bound\n";
        json rows = json::array();
        for (const MomentRow& row : md.rows) {
            csv << format_double(row.delta) << ',' << format_double(row.ratio) << ',' << format_double(row.std_error)
                << ',' << format_double(md.bound) << '\n';
            rows.push_back({{"delta", row.delta}, {"ratio", row.ratio}, {"std_error", row.std_error}});
        }
        write_text(config.output / "moment.csv", csv.str());
        doc["moments"] = {{"rows", rows},
                          {"bound", md.bound},
                          {"weighted_mean", md.weighted_mean},
                          {"exponent", 2.0 * gamma / alpha}};
        add_check("moment_within_bound", md.within_bound);
        add_check("moment_ratio_constant", md.constant);
        outcome.moments = md;
    } else {
        const GridSpec& grid = *config.grid;
        doc["n_ref"] = grid.n_ref();
        doc["eval_ns"] = grid.eval_ns();
        doc["block_size"] = config.block_size;

        log << "simulating " << config.path_count << " paths of " << config.model.describe() << " on "
            << grid.n_ref() << " steps with " << workers << " worker(s)\n";
        ErrorSummary summary = mse_curve(config.model, grid, config.h, config.path_count, config.master_seed,
                                         {.workers = workers, .block_size = config.block_size});
        if (cert) {
            bound = make_theory_bound(*cert, grid.T(), gamma, config.h.holder_norm());
            for (ErrorRow& row : summary.rows) {
                row.bound = theoretical_bound(*bound, row.n);
            }
            doc["theory"] = {{"branch", bound->branch == BoundBranch::boundary ? "boundary" : "generic"},
                             {"exponent", theoretical_exponent(gamma, alpha)},
                             {"D", bound->d_constant},
                             {"C", optional_number(bound->c_constant)}};
        } else {
            doc["theory"] = {{"branch", nullptr},
                             {"exponent", theoretical_exponent(gamma, alpha)},
                             {"D", nullptr},
                             {"C", nullptr}};
        }

        const bool all_zero = std::all_of(summary.rows.begin(), summary.rows.end(),
                                          [](const ErrorRow& r) { return r.mse == 0.0; });
        const std::size_t n_min = config.fit_n_min.value_or(default_fit_n_min(summary));
        if (!all_zero) {
            try {
                outcome.fit = fit_rate(summary, n_min);
            } catch (const Error& e) {
                if (e.code() != Errc::degenerate_fit) {
                    throw;
                }
                log << "rate fit skipped: " << e.what() << '\n';
            }
        }
        if (outcome.fit) {
            doc["fit"] = {{"slope", outcome.fit->slope},
                          {"intercept", outcome.fit->intercept},
                          {"r2", outcome.fit->r2},
                          {"slope_stderr", outcome.fit->slope_stderr},
                          {"n_min", n_min},
                          {"rows_used", outcome.fit->rows_used}};
        }

        json rows = json::array();
        for (const ErrorRow& row : summary.rows) {
            json r = {{"n", row.n},
                      {"mse", row.mse},
                      {"std_error", row.std_error},
                      {"M", row.path_count},
                      {"bound", optional_number(row.bound)}};
            if (config.mode == Mode::oracle_compare) {
                r["oracle"] = oracle_for(config, row.n);
            }
            rows.push_back(r);
        }
        doc["rows"] = rows;

        if (cert && (config.mode == Mode::rates || config.mode == Mode::bound_check)) {
            bool dominated = true;
            for (const ErrorRow& row : summary.rows) {
                dominated = dominated && row.mse <= *row.bound + 3.0 * row.std_error;
            }
            add_check("bound_domination", dominated);
        }
        if (config.mode == Mode::rates) {
            if (all_zero) {
                outcome.message = "degenerate: zero error curve";
                add_check("rate_fit", false);
            } else if (outcome.fit) {
                const double target = theoretical_exponent(gamma, alpha);
                add_check("slope_within_tolerance", std::abs(outcome.fit->slope - target) <= config.slope_tolerance);
                doc["slope_tolerance"] = config.slope_tolerance;
            } else {
                outcome.message = "too few usable rows for a rate fit";
                add_check("rate_fit", false);
            }
        }
        if (config.mode == Mode::oracle_compare) {
            bool close = true;
            for (const ErrorRow& row : summary.rows) {
                const double exact = oracle_for(config, row.n);
                close = close && std::abs(row.mse - exact) <= std::max(3.0 * row.std_error, 0.05 * exact);
            }
            add_check("oracle_agreement", close);
        }

        std::ostringstream csv;
        write_summary_csv(csv, summary);
        write_text(config.output / "summary.csv", csv.str());
        write_text(config.output / "curve.dat", curve_dat(summary));
        outcome.summary = std::move(summary);
    }

    bool pass = !outcome.checks.empty();
    for (const auto& [name, ok] : outcome.checks) {
        pass = pass && ok;
    }
    if (outcome.message.empty()) {
        outcome.message = pass ? "pass" : "statistical check failed";
    }
    outcome.exit_code = pass ? kExitPass : kExitStatisticalFailure;
    doc["pass"] = pass;
    doc["message"] = outcome.message;
    doc["created"] = utc_timestamp();
    write_text(config.output / "summary.json", doc.dump(2) + "\n");
    return outcome;
}

void report(const std::vector<std::filesystem::path>& inputs, std::ostream& out) {
    require(!inputs.empty(), Errc::config, "report needs at least one summary directory");
    struct Line {
        std::string name, mode, model, function, slope, exponent, verdict;
    };
    std::vector<Line> lines;
    for (const auto& input : inputs) {
        const auto file = std::filesystem::is_directory(input) ? input / "summary.json" : input;
        std::ifstream in(file);
        if (!in) {
            fail(Errc::io, "cannot read '" + file.string() + "'");
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::exception& e) {
            fail(Errc::io, "'" + file.string() + "' is not a valid summary: " + e.what());
        }
        Line line;
        line.name = std::filesystem::is_directory(input) ? input.filename().string() : input.parent_path().filename().string();
        if (line.name.empty()) {
            line.name = input.string();
        }
        line.mode = doc.value("mode", "?");
        line.model = doc["model"].value("descriptor", "?");
        line.function = doc["function"].value("descriptor", "?");
        std::ostringstream slope;
        slope << std::fixed << std::setprecision(3);
        if (doc.contains("fit") && doc["fit"].is_object()) {
            slope << doc["fit"]["slope"].get<double>() << " +/- " << doc["fit"]["slope_stderr"].get<double>();
        } else {
            slope << "-";
        }
        line.slope = slope.str();
        std::ostringstream exponent;
        exponent << std::fixed << std::setprecision(3);
        if (doc.contains("theory") && doc["theory"].is_object()) {
            exponent << doc["theory"]["exponent"].get<double>();
        } else if (doc.contains("moments")) {
            exponent << doc["moments"]["exponent"].get<double>();
        } else {
            exponent << "-";
        }
        line.exponent = exponent.str();
        line.verdict = doc.value("pass", false) ? "PASS" : "FAIL";
        if (doc.contains("checks")) {
            std::string failed;
            for (const auto& [name, ok] : doc["checks"].items()) {
                if (!ok.get<bool>()) {
                    failed += (failed.empty() ? "" : ",") + name;
                }
            }
            if (!failed.empty()) {
                line.verdict += " (" + failed + ")";
            }
        }
        lines.push_back(std::move(line));
    }

    const Line header{"experiment", "mode", "model", "h", "slope", "theory", "verdict"};
    std::size_t w[6] = {header.name.size(), header.mode.size(), header.model.size(),
                        header.function.size(), header.slope.size(), header.exponent.size()};
    for (const Line& l : lines) {
        w[0] = std::max(w[0], l.name.size());
        w[1] = std::max(w[1], l.mode.size());
        w[2] = std::max(w[2], l.model.size());
        w[3] = std::max(w[3], l.function.size());
        w[4] = std::max(w[4], l.slope.size());
        w[5] = std::max(w[5], l.exponent.size());
    }
    auto print = [&](const Line& l) {
        out << std::left << std::setw(static_cast<int>(w[0])) << l.name << "  " << std::setw(static_cast<int>(w[1]))
            << l.mode << "  " << std::setw(static_cast<int>(w[2])) << l.model << "  "
            << std::setw(static_cast<int>(w[3])) << l.function << "  " << std::setw(static_cast<int>(w[4])) << l.slope
            << "  " << std::setw(static_cast<int>(w[5])) << l.exponent << "  " << l.verdict << '\n';
    };
    print(header);
    for (const Line& l : lines) {
        print(l);
    }
}

void print_constants(const ConstantsRequest& request, std::ostream& out) {
    std::optional<ProcessModel> model;
    if (request.model == "brownian") {
        require(request.alpha == 2.0, Errc::config, "brownian models have alpha = 2");
        model = ProcessModel::brownian(request.sigma);
    } else if (request.model == "stable") {
        model = ProcessModel::stable(request.alpha, request.scale);
    } else {
        fail(Errc::config, "constants: --model must be brownian or stable, got '" + request.model + "'");
    }
    check_gamma_admissible(request.gamma, model->alpha());
    const auto cert = certificate_for(*model, request.T);
    if (!cert) {
        fail(Errc::not_certified, model->describe() + " has no certificate");
    }
    const TheoryBound tb = make_theory_bound(*cert, request.T, request.gamma, request.holder_norm);

    out << std::setprecision(10);
    out << "model        " << model->describe() << '\n';
    out << "gamma        " << request.gamma << '\n';
    out << "alpha        " << model->alpha() << '\n';
    out << "T            " << request.T << '\n';
    out << "c_T          " << cert->c_T() << '\n';
    out << "q_moment     " << q_moment(*cert, request.gamma) << '\n';
    out << "D            " << tb.d_constant << '\n';
    if (tb.c_constant) {
        const CGammaAlpha c = c_gamma_alpha_terms(request.gamma, model->alpha());
        out << "C            " << c.value << "  (first term " << c.first_term << ", scan max " << c.scan_max
            << " at n = " << std::setprecision(17) << c.scan_argmax << std::setprecision(10) << ")\n";
        out << "branch       generic\n";
    } else {
        out << "C            n/a\n";
        out << "branch       boundary\n";
    }
    out << "exponent     " << theoretical_exponent(request.gamma, model->alpha()) << '\n';
    out << "holder_norm  " << request.holder_norm << '\n';
    for (std::size_t n : request.ns) {
        out << "bound(n=" << n << ")" << std::string(n < 10 ? 3 : n < 100 ? 2 : n < 1000 ? 1 : 0, ' ') << " "
            << theoretical_bound(tb, n) << '\n';
    }
}

}  // namespace funcrate::cli
