#include "funcrate/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "funcrate/error.hpp"
#include "funcrate/estimate.hpp"

namespace funcrate::cli {

const ConfigValue* ConfigValue::field(std::string_view key) const {
    for (const auto& [k, v] : fields) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

const ConfigValue* ConfigDocument::find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

namespace {

class Parser {
public:
    Parser(std::string_view text, std::string source) : text_(text), source_(std::move(source)) {}

    ConfigDocument document() {
        ConfigDocument doc;
        doc.source = source_;
        std::set<std::string, std::less<>> seen;
        for (;;) {
            skip_blank_lines();
            if (at_end()) {
                break;
            }
            const int key_line = line_;
            std::string key = parse_key();
            skip_spaces();
            expect('=');
            skip_spaces();
            ConfigValue value = parse_value();
            skip_spaces();
            skip_comment();
            if (!at_end() && peek() != '\n') {
                error("unexpected '" + std::string(1, peek()) + "' after the value of '" + key + "'");
            }
            if (!seen.insert(key).second) {
                error_at(key_line, "duplicate key '" + key + "'");
            }
            doc.entries.emplace_back(std::move(key), std::move(value));
        }
        return doc;
    }

private:
    [[nodiscard]] bool at_end() const { return pos_ >= text_.size(); }
    [[nodiscard]] char peek() const { return text_[pos_]; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
        }
        return c;
    }

    [[noreturn]] void error_at(int line, const std::string& message) const {
        std::string context;
        std::size_t start = 0;
        for (int l = 1; l < line && start < text_.size(); ++l) {
            start = text_.find('\n', start);
            start = start == std::string_view::npos ? text_.size() : start + 1;
        }
        const std::size_t end = std::min(text_.find('\n', start), text_.size());
        context = std::string(text_.substr(start, end - start));
        fail(Errc::config, source_ + ":" + std::to_string(line) + ": " + message + "\n    " + context);
    }

    [[noreturn]] void error(const std::string& message) const { error_at(line_, message); }

    void skip_spaces() {
        while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) {
            advance();
        }
    }

    void skip_comment() {
        if (!at_end() && peek() == '#') {
            while (!at_end() && peek() != '\n') {
                advance();
            }
        }
    }

    // Whitespace, comments and newlines; used between lines and inside brackets.
    void skip_blank_lines() {
        for (;;) {
            skip_spaces();
            skip_comment();
            if (!at_end() && peek() == '\n') {
                advance();
                continue;
            }
            return;
        }
    }

    void expect(char c) {
        if (at_end() || peek() != c) {
            error(std::string("expected '") + c + "'");
        }
        advance();
    }

    static bool key_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    std::string parse_key() {
        std::string key;
        while (!at_end() && key_char(peek())) {
            key += advance();
        }
        if (key.empty()) {
            error("expected a key");
        }
        return key;
    }

    ConfigValue parse_value() {
        if (at_end()) {
            error("missing value");
        }
        ConfigValue v;
        v.line = line_;
        const char c = peek();
        if (c == '"') {
            advance();
            v.kind = ConfigValue::Kind::string;
            while (!at_end() && peek() != '"' && peek() != '\n') {
                v.text += advance();
            }
            expect('"');
        } else if (c == '[') {
            advance();
            v.kind = ConfigValue::Kind::array;
            skip_blank_lines();
            while (!at_end() && peek() != ']') {
                v.items.push_back(parse_value());
                skip_blank_lines();
                if (!at_end() && peek() == ',') {
                    advance();
                    skip_blank_lines();
                } else {
                    break;
                }
            }
            expect(']');
        } else if (c == '{') {
            advance();
            v.kind = ConfigValue::Kind::table;
            skip_blank_lines();
            while (!at_end() && peek() != '}') {
                std::string key = parse_key();
                skip_spaces();
                expect('=');
                skip_spaces();
                if (v.field(key) != nullptr) {
                    error("duplicate field '" + key + "'");
                }
                v.fields.emplace_back(std::move(key), parse_value());
                skip_blank_lines();
                if (!at_end() && peek() == ',') {
                    advance();
                    skip_blank_lines();
                } else {
                    break;
                }
            }
            expect('}');
        } else {
            std::string word;
            while (!at_end() && (key_char(peek()) || peek() == '.' || peek() == '+')) {
                word += advance();
            }
            if (word == "true" || word == "false") {
                v.kind = ConfigValue::Kind::boolean;
                v.boolean = word == "true";
                return v;
            }
            std::string digits;
            for (char ch : word) {
                if (ch != '_') {
                    digits += ch;
                }
            }
            const char* first = digits.data();
            const char* last = first + digits.size();
            const auto [ptr, ec] = std::from_chars(first, last, v.number);
            if (word.empty() || ec != std::errc() || ptr != last) {
                error(word.empty() ? "expected a value" : "invalid value '" + word + "'");
            }
            v.kind = ConfigValue::Kind::number;
            v.text = digits;
        }
        return v;
    }

    std::string_view text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

// Typed access with line-tagged errors.
class Reader {
public:
    explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

    [[noreturn]] void error(const ConfigValue& at, const std::string& message, Errc code = Errc::config) const {
        fail(code, doc_.source + ":" + std::to_string(at.line) + ": " + message);
    }

    const ConfigValue& require_key(std::string_view key) const {
        const ConfigValue* v = doc_.find(key);
        if (v == nullptr) {
            fail(Errc::config, doc_.source + ": missing required key '" + std::string(key) + "'");
        }
        return *v;
    }

    double number(const ConfigValue& v, std::string_view what) const {
        if (v.kind != ConfigValue::Kind::number) {
            error(v, std::string(what) + " must be a number");
        }
        return v.number;
    }

    std::uint64_t integer(const ConfigValue& v, std::string_view what) const {
        if (v.kind != ConfigValue::Kind::number) {
            error(v, std::string(what) + " must be an integer");
        }
        std::uint64_t out = 0;
        const char* first = v.text.data();
        const char* last = first + v.text.size();
        const auto [ptr, ec] = std::from_chars(first, last, out);
        if (ec == std::errc() && ptr == last) {
            return out;
        }
        // Accept integral floating spellings such as 1e5.
        if (v.number >= 0.0 && v.number <= 0x1p53 && std::floor(v.number) == v.number) {
            return static_cast<std::uint64_t>(v.number);
        }
        error(v, std::string(what) + " must be a non-negative integer, got '" + v.text + "'");
    }

    std::string string(const ConfigValue& v, std::string_view what) const {
        if (v.kind != ConfigValue::Kind::string) {
            error(v, std::string(what) + " must be a quoted string");
        }
        return v.text;
    }

    std::vector<double> numbers(const ConfigValue& v, std::string_view what) const {
        if (v.kind == ConfigValue::Kind::number) {
            return {v.number};
        }
        if (v.kind != ConfigValue::Kind::array) {
            error(v, std::string(what) + " must be a number or an array of numbers");
        }
        std::vector<double> out;
        for (const ConfigValue& item : v.items) {
            out.push_back(number(item, what));
        }
        return out;
    }

    const ConfigValue& table(const ConfigValue& v, std::string_view what) const {
        if (v.kind != ConfigValue::Kind::table) {
            error(v, std::string(what) + " must be an inline table { kind = ..., ... }");
        }
        return v;
    }

    void only_fields(const ConfigValue& table, std::string_view what, std::initializer_list<std::string_view> allowed) const {
        for (const auto& [key, value] : table.fields) {
            bool ok = false;
            for (std::string_view a : allowed) {
                ok = ok || key == a;
            }
            if (!ok) {
                error(value, "unknown field '" + key + "' in " + std::string(what));
            }
        }
    }

    double field_number(const ConfigValue& table, std::string_view key, std::optional<double> fallback) const {
        const ConfigValue* v = table.field(key);
        if (v == nullptr) {
            if (!fallback) {
                error(table, "missing field '" + std::string(key) + "'");
            }
            return *fallback;
        }
        return number(*v, key);
    }

private:
    const ConfigDocument& doc_;
};

// Re-tags library validation errors with the line they came from.
template <class F>
auto at_line(const Reader& reader, const ConfigValue& v, F&& make) -> decltype(make()) {
    try {
        return make();
    } catch (const Error& e) {
        reader.error(v, e.what(), e.code() == Errc::domain ? Errc::config : e.code());
    }
}

std::function<double(double)> affine(const std::vector<double>& coefficients) {
    const double a = coefficients[0];
    const double b = coefficients[1];
    return [a, b](double x) { return a + b * x; };
}

ProcessModel read_model(const Reader& r, const ConfigValue& entry, std::string& kind) {
    const ConfigValue& t = r.table(entry, "model");
    const ConfigValue* kind_value = t.field("kind");
    if (kind_value == nullptr) {
        r.error(t, "model needs a kind (\"brownian\", \"stable\" or \"euler\")");
    }
    kind = r.string(*kind_value, "model kind");
    std::vector<double> x0{0.0};
    if (const ConfigValue* v = t.field("x0")) {
        x0 = r.numbers(*v, "x0");
    }
    if (kind == "brownian") {
        r.only_fields(t, "brownian model", {"kind", "sigma", "x0"});
        const double sigma = r.field_number(t, "sigma", 1.0);
        return at_line(r, t, [&] { return ProcessModel::brownian(sigma, x0); });
    }
    if (x0.size() != 1) {
        r.error(t, kind + " models are one-dimensional; x0 must be a single number");
    }
    if (kind == "stable") {
        r.only_fields(t, "stable model", {"kind", "alpha", "scale", "x0"});
        const double alpha = r.field_number(t, "alpha", std::nullopt);
        const double scale = r.field_number(t, "scale", 1.0);
        return at_line(r, t, [&] { return ProcessModel::stable(alpha, scale, x0[0]); });
    }
    if (kind == "euler") {
        r.only_fields(t, "euler model", {"kind", "drift", "diffusion", "x0"});
        auto coefficients = [&](std::string_view key, std::vector<double> fallback) {
            const ConfigValue* v = t.field(key);
            if (v == nullptr) {
                return fallback;
            }
            auto c = r.numbers(*v, key);
            if (c.size() != 2) {
                r.error(*v, std::string(key) + " must be [a, b] for a + b x");
            }
            return c;
        };
        const auto drift = coefficients("drift", {0.0, 0.0});
        const auto diffusion = coefficients("diffusion", {1.0, 0.0});
        std::ostringstream name;
        name.precision(17);
        name << "euler(drift=" << drift[0] << "+" << drift[1] << "x,diffusion=" << diffusion[0] << "+"
             << diffusion[1] << "x)";
        return ProcessModel::euler(affine(drift), affine(diffusion), x0[0], name.str());
    }
    r.error(*kind_value, "unknown model kind '" + kind + "'");
}

HolderFunction read_function(const Reader& r, const ConfigValue& entry, std::string& kind) {
    const ConfigValue& t = r.table(entry, "h");
    const ConfigValue* kind_value = t.field("kind");
    if (kind_value == nullptr) {
        r.error(t, "h needs a kind (\"constant\", \"linear\", \"power\", \"sine\" or \"clipped_power\")");
    }
    kind = r.string(*kind_value, "h kind");
    return at_line(r, t, [&] {
        if (kind == "constant") {
            r.only_fields(t, "constant h", {"kind", "value", "gamma"});
            return HolderFunction::constant(r.field_number(t, "value", std::nullopt), r.field_number(t, "gamma", 1.0));
        }
        if (kind == "linear") {
            r.only_fields(t, "linear h", {"kind", "slope", "offset"});
            return HolderFunction::linear(r.field_number(t, "slope", 1.0), r.field_number(t, "offset", 0.0));
        }
        if (kind == "power") {
            r.only_fields(t, "power h", {"kind", "gamma", "center"});
            std::vector<double> center{0.0};
            if (const ConfigValue* v = t.field("center")) {
                center = r.numbers(*v, "center");
            }
            return HolderFunction::power_abs(r.field_number(t, "gamma", std::nullopt), center);
        }
        if (kind == "sine") {
            r.only_fields(t, "sine h", {"kind", "frequency", "gamma"});
            return HolderFunction::sine(r.field_number(t, "frequency", 1.0), r.field_number(t, "gamma", 1.0));
        }
        if (kind == "clipped_power") {
            r.only_fields(t, "clipped_power h", {"kind", "gamma", "center", "cap"});
            return HolderFunction::clipped_power(r.field_number(t, "gamma", std::nullopt),
                                                 r.field_number(t, "center", 0.0),
                                                 r.field_number(t, "cap", std::nullopt));
        }
        r.error(*kind_value, "unknown h kind '" + kind + "'");
    });
}

}  // namespace

ConfigDocument parse_config(std::string_view text, std::string source) {
    return Parser(text, std::move(source)).document();
}

ConfigDocument load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(Errc::io, "cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::rates: return "rates";
        case Mode::bound_check: return "bound-check";
        case Mode::moment_check: return "moment-check";
        case Mode::oracle_compare: return "oracle-compare";
    }
    return "unknown";
}

ExperimentConfig make_experiment(const ConfigDocument& doc) {
    const Reader r(doc);
    static const std::set<std::string, std::less<>> known{
        "mode", "model", "h", "T", "n_ref", "eval_ns", "M", "master_seed", "output",
        "fit_n_min", "slope_tolerance", "deltas", "block_size"};
    for (const auto& [key, value] : doc.entries) {
        if (!known.contains(key)) {
            r.error(value, "unknown key '" + key + "'");
        }
    }

    Mode mode = Mode::rates;
    if (const ConfigValue* v = doc.find("mode")) {
        const std::string name = r.string(*v, "mode");
        if (name == "rates") {
            mode = Mode::rates;
        } else if (name == "bound-check") {
            mode = Mode::bound_check;
        } else if (name == "moment-check") {
            mode = Mode::moment_check;
        } else if (name == "oracle-compare") {
            mode = Mode::oracle_compare;
        } else {
            r.error(*v, "unknown mode '" + name + "' (rates, bound-check, moment-check, oracle-compare)");
        }
    }

    std::string model_kind;
    std::string function_kind;
    const ConfigValue& model_value = r.require_key("model");
    ProcessModel model = read_model(r, model_value, model_kind);
    const ConfigValue& h_value = r.require_key("h");
    HolderFunction h = read_function(r, h_value, function_kind);
    at_line(r, h_value, [&] {
        check_gamma_admissible(h.gamma(), model.alpha());
        return 0;
    });

    const ConfigValue& T_value = r.require_key("T");
    const double T = r.number(T_value, "T");
    if (!(T > 0.0) || !std::isfinite(T)) {
        r.error(T_value, "T must be a positive number");
    }

    const ConfigValue& M_value = r.require_key("M");
    const auto M = static_cast<std::size_t>(r.integer(M_value, "M"));
    if (M < 100) {
        r.error(M_value, "M must be at least 100");
    }
    const std::uint64_t seed = r.integer(r.require_key("master_seed"), "master_seed");

    std::optional<GridSpec> grid;
    if (mode != Mode::moment_check || doc.find("n_ref") != nullptr) {
        const ConfigValue& n_ref_value = r.require_key("n_ref");
        const ConfigValue& ns_value = r.require_key("eval_ns");
        const auto n_ref = static_cast<std::size_t>(r.integer(n_ref_value, "n_ref"));
        if (ns_value.kind != ConfigValue::Kind::array) {
            r.error(ns_value, "eval_ns must be an array of integers");
        }
        std::vector<std::size_t> ns;
        for (const ConfigValue& item : ns_value.items) {
            ns.push_back(static_cast<std::size_t>(r.integer(item, "eval_ns entry")));
        }
        grid = at_line(r, ns_value, [&] { return GridSpec(T, n_ref, ns); });
    }

    ExperimentConfig config{mode, std::move(model), std::move(h), T, std::move(grid), M, seed, {}, {}, 0.2, {}, 256,
                            model_kind, function_kind};

    config.output = doc.find("output") != nullptr ? r.string(*doc.find("output"), "output") : "funcrate-out";
    if (const ConfigValue* v = doc.find("fit_n_min")) {
        config.fit_n_min = static_cast<std::size_t>(r.integer(*v, "fit_n_min"));
    }
    if (const ConfigValue* v = doc.find("slope_tolerance")) {
        config.slope_tolerance = r.number(*v, "slope_tolerance");
        if (!(config.slope_tolerance > 0.0)) {
            r.error(*v, "slope_tolerance must be > 0");
        }
    }
    if (const ConfigValue* v = doc.find("block_size")) {
        config.block_size = static_cast<std::size_t>(r.integer(*v, "block_size"));
        if (config.block_size == 0) {
            r.error(*v, "block_size must be positive");
        }
    }
    if (const ConfigValue* v = doc.find("deltas")) {
        config.deltas = r.numbers(*v, "deltas");
        for (double d : config.deltas) {
            if (!(d > 0.0) || d > T) {
                r.error(*v, "deltas must lie in (0, T]");
            }
        }
    } else {
        for (int k = 2; k <= 10; ++k) {
            config.deltas.push_back(T * std::ldexp(1.0, -k));
        }
    }

    if (mode == Mode::oracle_compare) {
        if (model_kind != "brownian" || config.model.dimension() != 1 || function_kind != "linear") {
            r.error(model_value, "oracle-compare needs a one-dimensional brownian model and a linear h");
        }
    }
    if ((mode == Mode::bound_check || mode == Mode::moment_check) && !is_certifiable(config.model)) {
        r.error(model_value, "mode " + std::string(to_string(mode)) + " needs a certified model; " +
                                 config.model.describe() + " is not certified",
                Errc::not_certified);
    }
    return config;
}

}  // namespace funcrate::cli
