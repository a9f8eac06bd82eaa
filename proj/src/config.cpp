#include <algorithm>
#include <set>

#include "nmqj/errors.hpp"
#include "nmqj/harness.hpp"

namespace nmqj {

namespace {

using nlohmann::json;

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Best effort: the line on which a key first appears.
int line_of_key(std::string_view text, const std::string& key) {
    const auto pos = text.find("\"" + key + "\"");
    return pos == std::string_view::npos ? 0 : line_of_offset(text, pos);
}

class Reader {
  public:
    explicit Reader(std::string_view text) : text_(text) {}

    [[noreturn]] void fail(const std::string& field, const std::string& what) const {
        const auto leaf = field.substr(field.find_last_of('.') + 1);
        const int line = line_of_key(text_, leaf);
        throw ParseError("config field '" + field + "' " + what +
                             (line > 0 ? " (line " + std::to_string(line) + ")" : ""),
                         line, field);
    }

    void require_object(const json& j, const std::string& field) const {
        if (!j.is_object()) {
            fail(field, "must be an object");
        }
    }

    void reject_unknown(const json& j, const std::string& field,
                        std::initializer_list<const char*> allowed) const {
        const std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [k, v] : j.items()) {
            if (!keys.contains(k)) {
                fail(field.empty() ? k : field + "." + k, "is not a recognised key");
            }
        }
    }

    double number(const json& j, const std::string& field) const {
        if (!j.is_number()) {
            fail(field, "must be a number");
        }
        return j.get<double>();
    }

    std::int64_t integer(const json& j, const std::string& field) const {
        if (!j.is_number_integer()) {
            fail(field, "must be an integer");
        }
        return j.get<std::int64_t>();
    }

    bool boolean(const json& j, const std::string& field) const {
        if (!j.is_boolean()) {
            fail(field, "must be a boolean");
        }
        return j.get<bool>();
    }

    std::string string(const json& j, const std::string& field) const {
        if (!j.is_string()) {
            fail(field, "must be a string");
        }
        return j.get<std::string>();
    }

    std::vector<double> numbers(const json& j, const std::string& field) const {
        if (!j.is_array()) {
            fail(field, "must be an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            out.push_back(number(j[i], field + "[" + std::to_string(i) + "]"));
        }
        return out;
    }

    // [x, y, ...] or [[re, im], ...]
    std::vector<Complex> amplitudes(const json& j, const std::string& field) const {
        if (!j.is_array()) {
            fail(field, "must be an array");
        }
        std::vector<Complex> out;
        for (std::size_t i = 0; i < j.size(); ++i) {
            const std::string f = field + "[" + std::to_string(i) + "]";
            if (j[i].is_array()) {
                const auto pair = numbers(j[i], f);
                if (pair.size() != 2) {
                    fail(f, "must be a [re, im] pair");
                }
                out.emplace_back(pair[0], pair[1]);
            } else {
                out.emplace_back(number(j[i], f), 0.0);
            }
        }
        return out;
    }

  private:
    std::string_view text_;
};

}  // namespace

ModelSpec RunConfig::build_model() const { return nmqj::build_model(model.kind, model.overrides); }

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const int line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
        throw ParseError("config is not valid JSON (line " + std::to_string(line) + "): " +
                             e.what(),
                         line, "");
    }
    Reader rd(text);
    rd.require_object(root, "<root>");
    rd.reject_unknown(root, "", {"model", "engine", "output", "comparison"});

    RunConfig cfg;
    if (root.contains("model")) {
        const auto& m = root["model"];
        rd.require_object(m, "model");
        rd.reject_unknown(m, "model",
                          {"name", "detunings", "coupling", "initial_state", "ladder_start",
                           "lamb_shift", "constant_rates"});
        if (m.contains("name")) {
            const auto name = rd.string(m["name"], "model.name");
            const auto kind = parse_model_kind(name);
            if (!kind) {
                throw ValidationError("unknown model '" + name + "'");
            }
            cfg.model.kind = *kind;
        }
        auto& ov = cfg.model.overrides;
        if (m.contains("detunings")) {
            ov.detunings = rd.numbers(m["detunings"], "model.detunings");
        }
        if (m.contains("coupling")) {
            ov.coupling = rd.number(m["coupling"], "model.coupling");
            if (!(*ov.coupling > 0.0)) {
                throw ValidationError("model.coupling must be positive");
            }
        }
        if (m.contains("initial_state")) {
            ov.initial_amplitudes = rd.amplitudes(m["initial_state"], "model.initial_state");
        }
        if (m.contains("ladder_start")) {
            const auto s = rd.string(m["ladder_start"], "model.ladder_start");
            if (s == "mixed" || s == "mixed_start") {
                ov.ladder_start = LadderStart::Mixed;
            } else if (s == "excited" || s == "excited_start") {
                ov.ladder_start = LadderStart::Excited;
            } else {
                throw ValidationError("model.ladder_start must be 'mixed' or 'excited'");
            }
        }
        if (m.contains("lamb_shift")) {
            ov.lamb_shift = rd.boolean(m["lamb_shift"], "model.lamb_shift");
        }
        if (m.contains("constant_rates")) {
            ov.constant_rates = rd.numbers(m["constant_rates"], "model.constant_rates");
        }
    }

    if (root.contains("engine")) {
        const auto& e = root["engine"];
        rd.require_object(e, "engine");
        rd.reject_unknown(e, "engine",
                          {"dt", "t_max", "ensemble_size", "seed", "record_stride",
                           "max_jump_prob"});
        auto& eng = cfg.engine;
        if (e.contains("dt")) eng.dt = rd.number(e["dt"], "engine.dt");
        if (e.contains("t_max")) eng.t_max = rd.number(e["t_max"], "engine.t_max");
        if (e.contains("ensemble_size")) {
            eng.ensemble_size = rd.integer(e["ensemble_size"], "engine.ensemble_size");
        }
        if (e.contains("seed")) {
            const auto s = rd.integer(e["seed"], "engine.seed");
            if (s < 0) {
                throw ValidationError("engine.seed must be non-negative");
            }
            eng.rng_seed = static_cast<std::uint64_t>(s);
        }
        if (e.contains("record_stride")) {
            const auto s = rd.integer(e["record_stride"], "engine.record_stride");
            if (s < 1) {
                throw ValidationError("engine.record_stride must be at least 1");
            }
            eng.record_stride = static_cast<std::size_t>(s);
        }
        if (e.contains("max_jump_prob")) {
            eng.max_jump_prob = rd.number(e["max_jump_prob"], "engine.max_jump_prob");
        }
    }
    cfg.engine.validate();

    if (root.contains("output")) {
        const auto& o = root["output"];
        rd.require_object(o, "output");
        rd.reject_unknown(o, "output", {"directory", "formats"});
        if (o.contains("directory")) {
            cfg.output.directory = rd.string(o["directory"], "output.directory");
        }
        if (o.contains("formats")) {
            if (!o["formats"].is_array()) {
                rd.fail("output.formats", "must be an array of strings");
            }
            cfg.output.csv = false;
            cfg.output.json = false;
            for (const auto& f : o["formats"]) {
                const auto s = rd.string(f, "output.formats");
                if (s == "csv") {
                    cfg.output.csv = true;
                } else if (s == "json") {
                    cfg.output.json = true;
                } else {
                    throw ValidationError("output.formats accepts 'csv' and 'json'");
                }
            }
        }
    }

    if (root.contains("comparison")) {
        const auto& c = root["comparison"];
        rd.require_object(c, "comparison");
        rd.reject_unknown(c, "comparison",
                          {"analytic", "rk4", "tolerance", "oracle_tolerance",
                           "positivity_tolerance"});
        auto& cmp = cfg.comparison;
        if (c.contains("analytic")) cmp.analytic = rd.boolean(c["analytic"], "comparison.analytic");
        if (c.contains("rk4")) cmp.rk4 = rd.boolean(c["rk4"], "comparison.rk4");
        if (c.contains("tolerance")) {
            cmp.statistical_tolerance = rd.number(c["tolerance"], "comparison.tolerance");
        }
        if (c.contains("oracle_tolerance")) {
            cmp.oracle_tolerance = rd.number(c["oracle_tolerance"], "comparison.oracle_tolerance");
        }
        if (c.contains("positivity_tolerance")) {
            cmp.positivity_tolerance =
                rd.number(c["positivity_tolerance"], "comparison.positivity_tolerance");
        }
        if (!(cmp.statistical_tolerance > 0.0) || !(cmp.oracle_tolerance > 0.0) ||
            (cmp.positivity_tolerance && !(*cmp.positivity_tolerance >= 0.0))) {
            throw ValidationError("comparison tolerances must be positive");
        }
    }

    // Surface model-level inconsistencies (detuning count, zero initial state)
    // at parse time.
    (void)cfg.build_model();
    return cfg;
}

}  // namespace nmqj
