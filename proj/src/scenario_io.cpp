#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tsdiff/error.hpp"
#include "tsdiff/harness.hpp"

namespace tsdiff {

namespace {

using json = nlohmann::json;

std::string join(std::string_view path, std::string_view key) {
    return path.empty() ? std::string(key) : std::string(path) + "." + std::string(key);
}

void reject_unknown_keys(const json& obj, std::string_view path, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw ConfigError(join(path, key), "unknown field");
    }
}

const json& object_at(const json& parent, std::string_view key, std::string_view path) {
    const auto it = parent.find(std::string(key));
    if (it == parent.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_object()) throw ConfigError(join(path, key), "must be an object");
    return *it;
}

double number_at(const json& obj, std::string_view key, std::string_view path) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_number()) throw ConfigError(join(path, key), "must be a number");
    return it->get<double>();
}

double number_or(const json& obj, std::string_view key, std::string_view path, double fallback) {
    return obj.contains(std::string(key)) ? number_at(obj, key, path) : fallback;
}

std::string string_at(const json& obj, std::string_view key, std::string_view path) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_string()) throw ConfigError(join(path, key), "must be a string");
    return it->get<std::string>();
}

std::vector<double> numbers_at(const json& obj, std::string_view key, std::string_view path) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_array()) throw ConfigError(join(path, key), "must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : *it) {
        if (!v.is_number()) throw ConfigError(join(path, key), "must be an array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

Sine parse_sine(const json& obj, const std::string& path) {
    return Sine{number_or(obj, "amplitude", path, 1.0), number_or(obj, "frequency", path, 1.0),
                number_or(obj, "phase", path, 0.0)};
}

SignalForm parse_form(const json& obj, const std::string& path, const std::filesystem::path& base_dir) {
    const auto type = string_at(obj, "type", path);
    if (type == "sine") {
        reject_unknown_keys(obj, path, {"type", "amplitude", "frequency", "phase"});
        return parse_sine(obj, path);
    }
    if (type == "polynomial") {
        reject_unknown_keys(obj, path, {"type", "coefficients"});
        return Polynomial{numbers_at(obj, "coefficients", path)};
    }
    if (type == "sum_of_sines") {
        reject_unknown_keys(obj, path, {"type", "terms"});
        const auto it = obj.find("terms");
        if (it == obj.end() || !it->is_array()) throw ConfigError(path + ".terms", "must be an array");
        SumOfSines sum;
        for (std::size_t q = 0; q < it->size(); ++q) {
            const auto term_path = path + ".terms[" + std::to_string(q) + "]";
            if (!(*it)[q].is_object()) throw ConfigError(term_path, "must be an object");
            reject_unknown_keys((*it)[q], term_path, {"amplitude", "frequency", "phase"});
            sum.terms.push_back(parse_sine((*it)[q], term_path));
        }
        return sum;
    }
    if (type == "recorded") {
        reject_unknown_keys(obj, path, {"type", "path", "samples"});
        if (obj.contains("path")) {
            std::filesystem::path file = string_at(obj, "path", path);
            if (file.is_relative()) file = base_dir / file;
            try {
                return load_recorded_csv(file);
            } catch (const Error& e) {
                throw ConfigError(path + ".path", e.what());
            }
        }
        const auto it = obj.find("samples");
        if (it == obj.end() || !it->is_array()) throw ConfigError(path, "recorded signal needs 'path' or 'samples'");
        Recorded rec;
        try {
            for (const auto& pair : *it) rec.samples.push(pair.at(0).get<double>(), pair.at(1).get<double>());
        } catch (const std::exception& e) {
            throw ConfigError(path + ".samples", e.what());
        }
        return rec;
    }
    throw ConfigError(path + ".type", "unknown signal form '" + type + "'");
}

json form_to_json(const SignalForm& form) {
    auto sine_json = [](const Sine& s) {
        return json{{"amplitude", s.amplitude}, {"frequency", s.frequency}, {"phase", s.phase}};
    };
    if (const auto* s = std::get_if<Sine>(&form)) {
        auto j = sine_json(*s);
        j["type"] = "sine";
        return j;
    }
    if (const auto* p = std::get_if<Polynomial>(&form)) return json{{"type", "polynomial"}, {"coefficients", p->coefficients}};
    if (const auto* sum = std::get_if<SumOfSines>(&form)) {
        json terms = json::array();
        for (const auto& t : sum->terms) terms.push_back(sine_json(t));
        return json{{"type", "sum_of_sines"}, {"terms", terms}};
    }
    const auto& rec = std::get<Recorded>(form);
    json samples = json::array();
    for (const auto& sample : rec.samples.samples()) samples.push_back({sample.t, sample.value});
    return json{{"type", "recorded"}, {"samples", samples}};
}

}  // namespace

Scenario parse_scenario(std::string_view json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("<document>", "must be a JSON object");
    reject_unknown_keys(doc, "", {"schema_version", "name", "description", "figures", "differentiator", "signal",
                                  "integrator", "metrics_window", "calibration"});

    const auto version = number_at(doc, "schema_version", "");
    if (version != kScenarioSchemaVersion)
        throw ConfigError("schema_version", "unsupported version " + std::to_string(version));

    Scenario s;
    s.name = string_at(doc, "name", "");
    if (doc.contains("description")) s.description = string_at(doc, "description", "");
    if (doc.contains("figures")) {
        for (double f : numbers_at(doc, "figures", "")) s.figures.push_back(static_cast<int>(f));
    }

    // signal
    const auto& sig = object_at(doc, "signal", "");
    reject_unknown_keys(sig, "signal", {"form", "delay", "noise"});
    s.signal.form = parse_form(object_at(sig, "form", "signal"), "signal.form", base_dir);
    s.signal.delay = number_or(sig, "delay", "signal", 0.0);
    if (sig.contains("noise") && !sig["noise"].is_null()) {
        const auto& nz = object_at(sig, "noise", "signal");
        reject_unknown_keys(nz, "signal.noise", {"kind", "scale", "seed"});
        NoiseSpec noise;
        const auto kind = string_at(nz, "kind", "signal.noise");
        if (kind == "uniform") noise.kind = NoiseSpec::Kind::uniform;
        else if (kind == "gaussian") noise.kind = NoiseSpec::Kind::gaussian;
        else throw ConfigError("signal.noise.kind", "must be 'uniform' or 'gaussian'");
        noise.scale = number_or(nz, "scale", "signal.noise", noise.scale);
        if (nz.contains("seed")) {
            if (!nz["seed"].is_number_unsigned()) throw ConfigError("signal.noise.seed", "must be a non-negative integer");
            noise.seed = nz["seed"].get<std::uint64_t>();
        }
        s.signal.noise = noise;
    }

    // differentiator
    const auto& dif = object_at(doc, "differentiator", "");
    reject_unknown_keys(dif, "differentiator", {"method", "k", "delta", "delta_g", "epsilon", "init"});
    try {
        s.differentiator.k = GainVector(numbers_at(dif, "k", "differentiator"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("differentiator.k", e.what());
    }
    const auto method = dif.contains("method") ? string_at(dif, "method", "differentiator") : std::string("two_step");
    if (method == "two_step") s.differentiator.method = Method::two_step;
    else if (method == "baseline") s.differentiator.method = Method::baseline;
    else throw ConfigError("differentiator.method", "must be 'baseline' or 'two_step'");
    s.differentiator.delta = number_or(dif, "delta", "differentiator", s.signal.delay);
    s.differentiator.delta_g = number_or(dif, "delta_g", "differentiator", 0.0);
    const auto init = dif.contains("init") ? string_at(dif, "init", "differentiator") : std::string("zero");
    if (init == "zero") s.differentiator.init = InitPolicy::zero;
    else if (init == "measurement") s.differentiator.init = InitPolicy::measurement;
    else throw ConfigError("differentiator.init", "must be 'zero' or 'measurement'");

    const auto& eps = object_at(dif, "epsilon", "differentiator");
    reject_unknown_keys(eps, "differentiator.epsilon", {"constant", "schedule"});
    if (eps.contains("constant") == eps.contains("schedule"))
        throw ConfigError("differentiator.epsilon", "needs exactly one of 'constant' or 'schedule'");
    if (eps.contains("constant")) {
        s.differentiator.epsilon = ConstantEpsilon{number_at(eps, "constant", "differentiator.epsilon")};
    } else {
        const auto& sch = object_at(eps, "schedule", "differentiator.epsilon");
        const std::string path = "differentiator.epsilon.schedule";
        reject_unknown_keys(sch, path, {"r0", "p", "t_max", "r_min"});
        s.differentiator.epsilon = GainSchedule{number_at(sch, "r0", path), number_at(sch, "p", path),
                                                number_at(sch, "t_max", path), number_or(sch, "r_min", path, kDefaultRMin)};
    }

    // integrator
    const auto& integ = object_at(doc, "integrator", "");
    reject_unknown_keys(integ, "integrator", {"dt", "t_end", "method"});
    s.integrator.dt = number_or(integ, "dt", "integrator", s.integrator.dt);
    s.integrator.t_end = number_at(integ, "t_end", "integrator");
    const auto step = integ.contains("method") ? string_at(integ, "method", "integrator") : std::string("rk4");
    if (step == "rk4") s.integrator.method = StepMethod::rk4;
    else if (step == "euler") s.integrator.method = StepMethod::euler;
    else throw ConfigError("integrator.method", "must be 'rk4' or 'euler'");

    const auto window = numbers_at(doc, "metrics_window", "");
    if (window.size() != 2) throw ConfigError("metrics_window", "must be [start, end]");
    s.window = {window[0], window[1]};

    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str(), path.parent_path());
}

std::string scenario_to_json(const Scenario& s) {
    json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["name"] = s.name;
    if (!s.description.empty()) doc["description"] = s.description;
    if (!s.figures.empty()) doc["figures"] = s.figures;

    json dif;
    dif["method"] = s.differentiator.method == Method::two_step ? "two_step" : "baseline";
    dif["k"] = std::vector<double>(s.differentiator.k.values().begin(), s.differentiator.k.values().end());
    dif["delta"] = s.differentiator.delta;
    dif["delta_g"] = s.differentiator.delta_g;
    dif["init"] = s.differentiator.init == InitPolicy::zero ? "zero" : "measurement";
    if (const auto* c = std::get_if<ConstantEpsilon>(&s.differentiator.epsilon)) {
        dif["epsilon"] = {{"constant", c->eps}};
    } else {
        const auto& g = std::get<GainSchedule>(s.differentiator.epsilon);
        dif["epsilon"] = {{"schedule", {{"r0", g.r0}, {"p", g.p}, {"t_max", g.t_max}, {"r_min", g.r_min}}}};
    }
    doc["differentiator"] = dif;

    json sig;
    sig["form"] = form_to_json(s.signal.form);
    sig["delay"] = s.signal.delay;
    if (s.signal.noise) {
        sig["noise"] = {{"kind", s.signal.noise->kind == NoiseSpec::Kind::uniform ? "uniform" : "gaussian"},
                        {"scale", s.signal.noise->scale},
                        {"seed", s.signal.noise->seed}};
    }
    doc["signal"] = sig;
    doc["integrator"] = {{"dt", s.integrator.dt},
                         {"t_end", s.integrator.t_end},
                         {"method", s.integrator.method == StepMethod::rk4 ? "rk4" : "euler"}};
    doc["metrics_window"] = {s.window.start, s.window.end};
    return doc.dump(2) + "\n";
}

}  // namespace tsdiff
