#include "rtp/scenario.hpp"
#include "rtp/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace rtp {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s{
        {"scenario", {"name", "units"}},
        {"supplier", {"p", "q", "scale_houses", "scale_share", "scale_population"}},
        {"demand",
         {"model", "D", "epsilon", "lambda_star", "count", "seed", "csv", "units", "D_mean", "D_sd", "eps_mean",
          "eps_sd"}},
        {"baseline", {"constant", "trace", "per_house_scale", "houses", "synthetic_lo", "synthetic_hi", "units"}},
        {"controller", {"mode", "eta", "lambda_o", "lambda_min", "lambda_max", "w_slope_error"}},
        {"attack", {"kind", "rho", "gamma", "tau", "start", "groups"}},
        {"simulation", {"T", "horizon", "seed", "lambda0", "feeder_rating", "mean_h_window"}},
        {"output", {"dir"}},
        {"sweep", {"axes"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

void check_key(const std::string& section, const std::string& key) {
    auto it = schema().find(section);
    if (it == schema().end()) throw config_error("unknown section [" + section + "]");
    if (!it->second.count(key)) throw config_error("unknown key '" + key + "' in [" + section + "]");
}

class Reader {
public:
    explicit Reader(const ConfigTable& t) : t_(t) {}

    bool has(const std::string& s, const std::string& k) const {
        auto it = t_.find(s);
        return it != t_.end() && it->second.count(k);
    }
    std::string str(const std::string& s, const std::string& k, const std::string& def = "") const {
        return has(s, k) ? t_.at(s).at(k) : def;
    }
    double num(const std::string& s, const std::string& k, double def) const {
        return has(s, k) ? parse(s, k) : def;
    }
    double num(const std::string& s, const std::string& k) const {
        if (!has(s, k)) throw config_error("missing required key '" + k + "' in [" + s + "]");
        return parse(s, k);
    }
    long integer(const std::string& s, const std::string& k, long def) const {
        if (!has(s, k)) return def;
        double v = parse(s, k);
        if (v != std::floor(v)) throw config_error("[" + s + "] " + k + " must be an integer");
        return static_cast<long>(v);
    }

private:
    double parse(const std::string& s, const std::string& k) const {
        const std::string& v = t_.at(s).at(k);
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (trim(v.substr(used)).empty() && std::isfinite(d)) return d;
        } catch (const std::exception&) {
        }
        throw config_error("[" + s + "] " + k + ": not a number: '" + v + "'");
    }
    const ConfigTable& t_;
};

double unit_factor(const std::string& u) {
    if (u == "MW") return 1.0;
    if (u == "kW") return 1e-3;
    throw config_error("unknown unit '" + u + "' (use MW or kW)");
}

std::string resolve(const std::string& path, const std::string& base_dir) {
    std::filesystem::path p(path);
    if (p.is_absolute()) return path;
    return (std::filesystem::path(base_dir) / p).string();
}

std::vector<AttackGroup> parse_groups(const std::string& text) {
    std::vector<AttackGroup> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        std::vector<std::string> f;
        std::istringstream fi(item);
        std::string x;
        while (std::getline(fi, x, ':')) f.push_back(trim(x));
        if (f.size() != 4) throw config_error("attack group '" + item + "': expected kind:rho:gamma:tau");
        try {
            out.push_back({parse_attack_kind(f[0]), std::stod(f[1]), std::stod(f[2]), std::stoi(f[3])});
        } catch (const config_error&) {
            throw;
        } catch (const std::exception&) {
            throw config_error("attack group '" + item + "': bad number");
        }
    }
    return out;
}

}  // namespace

ConfigTable parse_ini(const std::string& text) {
    ConfigTable t;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find_first_of("#;");
        // ';' also separates attack groups, so only a leading one is a comment.
        if (hash != std::string::npos && (line[hash] == '#' || trim(line.substr(0, hash)).empty()))
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw config_error("line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section)) throw config_error("unknown section [" + section + "]");
            t[section];
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw config_error("line " + std::to_string(lineno) + ": key outside a section");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        check_key(section, key);
        t[section][key] = value;
    }
    return t;
}

ConfigTable parse_json_config(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("JSON: top level must be an object");
    ConfigTable t;
    for (auto& [section, body] : j.items()) {
        if (!schema().count(section)) throw config_error("unknown section [" + section + "]");
        if (!body.is_object()) throw config_error("JSON: section " + section + " must be an object");
        t[section];
        for (auto& [key, v] : body.items()) {
            check_key(section, key);
            if (v.is_string()) t[section][key] = v.get<std::string>();
            else if (v.is_number()) t[section][key] = v.dump();  // shortest round-trip text
            else if (v.is_boolean()) t[section][key] = v.get<bool>() ? "true" : "false";
            else throw config_error("JSON: " + section + "." + key + " must be a string or number");
        }
    }
    return t;
}

std::string to_ini(const ConfigTable& t) {
    std::ostringstream os;
    for (const auto& [section, kv] : t) {
        os << "[" << section << "]\n";
        for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
        os << "\n";
    }
    return os.str();
}

ConfigTable read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return parse_json_config(text);
    return parse_ini(text);
}

void set_config_value(ConfigTable& t, const std::string& dotted, const std::string& value) {
    auto dot = dotted.find('.');
    if (dot == std::string::npos) throw config_error("expected section.key, got '" + dotted + "'");
    const std::string s = dotted.substr(0, dot), k = dotted.substr(dot + 1);
    check_key(s, k);
    t[s][k] = value;
}

Scenario build_scenario(const ConfigTable& t, const std::string& base_dir) {
    for (const auto& [s, kv] : t)
        for (const auto& [k, v] : kv) check_key(s, k);
    Reader r(t);
    Scenario sc;
    sc.name = r.str("scenario", "name", "scenario");
    sc.units = r.str("scenario", "units", "MW");
    const double sys = unit_factor(sc.units);
    SimConfig& c = sc.sim;

    c.T = r.num("simulation", "T", 0.5);
    c.horizon = r.integer("simulation", "horizon", 1056);
    c.seed = static_cast<std::uint64_t>(r.integer("simulation", "seed", 1));
    c.mean_h_window = r.integer("simulation", "mean_h_window", 0);

    c.supplier = {r.num("supplier", "p"), r.num("supplier", "q")};
    if (r.has("supplier", "scale_houses") || r.has("supplier", "scale_share") || r.has("supplier", "scale_population"))
        c.supplier = scale_supply(c.supplier, r.num("supplier", "scale_houses"), r.num("supplier", "scale_share"),
                                  r.num("supplier", "scale_population"));

    // Baseline.
    const double b_factor = unit_factor(r.str("baseline", "units", sc.units)) / sys;
    const int b_sources = r.has("baseline", "constant") + r.has("baseline", "trace") + r.has("baseline", "synthetic_lo");
    if (b_sources > 1) throw config_error("[baseline] give exactly one of constant, trace, synthetic_lo/hi");
    if (r.has("baseline", "trace")) {
        const std::string path = resolve(r.str("baseline", "trace"), base_dir);
        if (!std::filesystem::exists(path)) throw config_error("baseline trace not found: " + path);
        LoadedBaseline lb;
        try {
            lb = load_baseline_trace(path, r.num("baseline", "per_house_scale", 1.0), r.num("baseline", "houses", 1.0), c.T);
        } catch (const ingestion_error& e) {
            throw config_error(e.what());
        }
        for (double& v : lb.trace.values) v *= b_factor;
        c.baseline = std::move(lb.trace);
    } else if (r.has("baseline", "synthetic_lo")) {
        BaselineTrace tr = synthetic_baseline(c.horizon, c.T, r.num("baseline", "synthetic_lo"),
                                              r.num("baseline", "synthetic_hi"), r.num("baseline", "houses", 1.0));
        for (double& v : tr.values) v *= b_factor;
        c.baseline = std::move(tr);
    } else {
        c.baseline_constant = r.num("baseline", "constant", 0.0) * b_factor;
    }

    // Demand.
    const std::string model = r.str("demand", "model", "aggregate");
    const double d_factor = unit_factor(r.str("demand", "units", sc.units)) / sys;
    if (model == "aggregate") {
        c.demand.epsilon = r.num("demand", "epsilon");
        if (r.has("demand", "D") == r.has("demand", "lambda_star"))
            throw config_error("[demand] aggregate model needs exactly one of D or lambda_star");
        if (r.has("demand", "D")) {
            c.demand.D = r.num("demand", "D") * d_factor;
        } else {
            try {
                c.demand.D = calibrate_D(c.supplier, c.baseline_at(0), r.num("demand", "lambda_star"), c.demand.epsilon);
            } catch (const calibration_error& e) {
                throw config_error(e.what());
            }
        }
    } else if (model == "population") {
        ConsumerPopulation pop;
        if (r.has("demand", "csv")) {
            const std::string path = resolve(r.str("demand", "csv"), base_dir);
            try {
                pop = read_population_csv(path);
            } catch (const ingestion_error& e) {
                throw config_error(e.what());
            }
        } else {
            PopulationSampling dist;
            dist.D_mean = r.num("demand", "D_mean", dist.D_mean);
            dist.D_sd = r.num("demand", "D_sd", dist.D_sd);
            dist.eps_mean = r.num("demand", "eps_mean", dist.eps_mean);
            dist.eps_sd = r.num("demand", "eps_sd", dist.eps_sd);
            const long n = r.integer("demand", "count", 1405);
            if (n < 1) throw config_error("[demand] count must be positive");
            pop = sample_population(static_cast<std::size_t>(n),
                                    static_cast<std::uint64_t>(r.integer("demand", "seed", static_cast<long>(c.seed))),
                                    dist);
        }
        for (auto& m : pop.consumers) m.D *= d_factor;
        c.population = std::move(pop);
    } else {
        throw config_error("[demand] model must be aggregate or population");
    }

    // Controller.
    c.controller.mode = parse_controller_mode(r.str("controller", "mode", "adaptive"));
    c.controller.eta = r.num("controller", "eta", 0.5);
    c.controller.lambda_min = r.num("controller", "lambda_min", 1.0);
    c.controller.lambda_max = r.num("controller", "lambda_max", 200.0);
    c.controller.lambda_o = r.num("controller", "lambda_o", 20.0);
    c.controller.w_slope_error = r.num("controller", "w_slope_error", 0.0);

    // Attack.
    AttackSpec& a = c.attack;
    a.kind = parse_attack_kind(r.str("attack", "kind", "none"));
    a.rho = r.num("attack", "rho", 1.0);
    a.gamma = r.num("attack", "gamma", 1.0);
    a.tau = static_cast<int>(r.integer("attack", "tau", 1));
    const std::string start = r.str("attack", "start", "auto");
    a.start_k = start == "auto" ? kAttackAfterConvergence : r.integer("attack", "start", 0);
    if (a.start_k < 0 && start != "auto") throw config_error("[attack] start must be >= 0 or auto");
    if (r.has("attack", "groups")) a.groups = parse_groups(r.str("attack", "groups"));

    c.lambda0 = r.num("simulation", "lambda0", 20.0);
    const std::string rating = r.str("simulation", "feeder_rating", "none");
    if (rating == "auto") sc.rating_auto = true;
    else if (rating != "none") c.feeder_rating = r.num("simulation", "feeder_rating");

    sc.out_dir = r.str("output", "dir", "");
    if (r.has("sweep", "axes")) {
        std::string axes = r.str("sweep", "axes");
        std::size_t pos = 0;
        while (pos <= axes.size()) {
            auto bar = axes.find('|', pos);
            std::string ax = trim(axes.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos));
            if (!ax.empty()) sc.sweep_axes.push_back(ax);
            if (bar == std::string::npos) break;
            pos = bar + 1;
        }
    }

    try {
        c.validate();
    } catch (const domain_error& e) {
        throw config_error(e.what());
    }
    return sc;
}

Scenario load_scenario(const std::string& path_or_preset) {
    if (is_preset(path_or_preset)) return build_scenario(parse_ini(preset_text(path_or_preset)), ".");
    const auto dir = std::filesystem::path(path_or_preset).parent_path().string();
    return build_scenario(read_config_file(path_or_preset), dir.empty() ? "." : dir);
}

}  // namespace rtp
