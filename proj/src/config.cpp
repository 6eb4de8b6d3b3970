#include "csum/config.hpp"
#include "csum/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace csum {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace((unsigned char)s[a])) ++a;
    while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad number for " + what + ": '" + s + "'");
    }
}

long parse_long(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad integer for " + what + ": '" + s + "'");
    }
}

std::vector<double> parse_numbers(const std::string& s, const std::string& what) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, what));
    return out;
}

} // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

DistributionSpec parse_distribution(const std::string& text) {
    const std::string s = trim(text);
    const auto open = s.find('(');
    if (open == std::string::npos || s.back() != ')')
        throw ConfigError("bad distribution '" + s + "', expected name(args)");
    const std::string name = trim(s.substr(0, open));
    const std::string argstr = s.substr(open + 1, s.size() - open - 2);
    std::vector<std::string> args;
    std::istringstream in(argstr);
    std::string tok;
    while (std::getline(in, tok, ',')) args.push_back(trim(tok));

    auto need = [&](std::size_t n) {
        if (args.size() != n)
            throw ConfigError("distribution '" + name + "' expects " +
                              std::to_string(n) + " argument(s)");
    };
    DistributionSpec d;
    if (name == "exp") {
        need(1);
        d = Exponential{parse_double(args[0], name)};
    } else if (name == "gamma") {
        need(2);
        d = Gamma{parse_double(args[0], name), parse_double(args[1], name)};
    } else if (name == "uniform") {
        need(2);
        d = Uniform{parse_double(args[0], name), parse_double(args[1], name)};
    } else if (name == "det") {
        need(1);
        d = Deterministic{parse_double(args[0], name)};
    } else {
        throw ConfigError("unknown distribution '" + name + "'");
    }
    try {
        dist_validate(d);
    } catch (const DomainError& e) {
        throw ConfigError(std::string(e.what()) + " in '" + s + "'");
    }
    return d;
}

ParsedConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        if (kv.count(key))
            throw ConfigError("duplicate key '" + key + "'");
        kv[key] = val;
    }

    auto get = [&](const std::string& key) -> std::string {
        const auto it = kv.find(key);
        if (it == kv.end()) throw ConfigError("missing key '" + key + "'");
        return it->second;
    };
    auto take = [&](const std::string& key) {
        const std::string v = get(key);
        kv.erase(key);
        return v;
    };

    ParsedConfig cfg;
    cfg.raw_text = text;
    cfg.hash = fnv1a_hash(text);

    const std::string model = take("model");
    try {
    if (model == "risk") {
        RiskBasis r;
        r.x_dist = parse_distribution(take("X"));
        r.y_dist = parse_distribution(take("Y"));
        r.premium_c = parse_double(take("c"), "c");
        cfg.model = BasisSpec{r};
        basis_validate(std::get<BasisSpec>(cfg.model));
    } else if (model == "direct") {
        DirectBasis d;
        d.t_dist = parse_distribution(take("T"));
        d.x_dist = parse_distribution(take("X"));
        if (kv.count("first")) {
            const std::string f = take("first");
            if (f == "ordinary") d.first_interval = Ordinary{};
            else if (f == "equilibrium") d.first_interval = Equilibrium{};
            else if (f.rfind("modified", 0) == 0)
                d.first_interval = Modified{parse_distribution(trim(f.substr(8)))};
            else throw ConfigError("bad first-interval mode '" + f + "'");
        }
        cfg.model = BasisSpec{d};
        basis_validate(std::get<BasisSpec>(cfg.model));
    } else if (model == "modular") {
        MarkovModulatedBasis m;
        m.n_states = (int)parse_long(take("states"), "states");
        if (m.n_states < 1 || m.n_states > 64)
            throw ConfigError("states must be in [1, 64]");
        m.initial_state = (int)parse_long(take("initial"), "initial");
        m.reference_state = (int)parse_long(take("reference"), "reference");
        const int n = m.n_states;
        m.transition.assign((std::size_t)n * n, 0.0);
        m.t_dists.assign((std::size_t)n * n, Exponential{1.0});
        m.x_dists.assign((std::size_t)n * n, Exponential{1.0});
        for (int i = 0; i < n; ++i) {
            const auto row = parse_numbers(take("P[" + std::to_string(i) + "]"), "P row");
            if ((int)row.size() != n)
                throw ConfigError("P[" + std::to_string(i) + "] needs " +
                                  std::to_string(n) + " entries");
            for (int j = 0; j < n; ++j) m.transition[(std::size_t)i * n + j] = row[j];
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const std::string sfx = "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
                m.t_dists[(std::size_t)i * n + j] = parse_distribution(take("T" + sfx));
                m.x_dists[(std::size_t)i * n + j] = parse_distribution(take("X" + sfx));
            }
        modulated_validate(m);
        cfg.model = m;
    } else {
        throw ConfigError("unknown model '" + model + "' (risk | direct | modular)");
    }
    } catch (const ModelError& e) { // surface structural problems as config errors
        throw ConfigError(e.what());
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    if (!kv.empty())
        throw ConfigError("unrecognized key '" + kv.begin()->first + "'");
    return cfg;
}

ParsedConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str());
}

const BasisSpec& config_basis(const ParsedConfig& cfg) {
    const auto* b = std::get_if<BasisSpec>(&cfg.model);
    if (!b) throw ConfigError("this command needs a risk or direct model config");
    return *b;
}

const MarkovModulatedBasis& config_modulated(const ParsedConfig& cfg) {
    const auto* m = std::get_if<MarkovModulatedBasis>(&cfg.model);
    if (!m) throw ConfigError("this command needs a modular model config");
    return *m;
}

} // namespace csum
