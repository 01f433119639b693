// Flat key = value configuration files ('#' starts a comment) and the
// named parameter presets. Command-line flags override config values;
// the merge happens in the CLI layer.

#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "harvester/model.hpp"

namespace harvester {

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        KeyValueConfig cfg;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            const std::size_t eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": expected key = value");
            const std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.empty())
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": empty key");
            cfg.values_[key] = value;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return values_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end())
            throw std::runtime_error("config: missing key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const {
        const std::string s = get_string(key);
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != s.size())
            throw std::runtime_error("config: key '" + key +
                                     "' is not a number: " + s);
        return v;
    }

    long long get_int(const std::string& key) const {
        const std::string s = get_string(key);
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != s.size())
            throw std::runtime_error("config: key '" + key +
                                     "' is not an integer: " + s);
        return v;
    }

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    static std::string trim(const std::string& s) {
        const auto first = s.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) return "";
        const auto last = s.find_last_not_of(" \t\r\n");
        return s.substr(first, last - first + 1);
    }

    std::map<std::string, std::string> values_;
};

/// Named parameter presets. "paper-s3" pins the fixed coefficients of
/// the reference campaign (xi, chi, lambda, kappa, p, delta) and the
/// initial condition (1, 0, 0); excitation and angle stay free.
inline void apply_preset(const std::string& name, HarvesterParams& params,
                         InitialCondition& ic) {
    if (name == "paper-s3") {
        const HarvesterParams base = paper_s3_params();
        params.xi = base.xi;
        params.chi = base.chi;
        params.lambda = base.lambda;
        params.kappa = base.kappa;
        params.p = base.p;
        params.delta = base.delta;
        ic = paper_s3_ic();
        return;
    }
    throw std::runtime_error("unknown preset '" + name +
                             "' (available: paper-s3)");
}

}  // namespace harvester
