#pragma once

// Strict JSON experiment configs:
//   { "experiment": "<name>", "seed": <uint>, "parameters": { ... } }
// Every key must be consumed by the experiment's parser; leftovers, type
// mismatches and out-of-range values raise config_error.

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "driver/artifacts.hpp"
#include "restriction_lab/errors.hpp"

namespace restriction_lab::driver {

using json = nlohmann::json;

struct ExperimentConfig {
    std::string experiment;
    std::optional<std::uint64_t> seed;
    json parameters = json::object();
    std::string hash;  // FNV-1a of the canonical dump
};

inline ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, value] : j.items()) {
        if (key == "experiment") {
            if (!value.is_string()) throw config_error("'experiment' must be a string");
            c.experiment = value.get<std::string>();
        } else if (key == "seed") {
            if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0))
                throw config_error("'seed' must be a non-negative integer");
            c.seed = value.get<std::uint64_t>();
        } else if (key == "parameters") {
            if (!value.is_object()) throw config_error("'parameters' must be an object");
            c.parameters = value;
        } else {
            throw config_error("unknown top-level key '" + key + "'");
        }
    }
    if (c.experiment.empty()) throw config_error("missing 'experiment'");
    c.hash = hex64(fnv1a(j.dump()));
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw config_error("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

/// Typed, consuming view of the "parameters" object. Each getter records
/// the resolved value (default or given) in the echo.
class Params {
public:
    Params(const ExperimentConfig& config) : config_(config), j_(config.parameters) {}

    double number(const std::string& key, double fallback, double lo = -1e300, double hi = 1e300) {
        double v = fallback;
        if (auto* node = take(key)) {
            if (!node->is_number()) throw config_error(key + ": expected a number");
            v = node->get<double>();
        }
        check_range(key, v, lo, hi);
        echo_.emplace_back(key, fmt(v));
        return v;
    }

    long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
        long long v = fallback;
        if (auto* node = take(key)) {
            if (!node->is_number_integer()) throw config_error(key + ": expected an integer");
            v = node->get<long long>();
        }
        check_range(key, double(v), double(lo), double(hi));
        echo_.emplace_back(key, fmt(v));
        return v;
    }

    bool boolean(const std::string& key, bool fallback) {
        bool v = fallback;
        if (auto* node = take(key)) {
            if (!node->is_boolean()) throw config_error(key + ": expected true/false");
            v = node->get<bool>();
        }
        echo_.emplace_back(key, fmt(v));
        return v;
    }

    std::string choice(const std::string& key, const std::string& fallback, const std::set<std::string>& allowed) {
        std::string v = fallback;
        if (auto* node = take(key)) {
            if (!node->is_string()) throw config_error(key + ": expected a string");
            v = node->get<std::string>();
        }
        if (!allowed.count(v)) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            throw config_error(key + ": '" + v + "' is not one of {" + list + "}");
        }
        echo_.emplace_back(key, v);
        return v;
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback, double lo = -1e300,
                                double hi = 1e300) {
        std::vector<double> v = std::move(fallback);
        if (auto* node = take(key)) {
            if (!node->is_array() || node->empty()) throw config_error(key + ": expected a non-empty array");
            v.clear();
            for (const auto& x : *node) {
                if (!x.is_number()) throw config_error(key + ": expected numbers");
                v.push_back(x.get<double>());
            }
        }
        std::string text;
        for (double x : v) {
            check_range(key, x, lo, hi);
            text += (text.empty() ? "" : " ") + fmt(x);
        }
        echo_.emplace_back(key, text);
        return v;
    }

    std::vector<int> integers(const std::string& key, std::vector<int> fallback, int lo, int hi) {
        std::vector<int> v = std::move(fallback);
        if (auto* node = take(key)) {
            if (!node->is_array() || node->empty()) throw config_error(key + ": expected a non-empty array");
            v.clear();
            for (const auto& x : *node) {
                if (!x.is_number_integer()) throw config_error(key + ": expected integers");
                v.push_back(x.get<int>());
            }
        }
        std::string text;
        for (int x : v) {
            check_range(key, x, lo, hi);
            text += (text.empty() ? "" : " ") + fmt(x);
        }
        echo_.emplace_back(key, text);
        return v;
    }

    std::uint64_t seed() {
        if (!config_.seed) throw config_error("experiment '" + config_.experiment + "' is randomized: 'seed' is required");
        return *config_.seed;
    }

    /// Rejects leftover keys; returns the echo (experiment, seed, parameters).
    Echo finish() {
        for (const auto& [key, value] : j_.items())
            if (!used_.count(key))
                throw config_error("unknown parameter '" + key + "' for experiment '" + config_.experiment + "'");
        Echo echo{{"experiment", config_.experiment}};
        echo.emplace_back("seed", config_.seed ? fmt(static_cast<long long>(*config_.seed)) : std::string("none"));
        echo.insert(echo.end(), echo_.begin(), echo_.end());
        return echo;
    }

private:
    const json* take(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    static void check_range(const std::string& key, double v, double lo, double hi) {
        if (!(v >= lo && v <= hi))
            throw config_error(key + ": value " + fmt(v) + " outside [" + fmt(lo) + ", " + fmt(hi) + "]");
    }

    const ExperimentConfig& config_;
    const json& j_;
    std::set<std::string> used_;
    Echo echo_;
};

}  // namespace restriction_lab::driver
