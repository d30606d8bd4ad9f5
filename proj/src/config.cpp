#include "netmom/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "netmom/errors.hpp"

namespace netmom {

using nlohmann::json;

ModelSpec parse_model(const std::string& name, int delta_single,
                      const std::vector<int>& delta_grid, int descriptor_len) {
    ModelSpec m;
    m.name = name;
    m.delta_single = delta_single;
    m.delta_grid = delta_grid;
    m.descriptor_len = descriptor_len;
    if (name == "MACD") {
        m.is_baseline = true;
        return m;
    }
    std::string rest = name;
    if (rest.rfind("NMM-", 0) != 0)
        throw ConfigError("unknown model name '" + name + "'");
    rest = rest.substr(4);
    if (rest.size() > 2 && rest.compare(rest.size() - 2, 2, "-E") == 0) {
        m.ensemble = true;
        rest = rest.substr(0, rest.size() - 2);
    }
    m.method = parse_leadlag_method(rest);
    return m;
}

namespace {

[[noreturn]] void missing(const std::string& field) {
    throw ConfigError("missing config field '" + field + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    try {
        return it->get<T>();
    } catch (const std::exception&) {
        throw ConfigError("config field '" + key + "' has the wrong type");
    }
}

}  // namespace

uint64_t file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return h;
}

std::string checksum_hex(uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.source_path = path;
    cfg.config_checksum = file_checksum(path);
    const std::string base = std::filesystem::path(path).parent_path().string();
    auto resolve = [&](const std::string& p) {
        if (p.empty()) return p;
        std::filesystem::path fp(p);
        return fp.is_relative() ? (std::filesystem::path(base) / fp).string() : p;
    };

    if (j.contains("panel")) {
        const json& pj = j["panel"];
        for (const auto& f : get_or(pj, "prices", std::vector<std::string>{}))
            cfg.price_files.push_back(resolve(f));
        cfg.contract_file = resolve(get_or(pj, "contracts", std::string{}));
        cfg.cache_path = resolve(get_or(pj, "cache", std::string{}));
        const std::string al = get_or(pj, "alignment", std::string("intersection"));
        if (al == "intersection")
            cfg.alignment = Alignment::Intersection;
        else if (al == "union_ffill")
            cfg.alignment = Alignment::UnionFfill;
        else
            throw ConfigError("panel.alignment must be 'intersection' or 'union_ffill'");
    }

    if (j.contains("portfolio")) {
        const json& pj = j["portfolio"];
        cfg.portfolio.speeds = get_or(pj, "speeds", cfg.portfolio.speeds);
        cfg.portfolio.slow_ratio = get_or(pj, "slow_ratio", cfg.portfolio.slow_ratio);
        cfg.portfolio.lambda = get_or(pj, "lambda", cfg.portfolio.lambda);
        cfg.portfolio.sigma_target =
            get_or(pj, "sigma_target", cfg.portfolio.sigma_target);
        cfg.portfolio.gamma = get_or(pj, "gamma", cfg.portfolio.gamma);
        if (cfg.portfolio.speeds.empty())
            throw ConfigError("portfolio.speeds must be non-empty");
        if (!(cfg.portfolio.gamma > 0)) throw ConfigError("portfolio.gamma must be > 0");
    }

    if (j.contains("network")) {
        const json& nj = j["network"];
        cfg.network.alpha = get_or(nj, "alpha", cfg.network.alpha);
        cfg.network.beta = get_or(nj, "beta", cfg.network.beta);
        cfg.network.max_iters = get_or(nj, "max_iters", cfg.network.max_iters);
        cfg.network.tol = get_or(nj, "tol", cfg.network.tol);
        cfg.network.validate();
    }

    if (j.contains("leadlag")) {
        const json& lj = j["leadlag"];
        cfg.delta_single = get_or(lj, "delta", cfg.delta_single);
        cfg.delta_grid = get_or(lj, "delta_grid", cfg.delta_grid);
        cfg.descriptor_len = get_or(lj, "descriptor_length", cfg.descriptor_len);
        if (cfg.delta_single < 2 || cfg.delta_grid.empty())
            throw ConfigError("leadlag.delta settings are invalid");
    }

    cfg.zoo = get_or(j, "zoo", cfg.zoo);
    cfg.model = get_or(j, "model", cfg.model);

    if (j.contains("windows")) {
        const json& wj = j["windows"];
        if (wj.contains("in_sample")) {
            const json& w = wj["in_sample"];
            if (!w.is_array() || w.size() != 2)
                throw ConfigError("windows.in_sample must be [start, end]");
            cfg.in_sample_start = parse_date(w[0].get<std::string>());
            cfg.in_sample_end = parse_date(w[1].get<std::string>());
        }
        if (wj.contains("out_of_sample")) {
            const json& w = wj["out_of_sample"];
            if (!w.is_array() || w.size() != 2)
                throw ConfigError("windows.out_of_sample must be [start, end]");
            cfg.out_of_sample_start = parse_date(w[0].get<std::string>());
            cfg.out_of_sample_end = parse_date(w[1].get<std::string>());
        }
    }
    cfg.eval_start_offset = get_or(j, "eval_start_offset", cfg.eval_start_offset);

    if (j.contains("bootstrap")) {
        const json& bj = j["bootstrap"];
        cfg.bootstrap.n_resamples =
            get_or(bj, "n_resamples", cfg.bootstrap.n_resamples);
        cfg.bootstrap.expected_block_length =
            get_or(bj, "expected_block_length", cfg.bootstrap.expected_block_length);
        cfg.bootstrap.seed = get_or(bj, "seed", cfg.bootstrap.seed);
        cfg.bootstrap.resample_length =
            get_or(bj, "resample_length", cfg.bootstrap.resample_length);
        cfg.bootstrap.validate();
    }

    if (j.contains("grid")) {
        const json& gj = j["grid"];
        cfg.alpha_grid = get_or(gj, "alpha", cfg.alpha_grid);
        cfg.beta_grid = get_or(gj, "beta", cfg.beta_grid);
        if (cfg.alpha_grid.empty() || cfg.beta_grid.empty())
            throw ConfigError("grid.alpha and grid.beta must be non-empty");
    }

    if (j.contains("dumps")) {
        const json& dj = j["dumps"];
        cfg.dump_leadlag = get_or(dj, "leadlag", false);
        cfg.dump_network = get_or(dj, "network", false);
        cfg.dump_signals = get_or(dj, "signals", false);
    }

    cfg.output_dir = resolve(get_or(j, "output", std::string(".")));

    // Every model name must parse.
    for (const auto& name : cfg.zoo)
        parse_model(name, cfg.delta_single, cfg.delta_grid, cfg.descriptor_len);
    if (!cfg.model.empty())
        parse_model(cfg.model, cfg.delta_single, cfg.delta_grid, cfg.descriptor_len);
    return cfg;
}

PricePanel resolve_panel(const ExperimentConfig& cfg) {
    if (!cfg.cache_path.empty() && std::filesystem::exists(cfg.cache_path))
        return load_panel_cache(cfg.cache_path);
    if (cfg.price_files.empty() || cfg.contract_file.empty())
        missing("panel.prices");
    return load_panel(cfg.price_files, cfg.contract_file, cfg.alignment);
}

}  // namespace netmom
