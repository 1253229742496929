#include "config.hpp"

#include "lwi/errors.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lwi::cli {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_num(const std::string& key, const std::string& value) {
    T out{};
    if constexpr (std::is_floating_point_v<T>) {
        try {
            size_t pos = 0;
            out = static_cast<T>(std::stod(value, &pos));
            if (pos != value.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ConfigError("config: bad number for " + key + ": '" + value + "'");
        }
    } else {
        auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || p != value.data() + value.size())
            throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : split_list(value)) out.push_back(parse_num<int>(key, item));
    return out;
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string full = section + "." + key;

    if (section == "run") {
        if (key == "out_dir") cfg.out_dir = value;
        else if (key == "seed") cfg.seed = parse_num<uint64_t>(full, value);
        else if (key == "jobs") cfg.jobs = parse_num<int>(full, value);
        else if (key == "grid_ms") cfg.grid_ms = parse_num<int64_t>(full, value);
        else if (key == "session_start_ns") cfg.session_start_ns = parse_num<int64_t>(full, value);
        else if (key == "session_end_ns") cfg.session_end_ns = parse_num<int64_t>(full, value);
        else if (key == "warm_bins") cfg.warm_bins = parse_num<size_t>(full, value);
        else if (key == "epsilon") cfg.epsilon = parse_num<double>(full, value);
        else if (key == "lwi_ma_bins") cfg.lwi_ma_bins = parse_num<int>(full, value);
        else throw ConfigError("config: unknown key " + full);
        return;
    }
    if (section == "symbols") {
        cfg.symbols.emplace_back(key, value);
        return;
    }
    if (section == "features") {
        if (key == "set") {
            cfg.feature_set.clear();
            for (const auto& name : split_list(value)) {
                if (name == "consensus") {
                    const auto defaults = FeatureSpec::consensus_default().features;
                    cfg.feature_set.insert(cfg.feature_set.end(), defaults.begin(),
                                           defaults.end());
                } else {
                    cfg.feature_set.push_back(name);
                }
            }
        } else if (key == "horizons") {
            cfg.horizons = parse_int_list(full, value);
        } else {
            throw ConfigError("config: unknown key " + full);
        }
        return;
    }
    if (section == "models") {
        if (key == "models") cfg.model_names = split_list(value);
        else if (key == "ar_order") cfg.ar_order = parse_num<int>(full, value);
        else if (key == "har_windows") cfg.har_windows = parse_int_list(full, value);
        else if (key == "gbt_trees") cfg.gbt.n_trees = parse_num<int>(full, value);
        else if (key == "gbt_depth") cfg.gbt.max_depth = parse_num<int>(full, value);
        else if (key == "gbt_learning_rate") cfg.gbt.learning_rate = parse_num<double>(full, value);
        else if (key == "gbt_subsample") cfg.gbt.subsample = parse_num<double>(full, value);
        else if (key == "gbt_min_leaf") cfg.gbt.min_leaf = parse_num<int>(full, value);
        else if (key == "gbt_bins") cfg.gbt.histogram_bins = parse_num<int>(full, value);
        else if (key == "gbt_loss") {
            const std::string v = value;
            if (v == "squared") {
                cfg.gbt.loss = GbtLoss::SquaredError;
            } else if (v.rfind("huber:", 0) == 0) {
                cfg.gbt.loss = GbtLoss::Huber;
                cfg.gbt.huber_delta = parse_num<double>(full, v.substr(6));
            } else if (v.rfind("quantile:", 0) == 0) {
                cfg.gbt.loss = GbtLoss::Quantile;
                cfg.gbt.quantile_tau = parse_num<double>(full, v.substr(9));
            } else {
                throw ConfigError("config: gbt_loss must be squared, huber:<delta> or "
                                  "quantile:<tau>, got '" + v + "'");
            }
        } else {
            throw ConfigError("config: unknown key " + full);
        }
        return;
    }
    if (section == "plan") {
        if (key == "folds") cfg.plan.n_folds = parse_num<int>(full, value);
        else if (key == "embargo_bins") cfg.plan.embargo_bins = parse_num<size_t>(full, value);
        else if (key == "initial_train_frac")
            cfg.plan.initial_train_frac = parse_num<double>(full, value);
        else throw ConfigError("config: unknown key " + full);
        return;
    }
    if (section == "screen") {
        if (key == "horizon") cfg.screen_horizon = parse_num<int>(full, value);
        else if (key == "top_k") cfg.screen_top_k = parse_num<int>(full, value);
        else if (key == "mi_bins") cfg.screen_mi_bins = parse_num<int>(full, value);
        else if (key == "consensus_threshold")
            cfg.consensus_threshold = parse_num<double>(full, value);
        else throw ConfigError("config: unknown key " + full);
        return;
    }
    if (section == "diag") {
        if (key == "max_lags") cfg.diag_max_lags = parse_num<int>(full, value);
        else if (key == "acf_lags") cfg.diag_acf_lags = parse_num<int>(full, value);
        else throw ConfigError("config: unknown key " + full);
        return;
    }
    if (section == "synth") {
        if (key == "duration_s") cfg.synth_duration_s = parse_num<double>(full, value);
        else if (key == "add_rate") cfg.synth.add_rate = parse_num<double>(full, value);
        else if (key == "cancel_rate") cfg.synth.cancel_rate = parse_num<double>(full, value);
        else if (key == "fill_rate") cfg.synth.fill_rate = parse_num<double>(full, value);
        else if (key == "modify_rate") cfg.synth.modify_rate = parse_num<double>(full, value);
        else if (key == "burst_multiplier")
            cfg.synth.burst_multiplier = parse_num<double>(full, value);
        else if (key == "burst_rate") cfg.synth.burst_rate = parse_num<double>(full, value);
        else if (key == "burst_duration_s")
            cfg.synth.burst_duration_s = parse_num<double>(full, value);
        else if (key == "withdrawal_rate")
            cfg.synth.withdrawal_rate = parse_num<double>(full, value);
        else if (key == "withdrawal_duration_s")
            cfg.synth.withdrawal_duration_s = parse_num<double>(full, value);
        else if (key == "initial_mid") cfg.synth.initial_mid = parse_num<int64_t>(full, value);
        else if (key == "tick") cfg.synth.tick = parse_num<int64_t>(full, value);
        else if (key == "live_target") cfg.synth.live_target = parse_num<uint32_t>(full, value);
        else if (key == "size_log_mean") cfg.synth.size_log_mean = parse_num<double>(full, value);
        else if (key == "size_log_sd") cfg.synth.size_log_sd = parse_num<double>(full, value);
        else throw ConfigError("config: unknown key " + full);
        return;
    }
    throw ConfigError("config: unknown section [" + section + "]");
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // strip comments
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: bad section header at line " + std::to_string(line_no));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value at line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError("config: key outside any [section] at line " +
                              std::to_string(line_no));
        apply_key(cfg, section, key, value);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void RunConfig::validate_common() const {
    if (grid_ms <= 0) throw ConfigError("config: grid_ms must be > 0");
    if (horizons.empty()) throw ConfigError("config: horizons must be non-empty");
    for (int k : horizons)
        if (k < 1) throw ConfigError("config: horizons must be >= 1");
    if (epsilon <= 0) throw ConfigError("config: epsilon must be > 0");
    if (lwi_ma_bins < 1) throw ConfigError("config: lwi_ma_bins must be >= 1");
    if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
    if (model_names.empty()) throw ConfigError("config: models must be non-empty");
    for (const auto& name : model_names)
        if (name != "ar" && name != "har" && name != "gbt")
            throw ConfigError("config: unknown model '" + name + "' (ar, har, gbt)");
    session().validate();
    synth.validate();
    if (!(consensus_threshold > 0.0) || consensus_threshold > 1.0)
        throw ConfigError("config: consensus_threshold must be in (0, 1]");
    // unknown feature names fail fast, before any output is touched
    const auto& vocab = FeatureSpec::vocabulary();
    for (const auto& name : feature_spec().features)
        if (std::find(vocab.begin(), vocab.end(), name) == vocab.end())
            throw ConfigError("config: unknown feature '" + name + "'");
}

void RunConfig::validate_inputs_readable() const {
    for (const auto& [symbol, path] : effective_symbols()) {
        std::ifstream probe(path, std::ios::binary);
        if (!probe)
            throw ConfigError("config: input for " + symbol + " not readable: " + path);
    }
}

SessionWindow RunConfig::session() const {
    SessionWindow s;
    s.start_ns = session_start_ns;
    s.end_ns = session_end_ns;
    s.bin_ns = grid_ms * 1'000'000;
    return s;
}

FeatureSpec RunConfig::feature_spec() const {
    FeatureSpec spec = FeatureSpec::consensus_default();
    if (!feature_set.empty()) spec.features = feature_set;
    spec.horizons = horizons;
    spec.epsilon = epsilon;
    spec.lwi_ma_bins = lwi_ma_bins;
    return spec;
}

std::vector<ModelSpec> RunConfig::model_specs() const {
    std::vector<ModelSpec> specs;
    for (const auto& name : model_names) {
        if (name == "ar") {
            specs.push_back(ModelSpec::ar(ar_order));
        } else if (name == "har") {
            specs.push_back(ModelSpec::har(har_windows));
        } else if (name == "gbt") {
            ModelSpec spec = ModelSpec::gbt_default();
            spec.gbt = gbt;
            spec.gbt_features = feature_spec().features;
            specs.push_back(std::move(spec));
        }
    }
    return specs;
}

std::vector<std::pair<std::string, std::string>> RunConfig::effective_symbols() const {
    if (!symbols.empty()) return symbols;
    std::vector<std::pair<std::string, std::string>> out;
    for (int i = 1; i <= 4; ++i) {
        const std::string name = "SYN" + std::to_string(i);
        out.emplace_back(name, out_dir + "/" + name + ".csv");
    }
    return out;
}

std::string defaults_text() {
    const RunConfig d;
    std::ostringstream os;
    os << "# lwi run configuration (defaults)\n"
       << "[run]\n"
       << "out_dir = " << d.out_dir << "\n"
       << "seed = " << d.seed << "\n"
       << "jobs = " << d.jobs << "\n"
       << "grid_ms = " << d.grid_ms << "\n"
       << "session_start_ns = " << d.session_start_ns << "\n"
       << "session_end_ns = " << d.session_end_ns << "\n"
       << "warm_bins = " << d.warm_bins << "\n"
       << "epsilon = " << d.epsilon << "\n"
       << "lwi_ma_bins = " << d.lwi_ma_bins << "\n"
       << "\n"
       << "[symbols]\n"
       << "# name = input path (.csv or .mbo); empty means SYN1..SYN4 under out_dir\n"
       << "\n"
       << "[features]\n"
       << "set = consensus\n"
       << "horizons = 1,4,8,20\n"
       << "\n"
       << "[models]\n"
       << "models = ar,har,gbt\n"
       << "ar_order = " << d.ar_order << "\n"
       << "har_windows = 1,8,40\n"
       << "gbt_trees = " << d.gbt.n_trees << "\n"
       << "gbt_depth = " << d.gbt.max_depth << "\n"
       << "gbt_learning_rate = " << d.gbt.learning_rate << "\n"
       << "gbt_subsample = " << d.gbt.subsample << "\n"
       << "gbt_min_leaf = " << d.gbt.min_leaf << "\n"
       << "gbt_bins = " << d.gbt.histogram_bins << "\n"
       << "gbt_loss = squared\n"
       << "\n"
       << "[plan]\n"
       << "folds = " << d.plan.n_folds << "\n"
       << "embargo_bins = " << d.plan.embargo_bins << "\n"
       << "initial_train_frac = " << d.plan.initial_train_frac << "\n"
       << "\n"
       << "[screen]\n"
       << "horizon = " << d.screen_horizon << "\n"
       << "top_k = " << d.screen_top_k << "\n"
       << "mi_bins = " << d.screen_mi_bins << "\n"
       << "consensus_threshold = " << d.consensus_threshold << "\n"
       << "\n"
       << "[diag]\n"
       << "max_lags = " << d.diag_max_lags << "  # 0 = Schwert rule\n"
       << "acf_lags = " << d.diag_acf_lags << "\n"
       << "\n"
       << "[synth]\n"
       << "duration_s = " << d.synth_duration_s << "\n"
       << "add_rate = " << d.synth.add_rate << "\n"
       << "cancel_rate = " << d.synth.cancel_rate << "\n"
       << "fill_rate = " << d.synth.fill_rate << "\n"
       << "modify_rate = " << d.synth.modify_rate << "\n"
       << "burst_multiplier = " << d.synth.burst_multiplier << "\n"
       << "burst_rate = " << d.synth.burst_rate << "\n"
       << "burst_duration_s = " << d.synth.burst_duration_s << "\n"
       << "withdrawal_rate = " << d.synth.withdrawal_rate << "\n"
       << "withdrawal_duration_s = " << d.synth.withdrawal_duration_s << "\n"
       << "initial_mid = " << d.synth.initial_mid << "\n"
       << "tick = " << d.synth.tick << "\n"
       << "live_target = " << d.synth.live_target << "\n"
       << "size_log_mean = " << d.synth.size_log_mean << "\n"
       << "size_log_sd = " << d.synth.size_log_sd << "\n";
    return os.str();
}

} // namespace lwi::cli
