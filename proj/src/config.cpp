// Copyright 2026 The QTS Tomography Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qts/config.hpp"

#include "qts/output.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qts {

namespace pt = boost::property_tree;

std::vector<double> EpsilonRange::points() const {
    std::vector<double> out;
    const auto n = static_cast<long>(std::floor((max - min) / step + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(min + step * static_cast<double>(i));
    return out;
}

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
    std::string s = "invalid configuration:";
    for (const auto& e : errors) s += "\n  " + e;
    return s;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::optional<double> to_double(const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::optional<std::uint64_t> to_unsigned(const std::string& s) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) return std::nullopt;
    return v;
}

// Reads one section, recording problems instead of throwing.
class Section {
public:
    Section(const pt::ptree* tree, std::string name, std::vector<std::string>& errors)
        : tree_(tree), name_(std::move(name)), errors_(errors) {}

    bool has(const std::string& key) const { return tree_ && tree_->find(key) != tree_->not_found(); }

    std::optional<std::string> text(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return trim(tree_->find(key)->second.data());
    }

    std::optional<double> number(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        auto v = to_double(*t);
        if (!v) error(key, "'" + *t + "' is not a finite number");
        return v;
    }

    std::optional<std::uint64_t> count(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        auto v = to_unsigned(*t);
        if (!v) error(key, "'" + *t + "' is not a non-negative integer");
        return v;
    }

    std::optional<bool> flag(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        if (*t == "true" || *t == "1" || *t == "yes") return true;
        if (*t == "false" || *t == "0" || *t == "no") return false;
        error(key, "'" + *t + "' is not a boolean");
        return std::nullopt;
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        auto t = text(key);
        if (!t) return std::nullopt;
        std::vector<double> out;
        for (const auto& item : split(*t, ',')) {
            auto v = to_double(item);
            if (!v) {
                error(key, "'" + item + "' is not a finite number");
                return std::nullopt;
            }
            out.push_back(*v);
        }
        return out;
    }

    void error(const std::string& key, const std::string& what) { errors_.push_back(name_ + "." + key + ": " + what); }

    // Reports keys that are neither listed nor matched by `pattern_ok`.
    template <typename Pred>
    void reject_unknown(const std::set<std::string>& known, Pred pattern_ok) {
        if (!tree_) return;
        for (const auto& [key, value] : *tree_) {
            if (!known.count(key) && !pattern_ok(key)) errors_.push_back(name_ + "." + key + ": unknown key");
        }
    }

    const pt::ptree* tree() const { return tree_; }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::vector<std::string>& errors_;
};

// zz_I_J with 1-based qubit indices.
std::optional<std::pair<std::size_t, std::size_t>> coupling_key(const std::string& key) {
    if (key.rfind("zz_", 0) != 0) return std::nullopt;
    const auto parts = split(std::string_view(key).substr(3), '_');
    if (parts.size() != 2) return std::nullopt;
    const auto i = to_unsigned(parts[0]);
    const auto j = to_unsigned(parts[1]);
    if (!i || !j) return std::nullopt;
    return std::pair{static_cast<std::size_t>(*i), static_cast<std::size_t>(*j)};
}

std::string format_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_number(v[i]);
    return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError({std::string("syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")"});
    }

    std::vector<std::string> errors;
    const std::set<std::string> sections = {"model", "probe", "bath", "experiment", "output"};
    for (const auto& [name, child] : tree) {
        if (!sections.count(name)) {
            errors.push_back(child.empty() ? name + ": key outside any section" : "[" + name + "]: unknown section");
        }
    }
    auto section = [&](const std::string& name) {
        const auto it = tree.find(name);
        return Section(it == tree.not_found() ? nullptr : &it->second, name, errors);
    };

    RunConfig cfg;

    // [model]
    Section model = section("model");
    model.reject_unknown({"kind", "n", "j", "delta", "bias", "tunneling"},
                         [](const std::string& k) { return coupling_key(k).has_value(); });
    cfg.model_kind = model.text("kind").value_or("kink");
    const auto n = model.count("n");
    if (!n) {
        if (!model.has("n")) model.error("n", "required");
    } else if (*n < 1 || *n > kMaxQubits) {
        model.error("n", "must be between 1 and " + std::to_string(kMaxQubits));
    }
    const std::size_t n_qubits = n.value_or(0);
    if (cfg.model_kind == "kink") {
        for (const char* key : {"bias", "tunneling"}) {
            if (model.has(key)) model.error(key, "not allowed for kind = kink");
        }
        if (model.tree()) {
            for (const auto& [key, v] : *model.tree()) {
                if (coupling_key(key)) model.error(key, "not allowed for kind = kink");
            }
        }
        const auto j = model.number("j");
        const auto delta = model.number("delta");
        if (!model.has("j")) model.error("j", "required");
        if (!model.has("delta")) model.error("delta", "required");
        if (j && !(*j > 0.0)) model.error("j", "must be > 0");
        if (delta && *delta < 0.0) model.error("delta", "must be >= 0");
        if (n && *n < 2) model.error("n", "a kink chain needs at least 2 qubits");
        cfg.chain_j = j.value_or(0.0);
        cfg.chain_delta = delta.value_or(0.0);
        if (errors.empty()) cfg.model = build_kink_chain(n_qubits, cfg.chain_j, cfg.chain_delta);
    } else if (cfg.model_kind == "explicit") {
        for (const char* key : {"j", "delta"}) {
            if (model.has(key)) model.error(key, "not allowed for kind = explicit");
        }
        cfg.model.n_qubits = n_qubits;
        cfg.model.bias = model.numbers("bias").value_or(std::vector<double>(n_qubits, 0.0));
        cfg.model.tunneling = model.numbers("tunneling").value_or(std::vector<double>(n_qubits, 0.0));
        if (cfg.model.bias.size() != n_qubits) model.error("bias", "needs exactly n entries");
        if (cfg.model.tunneling.size() != n_qubits) model.error("tunneling", "needs exactly n entries");
        if (model.tree()) {
            for (const auto& [key, v] : *model.tree()) {
                const auto ij = coupling_key(key);
                if (!ij) continue;
                const auto [i, j] = *ij;
                if (!(1 <= i && i < j && j <= n_qubits)) {
                    model.error(key, "needs 1 <= i < j <= n");
                    continue;
                }
                if (auto val = model.number(key)) cfg.model.couplings[{i - 1, j - 1}] = *val;
            }
        }
    } else {
        model.error("kind", "'" + cfg.model_kind + "' is not kink or explicit");
    }

    // [probe]
    Section probe = section("probe");
    probe.reject_unknown({"jp", "delta_p", "epsilon_min", "epsilon_max", "epsilon_step", "levels"},
                         [](const std::string&) { return false; });
    if (auto v = probe.number("jp")) {
        if (!(*v > 0.0)) probe.error("jp", "must be > 0");
        cfg.jp = *v;
    } else if (!probe.has("jp")) {
        probe.error("jp", "required");
    }
    if (auto v = probe.number("delta_p")) {
        if (!(*v > 0.0)) probe.error("delta_p", "must be > 0");
        cfg.delta_p = *v;
    }
    if (auto v = probe.count("levels")) {
        if (*v < 1) probe.error("levels", "must be >= 1");
        cfg.levels = *v;
    }
    const int eps_keys = probe.has("epsilon_min") + probe.has("epsilon_max") + probe.has("epsilon_step");
    if (eps_keys != 0 && eps_keys != 3) {
        probe.error("epsilon_*", "give all of epsilon_min, epsilon_max and epsilon_step, or none for the automatic grid");
    } else if (eps_keys == 3) {
        EpsilonRange r{probe.number("epsilon_min").value_or(0.0), probe.number("epsilon_max").value_or(0.0),
                       probe.number("epsilon_step").value_or(0.0)};
        if (!(r.step > 0.0)) probe.error("epsilon_step", "must be > 0");
        if (!(r.max >= r.min)) probe.error("epsilon_max", "must be >= epsilon_min");
        if (r.step > 0.0 && (r.max - r.min) / r.step > 1e7) probe.error("epsilon_step", "grid has too many points");
        cfg.epsilon = r;
    }

    // [bath]
    Section bath = section("bath");
    bath.reject_unknown({"W_mK", "T_mK", "W_ghz", "eps_p_ghz", "T_ghz", "eta", "omega_c", "rate"},
                        [](const std::string&) { return false; });
    const bool fdt = bath.has("W_mK") || bath.has("T_mK");
    const bool expl = bath.has("W_ghz") || bath.has("eps_p_ghz") || bath.has("T_ghz");
    const double eta = bath.number("eta").value_or(0.0);
    const double omega_c = bath.number("omega_c").value_or(1.0);
    if (eta < 0.0) bath.error("eta", "must be >= 0");
    if (!(omega_c > 0.0)) bath.error("omega_c", "must be > 0");
    if (auto r = bath.text("rate")) {
        if (*r == "marcus") {
            cfg.rate_model = RateModel::Marcus;
        } else if (*r == "lineshape") {
            cfg.rate_model = RateModel::Lineshape;
        } else {
            bath.error("rate", "'" + *r + "' is not marcus or lineshape");
        }
    }
    if (fdt && expl) {
        errors.push_back("bath: mode conflict, W_mK/T_mK (FDT mode) and explicit W_ghz/eps_p_ghz/T_ghz both given");
    } else if (fdt) {
        const auto w = bath.number("W_mK");
        const auto t = bath.number("T_mK");
        if (!bath.has("W_mK")) bath.error("W_mK", "required in FDT mode");
        if (!bath.has("T_mK")) bath.error("T_mK", "required in FDT mode");
        if (w && !(*w > 0.0)) bath.error("W_mK", "must be > 0");
        if (t && !(*t > 0.0)) bath.error("T_mK", "must be > 0");
        if (w && t && *w > 0.0 && *t > 0.0 && eta >= 0.0 && omega_c > 0.0) {
            cfg.width_mk = *w;
            cfg.temperature_mk = *t;
            cfg.bath = BathParams::from_fdt(temperature_to_ghz(*w), temperature_to_ghz(*t), eta, omega_c);
        }
    } else if (expl) {
        const auto w = bath.number("W_ghz");
        const auto e = bath.number("eps_p_ghz");
        const auto t = bath.number("T_ghz");
        for (const char* key : {"W_ghz", "eps_p_ghz", "T_ghz"}) {
            if (!bath.has(key)) bath.error(key, "required in explicit mode");
        }
        if (w && !(*w > 0.0)) bath.error("W_ghz", "must be > 0");
        if (e && *e < 0.0) bath.error("eps_p_ghz", "must be >= 0");
        if (t && !(*t > 0.0)) bath.error("T_ghz", "must be > 0");
        if (w && e && t && *w > 0.0 && *e >= 0.0 && *t > 0.0 && eta >= 0.0 && omega_c > 0.0) {
            cfg.bath = BathParams::explicit_values(*w, *e, *t, eta, omega_c);
        }
    } else {
        errors.push_back("bath: give either W_mK and T_mK (FDT mode) or W_ghz, eps_p_ghz and T_ghz");
    }

    // [experiment]
    Section exp = section("experiment");
    exp.reject_unknown({"positions", "k", "seed", "tol", "dense_limit", "peaks", "evolve_epsilon", "evolve_position",
                        "t_max", "t_points"},
                       [](const std::string&) { return false; });
    if (auto t = exp.text("positions"); t && *t != "all") {
        for (const auto& item : split(*t, ',')) {
            const auto v = to_unsigned(item);
            if (!v || *v < 1 || (n_qubits > 0 && *v > n_qubits + 1)) {
                exp.error("positions", "'" + item + "' is not a kink position in 1..n+1");
            } else {
                cfg.positions.push_back(*v);
            }
        }
        std::sort(cfg.positions.begin(), cfg.positions.end());
        if (std::adjacent_find(cfg.positions.begin(), cfg.positions.end()) != cfg.positions.end()) {
            exp.error("positions", "duplicate entries");
        }
    }
    if (auto v = exp.count("k")) cfg.k = static_cast<Eigen::Index>(*v);
    if (auto v = exp.count("seed")) cfg.seed = *v;
    if (auto v = exp.number("tol")) {
        if (!(*v > 0.0)) exp.error("tol", "must be > 0");
        cfg.tol = *v;
    }
    if (auto v = exp.count("dense_limit")) {
        if (*v > kMaxDenseQubits) exp.error("dense_limit", "must be <= " + std::to_string(kMaxDenseQubits));
        cfg.dense_limit = *v;
    }
    if (auto v = exp.flag("peaks")) cfg.peaks = *v;
    if (auto v = exp.number("evolve_epsilon")) cfg.evolve_epsilon = *v;
    if (auto v = exp.count("evolve_position")) {
        if (*v < 1 || (n_qubits > 0 && *v > n_qubits + 1)) exp.error("evolve_position", "outside 1..n+1");
        cfg.evolve_position = *v;
    }
    if (auto v = exp.number("t_max")) {
        if (!(*v > 0.0)) exp.error("t_max", "must be > 0");
        cfg.t_max = *v;
    }
    if (auto v = exp.count("t_points")) {
        if (*v < 2) exp.error("t_points", "must be >= 2");
        cfg.t_points = *v;
    }

    // [output]
    Section out = section("output");
    out.reject_unknown({"dir", "format", "normalize"}, [](const std::string&) { return false; });
    if (auto v = out.text("dir")) cfg.out_dir = *v;
    if (auto v = out.text("format")) {
        if (*v == "table") {
            cfg.format = OutputFormat::Table;
        } else if (*v == "tree") {
            cfg.format = OutputFormat::Tree;
        } else {
            out.error("format", "'" + *v + "' is not table or tree");
        }
    }
    if (auto v = out.flag("normalize")) cfg.normalize = *v;

    // Cross-section invariants.
    if (cfg.epsilon && cfg.peaks && cfg.bath.width > 0.0 && cfg.epsilon->step > cfg.bath.width / 4.0) {
        errors.push_back("probe.epsilon_step: " + format_number(cfg.epsilon->step) +
                         " GHz exceeds W/4 = " + format_number(cfg.bath.width / 4.0) +
                         " GHz while peak extraction is requested");
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    try {
        cfg.model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError({std::string("model: ") + e.what()});
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot read " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::vector<std::string> RunConfig::resolved() const {
    std::vector<std::string> out;
    out.push_back("[model]");
    out.push_back("kind = " + model_kind);
    out.push_back("n = " + std::to_string(model.n_qubits));
    if (model_kind == "kink") {
        out.push_back("j = " + format_number(chain_j));
        out.push_back("delta = " + format_number(chain_delta));
    } else {
        out.push_back("bias = " + format_list(model.bias));
        out.push_back("tunneling = " + format_list(model.tunneling));
        for (const auto& [ij, v] : model.couplings) {
            out.push_back("zz_" + std::to_string(ij.first + 1) + "_" + std::to_string(ij.second + 1) + " = " +
                          format_number(v));
        }
    }
    out.push_back("[probe]");
    out.push_back("jp = " + format_number(jp));
    out.push_back("delta_p = " + format_number(delta_p));
    if (epsilon) {
        out.push_back("epsilon_min = " + format_number(epsilon->min));
        out.push_back("epsilon_max = " + format_number(epsilon->max));
        out.push_back("epsilon_step = " + format_number(epsilon->step));
    } else {
        out.push_back("epsilon = auto");
    }
    out.push_back("levels = " + std::to_string(levels));
    out.push_back("[bath]");
    if (bath.mode == BathMode::Fdt) {
        out.push_back("mode = fdt");
        out.push_back("W_mK = " + format_number(width_mk));
        out.push_back("T_mK = " + format_number(temperature_mk));
    } else {
        out.push_back("mode = explicit");
    }
    out.push_back("W_ghz = " + format_number(bath.width));
    out.push_back("eps_p_ghz = " + format_number(bath.reorganization));
    out.push_back("T_ghz = " + format_number(bath.temperature));
    out.push_back("eta = " + format_number(bath.eta));
    out.push_back("omega_c = " + format_number(bath.cutoff));
    out.push_back(std::string("rate = ") + (rate_model == RateModel::Marcus ? "marcus" : "lineshape"));
    out.push_back("[experiment]");
    if (positions.empty()) {
        out.push_back("positions = all");
    } else {
        std::string s;
        for (std::size_t i = 0; i < positions.size(); ++i) s += (i ? ", " : "") + std::to_string(positions[i]);
        out.push_back("positions = " + s);
    }
    out.push_back("k = " + std::to_string(k));
    out.push_back("seed = " + std::to_string(seed));
    out.push_back("tol = " + format_number(tol));
    out.push_back("dense_limit = " + std::to_string(dense_limit));
    out.push_back(std::string("peaks = ") + (peaks ? "true" : "false"));
    out.push_back("evolve_epsilon = " + (evolve_epsilon ? format_number(*evolve_epsilon) : std::string("peak")));
    out.push_back("evolve_position = " + std::to_string(evolve_position));
    out.push_back("t_max = " + (t_max ? format_number(*t_max) : std::string("auto")));
    out.push_back("t_points = " + std::to_string(t_points));
    out.push_back("[output]");
    out.push_back(std::string("format = ") + (format == OutputFormat::Table ? "table" : "tree"));
    out.push_back(std::string("normalize = ") + (normalize ? "true" : "false"));
    return out;
}

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
    static const std::map<std::string, std::string, std::less<>> table = {
        {"fig3",
         "[model]\nkind = kink\nn = 7\nj = 2\ndelta = 2\n"
         "[probe]\njp = 2\nlevels = 4\n"
         "[bath]\nW_mK = 10\nT_mK = 12\n"
         "[experiment]\nseed = 0\n"},
        {"fig4",
         "[model]\nkind = kink\nn = 16\nj = 2\ndelta = 2\n"
         "[probe]\njp = 2\nlevels = 4\n"
         "[bath]\nW_mK = 10\nT_mK = 12\n"
         "[experiment]\nk = 10\nseed = 0\ntol = 1e-10\n"},
        {"smoke",
         "[model]\nkind = explicit\nn = 1\nbias = 0\ntunneling = 2\n"
         "[probe]\njp = 1000\nlevels = 2\n"
         "[bath]\nW_mK = 10\nT_mK = 12\n"
         "[experiment]\npositions = 1, 2\n"},
    };
    return table;
}

}  // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> out;
    for (const auto& [name, text] : presets()) out.push_back(name);
    return out;
}

std::string preset_text(std::string_view name) {
    const auto it = presets().find(name);
    if (it == presets().end()) throw ConfigError({"unknown preset '" + std::string(name) + "'"});
    return it->second;
}

RunConfig preset_config(std::string_view name) { return parse_config(preset_text(name)); }

}  // namespace qts
