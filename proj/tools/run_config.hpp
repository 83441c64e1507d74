#pragma once

// JSON run configuration, companion point tables and per-point system resolution.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnmq/qnmq.hpp"

namespace qnmq::cli {

using nlohmann::json;

enum class ModelKind { separated, unified, phenomenological, badcavity_only };

inline const char* model_name(ModelKind m) {
    switch (m) {
    case ModelKind::separated: return "separated";
    case ModelKind::unified: return "unified";
    case ModelKind::phenomenological: return "phenomenological";
    case ModelKind::badcavity_only: return "badcavity_only";
    }
    return "?";
}

inline ModelKind parse_model(const std::string& s) {
    for (auto m : {ModelKind::separated, ModelKind::unified, ModelKind::phenomenological, ModelKind::badcavity_only})
        if (s == model_name(m)) return m;
    throw Error(ErrorKind::ConfigError, "unknown model '" + s + "'");
}

// Companion CSV: one header row of column names, then one numeric row per sweep point.
struct PointTable {
    std::string path;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        return std::nullopt;
    }
    bool has(const std::string& name) const { return column(name).has_value(); }
};

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline PointTable load_point_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open points file " + path);
    PointTable t;
    t.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        auto cells = split_csv(s);
        if (t.columns.empty()) {
            t.columns = cells;
            continue;
        }
        if (cells.size() != t.columns.size())
            throw Error(ErrorKind::ConfigError, path + ":" + std::to_string(lineno) + ": expected " +
                                                    std::to_string(t.columns.size()) + " columns");
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            if (c.empty() || *end != '\0' || !std::isfinite(v))
                throw Error(ErrorKind::ConfigError, path + ":" + std::to_string(lineno) + ": bad number '" + c + "'");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (t.columns.empty()) throw Error(ErrorKind::ConfigError, path + ": no header row");
    return t;
}

struct SystemConfig {
    ComplexFreq reference{0.833717, 4.120496e-6};
    std::optional<ComplexFreq> bare_loss, bare_gain;
    std::optional<CmtCoupling> kappa;
    std::optional<std::pair<cplx, cplx>> overlaps;  // o_LG, o_GL
    std::vector<ComplexFreq> modes;
    std::optional<CMatrix> S_L, S_G;
};

struct SweepConfig {
    std::string variable;
    std::vector<double> values;
    std::string points;  // resolved path, empty if values are inline
};

struct EvolveConfig {
    double t_end = 0.0;
    std::size_t samples = 101;
    std::vector<int> photons;
    int tls = 1;
    bool emitter_frame = true;
};

struct RunConfig {
    int schema = 1;
    ModelKind model = ModelKind::badcavity_only;
    SystemConfig system;
    std::optional<EmitterParams> emitter;
    std::optional<PhenParams> phen;
    SweepConfig sweep;
    int n_max = 2;
    std::size_t budget = 4096;
    double rtol = 1e-9;
    double atol = 1e-12;
    std::optional<EvolveConfig> evolve;
    std::string out_dir = ".";
};

namespace detail {

inline double number(const json& j, const std::string& key) {
    if (!j.contains(key)) throw Error(ErrorKind::ConfigError, "missing field '" + key + "'");
    if (!j[key].is_number()) throw Error(ErrorKind::ConfigError, "field '" + key + "' must be a number");
    return j[key].get<double>();
}

inline cplx complex_of(const json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorKind::ConfigError, where + ": complex numbers are [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexFreq freq_of(const json& j, const std::string& where) {
    cplx c = complex_of(j, where);
    return {c.real(), c.imag()};  // [omega, gamma]
}

inline CMatrix matrix_of(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw Error(ErrorKind::ConfigError, where + ": expected array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
            throw Error(ErrorKind::ConfigError, where + ": matrix must be square");
        for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_of(row[static_cast<std::size_t>(c)], where);
    }
    return m;
}

inline json to_json(cplx c) { return json::array({c.real(), c.imag()}); }
inline json to_json(const ComplexFreq& w) { return json::array({w.omega, w.gamma}); }

inline json to_json(const CMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(row);
    }
    return rows;
}

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw Error(ErrorKind::ConfigError, where + ": unknown field '" + it.key() + "'");
    }
}

}  // namespace detail

// base_dir resolves a relative points path.
inline RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {}) {
    using namespace detail;
    if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a JSON object");
    check_keys(j, {"schema", "model", "system", "emitter", "phen", "sweep", "hilbert", "tolerances", "evolve",
                   "output", "description"},
               "config");
    RunConfig c;
    if (!j.contains("schema") || !j["schema"].is_number_integer() || j["schema"].get<int>() != 1)
        throw Error(ErrorKind::ConfigError, "\"schema\": 1 is required");
    if (j.contains("model")) c.model = parse_model(j["model"].get<std::string>());

    if (j.contains("system")) {
        const json& s = j["system"];
        check_keys(s, {"reference", "bare", "kappa", "overlaps", "modes", "S_L", "S_G"}, "system");
        if (s.contains("reference")) c.system.reference = freq_of(s["reference"], "system.reference");
        if (s.contains("bare")) {
            check_keys(s["bare"], {"loss", "gain"}, "system.bare");
            if (!s["bare"].contains("loss") || !s["bare"].contains("gain"))
                throw Error(ErrorKind::ConfigError, "system.bare needs both loss and gain");
            c.system.bare_loss = freq_of(s["bare"]["loss"], "system.bare.loss");
            c.system.bare_gain = freq_of(s["bare"]["gain"], "system.bare.gain");
        }
        if (s.contains("kappa"))
            c.system.kappa = CmtCoupling{complex_of(s["kappa"].at("LG"), "system.kappa.LG"),
                                         complex_of(s["kappa"].at("GL"), "system.kappa.GL")};
        if (s.contains("overlaps"))
            c.system.overlaps = std::pair{complex_of(s["overlaps"].at("LG"), "system.overlaps.LG"),
                                          complex_of(s["overlaps"].at("GL"), "system.overlaps.GL")};
        if (s.contains("modes"))
            for (const auto& m : s["modes"]) c.system.modes.push_back(freq_of(m, "system.modes"));
        if (s.contains("S_L")) c.system.S_L = matrix_of(s["S_L"], "system.S_L");
        if (s.contains("S_G")) c.system.S_G = matrix_of(s["S_G"], "system.S_G");
    }

    if (j.contains("emitter")) {
        const json& e = j["emitter"];
        check_keys(e, {"omega_a", "gamma_B", "couplings", "label"}, "emitter");
        EmitterParams p;
        p.omega_a = number(e, "omega_a");
        p.gamma_B = number(e, "gamma_B");
        if (e.contains("couplings")) {
            p.raw_couplings.resize(static_cast<Eigen::Index>(e["couplings"].size()));
            for (std::size_t i = 0; i < e["couplings"].size(); ++i)
                p.raw_couplings(static_cast<Eigen::Index>(i)) = complex_of(e["couplings"][i], "emitter.couplings");
        }
        if (e.contains("label")) p.position_label = e["label"].get<std::string>();
        c.emitter = p;
    }

    if (j.contains("phen")) {
        const json& p = j["phen"];
        check_keys(p, {"omega_L", "gamma_L", "omega_G", "gamma_G", "kappa", "g_L", "g_G"}, "phen");
        c.phen = PhenParams{number(p, "omega_L"), number(p, "gamma_L"), number(p, "omega_G"), number(p, "gamma_G"),
                            number(p, "kappa"),   number(p, "g_L"),     number(p, "g_G")};
    }

    if (!j.contains("sweep")) throw Error(ErrorKind::ConfigError, "missing sweep block");
    {
        const json& s = j["sweep"];
        check_keys(s, {"variable", "values", "range", "points"}, "sweep");
        if (!s.contains("variable") || !s["variable"].is_string())
            throw Error(ErrorKind::ConfigError, "sweep.variable must name exactly one variable");
        c.sweep.variable = s["variable"].get<std::string>();
        int sources = int(s.contains("values")) + int(s.contains("range")) + int(s.contains("points"));
        if (sources != 1) throw Error(ErrorKind::ConfigError, "sweep needs exactly one of values, range, points");
        if (s.contains("values")) {
            for (const auto& v : s["values"]) {
                if (!v.is_number()) throw Error(ErrorKind::ConfigError, "sweep.values must be numbers");
                c.sweep.values.push_back(v.get<double>());
            }
        } else if (s.contains("range")) {
            double a = number(s["range"], "start"), b = number(s["range"], "stop");
            int n = static_cast<int>(number(s["range"], "count"));
            if (n < 1) throw Error(ErrorKind::ConfigError, "sweep.range.count must be >= 1");
            for (int i = 0; i < n; ++i) c.sweep.values.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
        } else {
            std::filesystem::path p = s["points"].get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            c.sweep.points = p.lexically_normal().string();
        }
        if (c.sweep.points.empty() && c.sweep.values.empty())
            throw Error(ErrorKind::ConfigError, "sweep has no points");
    }

    if (j.contains("hilbert")) {
        check_keys(j["hilbert"], {"n_max", "budget"}, "hilbert");
        if (j["hilbert"].contains("n_max")) c.n_max = j["hilbert"]["n_max"].get<int>();
        if (j["hilbert"].contains("budget")) c.budget = j["hilbert"]["budget"].get<std::size_t>();
    }
    if (j.contains("tolerances")) {
        check_keys(j["tolerances"], {"rtol", "atol"}, "tolerances");
        if (j["tolerances"].contains("rtol")) c.rtol = number(j["tolerances"], "rtol");
        if (j["tolerances"].contains("atol")) c.atol = number(j["tolerances"], "atol");
    }
    if (j.contains("evolve")) {
        const json& e = j["evolve"];
        check_keys(e, {"t_end", "samples", "photons", "tls", "frame"}, "evolve");
        EvolveConfig ev;
        ev.t_end = number(e, "t_end");
        if (e.contains("samples")) ev.samples = e["samples"].get<std::size_t>();
        if (e.contains("photons")) ev.photons = e["photons"].get<std::vector<int>>();
        if (e.contains("tls")) ev.tls = e["tls"].get<int>();
        if (e.contains("frame")) {
            std::string f = e["frame"].get<std::string>();
            if (f != "emitter" && f != "lab") throw Error(ErrorKind::ConfigError, "evolve.frame is emitter or lab");
            ev.emitter_frame = f == "emitter";
        }
        c.evolve = ev;
    }
    if (j.contains("output") && j["output"].contains("dir")) c.out_dir = j["output"]["dir"].get<std::string>();
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, path + ": " + e.what());
    }
    try {
        return parse_config(j, std::filesystem::absolute(path).parent_path());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::ConfigError, path + ": " + e.what());
    }
}

// Fully explicit form: every default is written out, inline ranges are expanded.
inline json effective_config(const RunConfig& c) {
    using detail::to_json;
    json j;
    j["schema"] = c.schema;
    j["model"] = model_name(c.model);
    json s;
    s["reference"] = to_json(c.system.reference);
    if (c.system.bare_loss) s["bare"] = {{"loss", to_json(*c.system.bare_loss)}, {"gain", to_json(*c.system.bare_gain)}};
    if (c.system.kappa) s["kappa"] = {{"LG", to_json(c.system.kappa->kappa_LG)}, {"GL", to_json(c.system.kappa->kappa_GL)}};
    if (c.system.overlaps)
        s["overlaps"] = {{"LG", to_json(c.system.overlaps->first)}, {"GL", to_json(c.system.overlaps->second)}};
    if (!c.system.modes.empty()) {
        s["modes"] = json::array();
        for (const auto& m : c.system.modes) s["modes"].push_back(to_json(m));
    }
    if (c.system.S_L) s["S_L"] = to_json(*c.system.S_L);
    if (c.system.S_G) s["S_G"] = to_json(*c.system.S_G);
    j["system"] = s;
    if (c.emitter) {
        json e{{"omega_a", c.emitter->omega_a}, {"gamma_B", c.emitter->gamma_B}, {"label", c.emitter->position_label}};
        e["couplings"] = json::array();
        for (Eigen::Index i = 0; i < c.emitter->raw_couplings.size(); ++i)
            e["couplings"].push_back(to_json(c.emitter->raw_couplings(i)));
        j["emitter"] = e;
    }
    if (c.phen)
        j["phen"] = {{"omega_L", c.phen->omega_L}, {"gamma_L", c.phen->gamma_L}, {"omega_G", c.phen->omega_G},
                     {"gamma_G", c.phen->gamma_G}, {"kappa", c.phen->kappa},     {"g_L", c.phen->g_L},
                     {"g_G", c.phen->g_G}};
    json sw{{"variable", c.sweep.variable}};
    if (c.sweep.points.empty())
        sw["values"] = c.sweep.values;
    else
        sw["points"] = c.sweep.points;
    j["sweep"] = sw;
    j["hilbert"] = {{"n_max", c.n_max}, {"budget", c.budget}};
    j["tolerances"] = {{"rtol", c.rtol}, {"atol", c.atol}};
    if (c.evolve)
        j["evolve"] = {{"t_end", c.evolve->t_end},
                       {"samples", c.evolve->samples},
                       {"photons", c.evolve->photons},
                       {"tls", c.evolve->tls},
                       {"frame", c.evolve->emitter_frame ? "emitter" : "lab"}};
    j["output"] = {{"dir", c.out_dir}};
    return j;
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// The output directory is left out: where results go does not change them.
inline std::string config_hash(const RunConfig& c) {
    json j = effective_config(c);
    j.erase("output");
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

// Everything needed to evaluate one sweep point.
struct Point {
    double x = 0.0;
    ComplexFreq bare_loss, bare_gain;
    std::optional<CmtCoupling> kappa;
    std::vector<ComplexFreq> modes;
    std::optional<CMatrix> S_L, S_G;
    std::optional<EmitterParams> emitter;
};

namespace detail {

inline std::optional<double> cell(const PointTable& t, const std::vector<double>& row, const std::string& name) {
    auto i = t.column(name);
    if (!i) return std::nullopt;
    return row[*i];
}

inline std::optional<cplx> cell_c(const PointTable& t, const std::vector<double>& row, const std::string& stem) {
    auto re = cell(t, row, stem + "_re");
    auto im = cell(t, row, stem + "_im");
    if (!re && !im) return std::nullopt;
    return cplx(re.value_or(0.0), im.value_or(0.0));
}

inline std::optional<CMatrix> cell_matrix(const PointTable& t, const std::vector<double>& row, const std::string& stem,
                                          Eigen::Index n) {
    if (!cell_c(t, row, stem + "_00")) return std::nullopt;
    CMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            auto v = cell_c(t, row, stem + "_" + std::to_string(r) + std::to_string(c));
            if (!v) throw Error(ErrorKind::ConfigError, t.path + ": incomplete " + stem + " columns");
            m(r, c) = *v;
        }
    return m;
}

inline Eigen::Index table_matrix_size(const PointTable& t, const std::string& stem) {
    Eigen::Index n = 0;
    while (t.has(stem + "_" + std::to_string(n) + std::to_string(n) + "_re")) ++n;
    return n;
}

}  // namespace detail

// Config values first, then per-point columns override, then the sweep variable itself if it is a known field.
inline std::vector<Point> resolve_points(const RunConfig& c) {
    using namespace detail;
    std::vector<Point> out;
    Point base;
    if (c.system.bare_loss) {
        base.bare_loss = *c.system.bare_loss;
        base.bare_gain = *c.system.bare_gain;
    }
    base.kappa = c.system.kappa;
    base.modes = c.system.modes;
    base.S_L = c.system.S_L;
    base.S_G = c.system.S_G;
    base.emitter = c.emitter;

    auto apply_overlaps = [&](Point& p, std::optional<std::pair<cplx, cplx>> o) {
        if (o) p.kappa = cmt_coupling(p.bare_loss, p.bare_gain, o->first, o->second);
    };
    auto apply_variable = [&](Point& p) {
        if (c.sweep.variable == "omega_a") {
            if (!p.emitter) throw Error(ErrorKind::ConfigError, "sweep over omega_a needs an emitter block");
            p.emitter->omega_a = p.x;
        }
    };

    if (c.sweep.points.empty()) {
        for (double v : c.sweep.values) {
            Point p = base;
            p.x = v;
            apply_overlaps(p, c.system.overlaps);
            apply_variable(p);
            out.push_back(p);
        }
        return out;
    }

    PointTable t = load_point_table(c.sweep.points);
    if (!t.has(c.sweep.variable))
        throw Error(ErrorKind::ConfigError, t.path + ": missing sweep column '" + c.sweep.variable + "'");
    const Eigen::Index nS = table_matrix_size(t, "SL");
    for (const auto& row : t.rows) {
        Point p = base;
        p.x = *cell(t, row, c.sweep.variable);
        if (auto w = cell(t, row, "loss_omega")) p.bare_loss.omega = *w;
        if (auto w = cell(t, row, "loss_gamma")) p.bare_loss.gamma = *w;
        if (auto w = cell(t, row, "gain_omega")) p.bare_gain.omega = *w;
        if (auto w = cell(t, row, "gain_gamma")) p.bare_gain.gamma = *w;
        auto kLG = cell_c(t, row, "kappa_LG"), kGL = cell_c(t, row, "kappa_GL");
        if (kLG || kGL) p.kappa = CmtCoupling{kLG.value_or(0.0), kGL.value_or(0.0)};
        auto oLG = cell_c(t, row, "overlap_LG"), oGL = cell_c(t, row, "overlap_GL");
        if (oLG || oGL)
            apply_overlaps(p, std::pair{oLG.value_or(0.0), oGL.value_or(0.0)});
        else
            apply_overlaps(p, c.system.overlaps);
        for (std::size_t k = 0;; ++k) {
            auto w = cell(t, row, "mode" + std::to_string(k) + "_omega");
            if (!w) break;
            if (k == 0) p.modes.clear();
            p.modes.push_back({*w, cell(t, row, "mode" + std::to_string(k) + "_gamma").value_or(0.0)});
        }
        if (nS > 0) {
            p.S_L = cell_matrix(t, row, "SL", nS);
            p.S_G = cell_matrix(t, row, "SG", nS);
        }
        if (p.emitter) {
            for (Eigen::Index k = 0; k < p.emitter->raw_couplings.size(); ++k)
                if (auto g = cell_c(t, row, "g" + std::to_string(k))) p.emitter->raw_couplings(k) = *g;
            if (auto wa = cell(t, row, "omega_a")) p.emitter->omega_a = *wa;
        }
        apply_variable(p);
        out.push_back(p);
    }
    return out;
}

}  // namespace qnmq::cli
