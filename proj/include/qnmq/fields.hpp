#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "core.hpp"

namespace qnmq {

enum class Region { loss_volume, gain_volume };

inline const char* region_name(Region r) { return r == Region::loss_volume ? "loss_volume" : "gain_volume"; }

struct FieldGrid {
    Region region = Region::loss_volume;
    std::vector<double> x_nm, y_nm, area_nm2;
    std::vector<cplx> eps;
    // Optional per-mode permittivity eps(s, omega_mu); empty means frequency-flat.
    std::vector<std::vector<cplx>> eps_mode;
    // fields[mode][point]
    std::vector<std::vector<cplx>> fields;

    std::size_t point_count() const { return area_nm2.size(); }
    std::size_t mode_count() const { return fields.size(); }

    double eps_imag(std::size_t mode, std::size_t p) const {
        return eps_mode.empty() ? eps[p].imag() : eps_mode[mode][p].imag();
    }
};

namespace detail {

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Deterministic blocked summation: fixed-size chunks, chunk totals combined pairwise.
template <class F>
cplx chunked_sum(std::size_t n, F&& term) {
    constexpr std::size_t chunk = 256;
    std::vector<cplx> partial;
    for (std::size_t b = 0; b < n; b += chunk) {
        cplx s{0.0, 0.0};
        std::size_t e = std::min(n, b + chunk);
        for (std::size_t p = b; p < e; ++p) s += term(p);
        partial.push_back(s);
    }
    if (partial.empty()) return {0.0, 0.0};
    while (partial.size() > 1) {
        std::vector<cplx> next;
        for (std::size_t i = 0; i + 1 < partial.size(); i += 2) next.push_back(partial[i] + partial[i + 1]);
        if (partial.size() % 2) next.push_back(partial.back());
        partial.swap(next);
    }
    return partial[0];
}

inline void check_mode(const FieldGrid& g, std::size_t mu, const char* who) {
    if (mu >= g.mode_count())
        throw Error(ErrorKind::DimensionMismatch, std::string(who) + ": mode index " + std::to_string(mu) +
                                                      " out of range (" + std::to_string(g.mode_count()) + " modes)");
}

}  // namespace detail

// Row numbers in messages are 1-based data rows.
inline void validate_field_grid(const FieldGrid& g) {
    const std::size_t n = g.point_count();
    if (g.x_nm.size() != n || g.y_nm.size() != n || g.eps.size() != n)
        throw Error(ErrorKind::ValidationError, "field grid: column lengths differ");
    if (!g.eps_mode.empty() && g.eps_mode.size() != g.mode_count())
        throw Error(ErrorKind::ValidationError, "field grid: per-mode permittivity count differs from mode count");
    for (const auto& f : g.fields)
        if (f.size() != n) throw Error(ErrorKind::ValidationError, "field grid: a mode lacks amplitudes at some points");
    for (const auto& e : g.eps_mode)
        if (e.size() != n) throw Error(ErrorKind::ValidationError, "field grid: per-mode permittivity incomplete");

    auto fail = [](std::size_t row, const std::string& msg) {
        throw Error(ErrorKind::ValidationError, "row " + std::to_string(row + 1) + ": " + msg);
    };
    auto sign_ok = [&](double im) { return g.region == Region::gain_volume ? im < 0.0 : im >= 0.0; };
    for (std::size_t p = 0; p < n; ++p) {
        if (!std::isfinite(g.x_nm[p]) || !std::isfinite(g.y_nm[p])) fail(p, "non-finite coordinate");
        if (!(g.area_nm2[p] > 0.0) || !std::isfinite(g.area_nm2[p])) fail(p, "cell area must be > 0");
        if (!detail::finite(g.eps[p])) fail(p, "non-finite permittivity");
        if (!sign_ok(g.eps[p].imag()))
            fail(p, std::string("Im eps sign inconsistent with region ") + region_name(g.region));
        for (std::size_t k = 0; k < g.eps_mode.size(); ++k) {
            if (!detail::finite(g.eps_mode[k][p])) fail(p, "non-finite permittivity for mode " + std::to_string(k));
            if (!sign_ok(g.eps_mode[k][p].imag()))
                fail(p, "Im eps sign for mode " + std::to_string(k) + " inconsistent with region " +
                            region_name(g.region));
        }
        for (std::size_t k = 0; k < g.mode_count(); ++k)
            if (!detail::finite(g.fields[k][p])) fail(p, "non-finite amplitude for mode " + std::to_string(k));
    }
}

namespace detail {

// Evaluates with the smaller index first so swapped arguments give the exact conjugate and diagonals are real.
template <class F>
cplx hermitian_entry(std::size_t mu, std::size_t eta, F integral) {
    if (mu == eta) return integral(mu, mu).real();
    return mu < eta ? integral(mu, eta) : std::conj(integral(eta, mu));
}

}  // namespace detail

// sum w sqrt(epsI_mu epsI_eta) f_mu f_eta^*
inline cplx overlap_nrad_pole(const FieldGrid& g, std::size_t mu, std::size_t eta) {
    if (g.region != Region::loss_volume)
        throw Error(ErrorKind::RegionMismatch, "overlap_nrad_pole needs a loss_volume grid");
    detail::check_mode(g, mu, "overlap_nrad_pole");
    detail::check_mode(g, eta, "overlap_nrad_pole");
    return detail::hermitian_entry(mu, eta, [&](std::size_t a, std::size_t b) {
        const auto& fa = g.fields[a];
        const auto& fb = g.fields[b];
        return detail::chunked_sum(g.point_count(), [&](std::size_t p) {
            double e = std::sqrt(g.eps_imag(a, p) * g.eps_imag(b, p));
            return g.area_nm2[p] * e * fa[p] * std::conj(fb[p]);
        });
    });
}

// sum w sqrt|epsI_mu epsI_eta| f_mu^* f_eta (conjugation reversed relative to the loss overlap)
inline cplx overlap_gain_pole(const FieldGrid& g, std::size_t mu, std::size_t eta) {
    if (g.region != Region::gain_volume)
        throw Error(ErrorKind::RegionMismatch, "overlap_gain_pole needs a gain_volume grid");
    detail::check_mode(g, mu, "overlap_gain_pole");
    detail::check_mode(g, eta, "overlap_gain_pole");
    return detail::hermitian_entry(mu, eta, [&](std::size_t a, std::size_t b) {
        const auto& fa = g.fields[a];
        const auto& fb = g.fields[b];
        return detail::chunked_sum(g.point_count(), [&](std::size_t p) {
            double e = std::sqrt(std::abs(g.eps_imag(a, p) * g.eps_imag(b, p)));
            return g.area_nm2[p] * e * std::conj(fa[p]) * fb[p];
        });
    });
}

inline CMatrix overlap_matrix(const FieldGrid& g) {
    const auto n = static_cast<Eigen::Index>(g.mode_count());
    CMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            m(i, j) = g.region == Region::loss_volume ? overlap_nrad_pole(g, i, j) : overlap_gain_pole(g, i, j);
    return m;
}

// Unconjugated integral of eps f_mu f_mu minus 1; diagnostic only.
inline cplx normalization_residual(const FieldGrid& g, std::size_t mu) {
    detail::check_mode(g, mu, "normalization_residual");
    const auto& f = g.fields[mu];
    cplx s = detail::chunked_sum(g.point_count(), [&](std::size_t p) {
        cplx e = g.eps_mode.empty() ? g.eps[p] : g.eps_mode[mu][p];
        return g.area_nm2[p] * e * f[p] * f[p];
    });
    return s - 1.0;
}

// CSV with header x_nm,y_nm,area_nm2,eps_re,eps_im,f<k>_re,f<k>_im[,eps<k>_re,eps<k>_im].
// A comment line "# region=gain_volume" overrides the default region.
inline FieldGrid parse_field_grid(std::istream& in, Region region, const std::string& source = "<stream>") {
    auto perr = [&](std::size_t line, const std::string& msg) {
        throw Error(ErrorKind::ParseError, source + ":" + std::to_string(line) + ": " + msg);
    };
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(s);
        while (std::getline(ss, cell, ',')) {
            auto b = cell.find_first_not_of(" \t\r");
            auto e = cell.find_last_not_of(" \t\r");
            out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
        }
        if (!s.empty() && s.back() == ',') out.emplace_back();
        return out;
    };

    FieldGrid g;
    g.region = region;
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (line[0] == '#') {
            auto pos = line.find("region=");
            if (pos != std::string::npos) {
                std::string v = line.substr(pos + 7);
                v = v.substr(0, v.find_first_of(" \t\r,"));
                if (v == "loss_volume") g.region = Region::loss_volume;
                else if (v == "gain_volume") g.region = Region::gain_volume;
                else perr(lineno, "unknown region '" + v + "'");
            }
            continue;
        }
        header = split(line);
        break;
    }
    if (header.empty()) perr(lineno, "missing header");

    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!col.emplace(header[i], i).second) perr(lineno, "duplicate column '" + header[i] + "'");
    }
    for (const char* req : {"x_nm", "y_nm", "area_nm2", "eps_re", "eps_im"})
        if (!col.count(req)) perr(lineno, std::string("missing column '") + req + "'");

    // mode ids from f<k>_re columns, in ascending k
    std::map<int, std::pair<std::size_t, std::size_t>> fcols, ecols;
    for (const auto& [name, idx] : col) {
        for (const char* pre : {"f", "eps"}) {
            std::string p(pre);
            if (name.size() > p.size() + 3 && name.compare(0, p.size(), p) == 0 &&
                name.compare(name.size() - 3, 3, "_re") == 0) {
                std::string mid = name.substr(p.size(), name.size() - p.size() - 3);
                if (mid.empty() || mid.find_first_not_of("0123456789") != std::string::npos) continue;
                int k = std::stoi(mid);
                auto im = col.find(p + mid + "_im");
                if (im == col.end()) perr(lineno, "column '" + name + "' has no matching _im column");
                (p == "f" ? fcols : ecols)[k] = {idx, im->second};
            }
        }
    }
    if (fcols.empty()) perr(lineno, "no mode columns f<k>_re/f<k>_im");
    if (!ecols.empty()) {
        if (ecols.size() != fcols.size()) perr(lineno, "per-mode eps columns must cover every mode");
        for (const auto& [k, _] : fcols)
            if (!ecols.count(k)) perr(lineno, "missing eps" + std::to_string(k) + "_re/_im");
    }
    g.fields.resize(fcols.size());
    if (!ecols.empty()) g.eps_mode.resize(ecols.size());

    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        ++row;
        auto cells = split(line);
        if (cells.size() != header.size())
            perr(lineno, "row " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                             " cells, got " + std::to_string(cells.size()));
        auto num = [&](std::size_t c) {
            const std::string& s = cells[c];
            char* end = nullptr;
            double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size())
                perr(lineno, "row " + std::to_string(row) + ": bad number '" + s + "' in column '" + header[c] + "'");
            return v;
        };
        g.x_nm.push_back(num(col["x_nm"]));
        g.y_nm.push_back(num(col["y_nm"]));
        g.area_nm2.push_back(num(col["area_nm2"]));
        g.eps.emplace_back(num(col["eps_re"]), num(col["eps_im"]));
        std::size_t m = 0;
        for (const auto& [k, c] : fcols) g.fields[m++].emplace_back(num(c.first), num(c.second));
        m = 0;
        for (const auto& [k, c] : ecols) g.eps_mode[m++].emplace_back(num(c.first), num(c.second));
    }
    validate_field_grid(g);
    return g;
}

inline FieldGrid load_field_grid(const std::string& path, Region region) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open field grid '" + path + "'");
    return parse_field_grid(in, region, path);
}

}  // namespace qnmq
