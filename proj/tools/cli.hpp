#pragma once

// Subcommands of the qnmq tool. run() is the whole program minus main(), so tests can drive it in process.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "run_config.hpp"

namespace qnmq::cli {

enum ExitCode { exit_ok = 0, exit_config = 2, exit_physics = 3, exit_numerical = 4 };

inline int exit_code_for(ErrorKind k) {
    switch (k) {
    case ErrorKind::ConfigError:
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::DimensionBudget:
    case ErrorKind::RegionMismatch:
        return exit_config;
    case ErrorKind::AboveThreshold:
    case ErrorKind::UnifiedInvalid:
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::NotHermitian:
    case ErrorKind::NonPositiveBackground:
    case ErrorKind::DegenerateHybrid:
    case ErrorKind::DefectiveMatrix:
        return exit_physics;
    default:
        return exit_numerical;
    }
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct CommandResult {
    Table table;
    json summary;                       // written next to the CSV when non-null
    std::vector<std::string> y_columns;  // plot manifest suggestion
    std::string x_column;
    bool log_y = false;
    int exit = exit_ok;
    std::vector<std::string> messages;  // stderr lines
};

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag && *flag > 0) return *flag;
    if (const char* env = std::getenv("QNMQ_THREADS")) {
        long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

// Results come back in input order. The lowest-index failure is rethrown so errors do not depend on scheduling.
template <class F>
auto parallel_map(std::size_t n, unsigned threads, F f) -> std::vector<decltype(f(std::size_t{}))> {
    using R = decltype(f(std::size_t{}));
    std::vector<std::optional<R>> slots(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i] = f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (k == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    std::vector<R> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

namespace detail {

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorKind::ConfigError, what);
}

inline bool has_qnm(const Point& p) { return !p.modes.empty() && p.S_L.has_value(); }

inline TlsRates qnm_rates(const Point& p) {
    return tls_rates(p.emitter->raw_couplings, *p.S_L, p.S_G, p.modes, p.emitter->omega_a, p.emitter->gamma_B);
}

inline TlsRates phen_tls_rates(const PhenParams& ph, const EmitterParams& e) {
    PhenRates r = phen_rates(ph, e.omega_a);
    return {r.gamma_loss, r.gamma_gain, e.gamma_B, 0.0, 0.0};
}

inline std::string sweep_label(const RunConfig& c, const Point& p) { return c.sweep.variable + "=" + fmt(p.x); }

inline LindbladModel build_model(const RunConfig& c, const Point& p) {
    require(p.emitter.has_value(), "dynamics needs an emitter block");
    HilbertSpec spec;
    spec.n_max = c.n_max;
    spec.budget = c.budget;
    LindbladModel m;
    switch (c.model) {
    case ModelKind::separated:
    case ModelKind::unified: {
        require(has_qnm(p), std::string(model_name(c.model)) + " model needs system.modes and S_L");
        SymmSet s = build_symm_set(p.modes, *p.S_L, p.S_G);
        const int N = static_cast<int>(p.modes.size());
        if (c.model == ModelKind::separated) {
            spec.mode_count = s.has_gain ? 2 * N : N;
            m = build_separated(s, *p.emitter, spec);
        } else {
            spec.mode_count = N;
            m = build_unified(s, *p.emitter, spec);
        }
        break;
    }
    case ModelKind::phenomenological:
        require(c.phen.has_value(), "phenomenological model needs a phen block");
        spec.mode_count = 2;
        m = build_phenomenological(*c.phen, *p.emitter, spec);
        break;
    case ModelKind::badcavity_only:
        throw Error(ErrorKind::ConfigError, "model badcavity_only has no master equation; use rates");
    }
    require_below_threshold(m);
    return m;
}

// Analytic weak-coupling prediction for the configured model.
inline std::optional<double> badcavity_prediction(const RunConfig& c, const Point& p) {
    if (!p.emitter) return std::nullopt;
    if (c.model == ModelKind::phenomenological) {
        if (!c.phen) return std::nullopt;
        return n_excited_ss(phen_tls_rates(*c.phen, *p.emitter));
    }
    if (!has_qnm(p)) return std::nullopt;
    return n_excited_ss(qnm_rates(p));
}

}  // namespace detail

inline CommandResult cmd_hybridize(const RunConfig& c, unsigned threads) {
    using detail::require;
    require(c.system.bare_loss.has_value(), "hybridize needs system.bare loss and gain modes");
    auto points = resolve_points(c);
    for (const auto& p : points)
        require(p.kappa.has_value(), "hybridize needs kappa or overlaps at " + detail::sweep_label(c, p));
    const double ref_re = c.system.reference.omega;
    auto rows = parallel_map(points.size(), threads, [&](std::size_t i) {
        const Point& p = points[i];
        auto [wp, wm] = hybrid_frequencies(p.bare_loss, p.bare_gain, *p.kappa);
        double split = std::abs(wp.value() - wm.value());
        return std::vector<double>{p.x,
                                   wp.omega - ref_re,
                                   wm.omega - ref_re,
                                   wp.value().imag(),
                                   wm.value().imag(),
                                   std::abs(cmt_discriminant(p.bare_loss.value(), p.bare_gain.value(), *p.kappa)),
                                   split,
                                   0.0};
    });
    CommandResult r;
    r.table.columns = {c.sweep.variable, "re_plus_shift", "re_minus_shift", "im_plus",
                       "im_minus",       "abs_discriminant", "abs_split",  "ep_candidate"};
    if (!rows.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i][6] < rows[best][6]) best = i;
        rows[best][7] = 1.0;
    }
    r.table.rows = std::move(rows);
    r.x_column = c.sweep.variable;
    r.y_columns = {"re_plus_shift", "re_minus_shift", "im_plus", "im_minus"};
    return r;
}

inline CommandResult cmd_diagnose(const RunConfig& c, unsigned threads) {
    auto points = resolve_points(c);
    Eigen::Index n = 0;
    for (const auto& p : points) {
        detail::require(p.S_L.has_value(), "diagnose needs S_L at " + detail::sweep_label(c, p));
        if (n == 0) n = p.S_L->rows();
        detail::require(p.S_L->rows() == n, "all points need the same mode count");
    }

    struct Row {
        std::vector<double> values;
        bool positive = false;
        double min_eig = 0.0;
    };
    auto rows = parallel_map(points.size(), threads, [&](std::size_t i) {
        const Point& p = points[i];
        CMatrix SL = hermitize(*p.S_L, "S_L");
        CMatrix SG = p.S_G ? hermitize(*p.S_G, "S_G") : CMatrix::Zero(n, n);
        CMatrix Sp = p.S_G ? s_unified(SL, SG) : SL;
        DefinitenessReport rl = definiteness_report(SL), rg = definiteness_report(SG), rp = definiteness_report(Sp);
        double nvac = 0.0;
        if (p.S_G) {
            try {
                nvac = vacuum_occupation(SG, Sp);
            } catch (const Error&) {
                nvac = std::numeric_limits<double>::quiet_NaN();
            }
        }
        // Threshold flag needs the hybrid frequencies; without them only S' definiteness is reported.
        double below = rp.positive ? 1.0 : 0.0;
        if (rp.positive && static_cast<Eigen::Index>(p.modes.size()) == n)
            below = build_symm_set(p.modes, SL, p.S_G ? std::optional<CMatrix>(SG) : std::nullopt).below_threshold()
                        ? 1.0
                        : 0.0;
        Row row;
        row.values = {p.x, rl.eigenvalues(0), rl.eigenvalues(n - 1), rg.eigenvalues(0), rg.eigenvalues(n - 1)};
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b) {
                row.values.push_back(Sp(a, b).real());
                row.values.push_back(Sp(a, b).imag());
            }
        for (Eigen::Index a = 0; a < n; ++a) row.values.push_back(rp.eigenvalues(a));
        row.values.push_back(rp.min_over_max);
        row.values.push_back(nvac);
        row.values.push_back(rp.positive ? 1.0 : 0.0);
        row.values.push_back(below);
        row.positive = rp.positive;
        row.min_eig = rp.eigenvalues(0);
        return row;
    });

    CommandResult r;
    r.table.columns = {c.sweep.variable, "SL_min_eig", "SL_max_eig", "SG_min_eig", "SG_max_eig"};
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            std::string s = "Sp_" + std::to_string(a) + std::to_string(b);
            r.table.columns.push_back(s + "_re");
            r.table.columns.push_back(s + "_im");
        }
    for (Eigen::Index a = 0; a < n; ++a) r.table.columns.push_back("Sp_eig_" + std::to_string(a));
    for (const char* s : {"Sp_min_over_max", "n_vac", "positive_definite", "below_threshold"})
        r.table.columns.push_back(s);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        r.table.rows.push_back(rows[i].values);
        if (!rows[i].positive) {
            r.exit = exit_physics;
            r.messages.push_back("UnifiedInvalid at " + detail::sweep_label(c, points[i]) +
                                 ": S' = S_L - conj(S_G) is not positive definite (min eigenvalue " +
                                 fmt(rows[i].min_eig) + "); use the separated model for this point");
        }
    }
    r.x_column = c.sweep.variable;
    r.y_columns = {"Sp_min_over_max", "n_vac"};
    return r;
}

inline CommandResult cmd_rates(const RunConfig& c, unsigned threads) {
    auto points = resolve_points(c);
    detail::require(c.emitter.has_value(), "rates needs an emitter block");
    const bool qnm = !points.empty() && detail::has_qnm(points.front());
    const bool phen = c.phen.has_value();
    detail::require(qnm || phen, "rates needs system.modes + S_L, or a phen block");
    CommandResult r;
    const bool extra_wa = c.sweep.variable != "omega_a";
    r.table.columns = {c.sweep.variable};
    if (extra_wa) r.table.columns.push_back("omega_a");
    if (qnm)
        for (const char* s : {"gamma_loss_norm", "gamma_gain_norm", "ldos_quant", "n_ss", "gamma_loss", "gamma_gain",
                              "gamma_B", "lamb_loss", "lamb_gain"})
            r.table.columns.push_back(s);
    if (phen)
        for (const char* s : {"phen_ldos_norm", "phen_loss_norm", "phen_gain_norm", "phen_n_ss"})
            r.table.columns.push_back(s);
    r.table.rows = parallel_map(points.size(), threads, [&](std::size_t i) {
        const Point& p = points[i];
        std::vector<double> row{p.x};
        if (extra_wa) row.push_back(p.emitter->omega_a);
        const double gB = p.emitter->gamma_B;
        if (qnm) {
            TlsRates t = detail::qnm_rates(p);
            for (double v : {t.gamma_loss / gB, t.gamma_gain / gB, quantum_ldos(t), n_excited_ss(t), t.gamma_loss,
                             t.gamma_gain, gB, t.lamb_loss, t.lamb_gain})
                row.push_back(v);
        }
        if (phen) {
            PhenRates pr = phen_rates(*c.phen, p.emitter->omega_a);
            TlsRates t{pr.gamma_loss, pr.gamma_gain, gB, 0.0, 0.0};
            for (double v : {pr.gamma_ldos / gB, pr.gamma_loss / gB, pr.gamma_gain / gB, n_excited_ss(t)})
                row.push_back(v);
        }
        return row;
    });
    r.x_column = c.sweep.variable;
    if (qnm) r.y_columns = {"gamma_loss_norm", "gamma_gain_norm", "ldos_quant"};
    if (phen) r.y_columns.insert(r.y_columns.end(), {"phen_loss_norm", "phen_gain_norm"});
    r.log_y = true;
    return r;
}

inline CommandResult cmd_compare(const RunConfig& c, unsigned threads) {
    auto points = resolve_points(c);
    detail::require(c.emitter.has_value() && c.phen.has_value(), "compare needs emitter and phen blocks");
    for (const auto& p : points) detail::require(detail::has_qnm(p), "compare needs system.modes and S_L");
    CommandResult r;
    r.table.columns = {c.sweep.variable, "omega_a",     "qnm_loss_norm", "qnm_gain_norm", "phen_loss_norm",
                       "phen_gain_norm", "rel_err_loss", "rel_err_gain", "n_ss_qnm",      "n_ss_phen",
                       "ldos_quant",     "phen_ldos_norm"};
    r.table.rows = parallel_map(points.size(), threads, [&](std::size_t i) {
        const Point& p = points[i];
        QnmSystem sys{p.modes, p.emitter->raw_couplings, *p.S_L, p.S_G};
        const double gB = p.emitter->gamma_B;
        CompareRow row = compare_models(sys, *c.phen, gB, {p.emitter->omega_a}).front();
        auto rel = [](double a, double b) { return b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a - b); };
        return std::vector<double>{p.x,
                                   row.omega_a,
                                   row.qnm.gamma_loss / gB,
                                   row.qnm.gamma_gain / gB,
                                   row.phen.gamma_loss / gB,
                                   row.phen.gamma_gain / gB,
                                   rel(row.phen.gamma_loss, row.qnm.gamma_loss),
                                   rel(row.phen.gamma_gain, row.qnm.gamma_gain),
                                   row.n_ss_qnm,
                                   row.n_ss_phen,
                                   row.ldos_quant,
                                   row.phen.gamma_ldos / gB};
    });
    r.x_column = c.sweep.variable;
    r.y_columns = {"qnm_loss_norm", "phen_loss_norm", "qnm_gain_norm", "phen_gain_norm"};
    r.log_y = true;
    return r;
}

inline CommandResult cmd_steady(const RunConfig& c, unsigned threads) {
    auto points = resolve_points(c);
    SteadyOptions opt;
    opt.rtol = c.rtol;
    opt.atol = c.atol;
    auto rows = parallel_map(points.size(), threads, [&](std::size_t i) {
        const Point& p = points[i];
        LindbladModel m = with_rotating_frame(detail::build_model(c, p), p.emitter->omega_a);
        SteadyResult s = steady_state(m, opt);
        Observables o = measure(make_operators(m.spec, m.charge), s.rho, 0.0);
        std::vector<double> row{p.x, p.emitter->omega_a, o.n_e,
                                detail::badcavity_prediction(c, p).value_or(std::numeric_limits<double>::quiet_NaN())};
        for (double n : o.photons) row.push_back(n);
        row.push_back(s.residual);
        row.push_back(s.method == SteadyMethod::null_space ? 0.0 : 1.0);
        return row;
    });
    CommandResult r;
    r.table.columns = {c.sweep.variable, "omega_a", "n_e", "n_e_badcavity"};
    const std::size_t modes = rows.empty() ? 0 : rows.front().size() - 6;
    for (std::size_t k = 0; k < modes; ++k) r.table.columns.push_back("photons_" + std::to_string(k));
    r.table.columns.push_back("residual");
    r.table.columns.push_back("method_long_time");
    r.table.rows = std::move(rows);
    r.x_column = c.sweep.variable;
    r.y_columns = {"n_e", "n_e_badcavity"};
    return r;
}

inline CommandResult cmd_evolve(const RunConfig& c, unsigned /*threads*/) {
    detail::require(c.evolve.has_value(), "evolve needs an evolve block");
    auto points = resolve_points(c);
    detail::require(points.size() == 1, "evolve runs a single sweep point");
    const Point& p = points.front();
    const EvolveConfig& ev = *c.evolve;
    detail::require(ev.t_end >= 0.0, "evolve.t_end must be >= 0");
    LindbladModel m = detail::build_model(c, p);
    if (ev.emitter_frame) m = with_rotating_frame(std::move(m), p.emitter->omega_a);
    std::vector<int> photons = ev.photons;
    if (photons.empty()) photons.assign(static_cast<std::size_t>(m.spec.mode_count), 0);
    detail::require(photons.size() == static_cast<std::size_t>(m.spec.mode_count),
                    "evolve.photons needs one entry per bosonic mode (" + std::to_string(m.spec.mode_count) + ")");
    CMatrix rho0 = product_state(m.spec, photons, ev.tls);

    EvolveOptions opt;
    opt.rtol = c.rtol;
    opt.atol = c.atol;
    opt.samples = ev.t_end > 0.0 ? std::max<std::size_t>(ev.samples, 2) : 1;
    Trajectory tr;
    if (ev.t_end > 0.0) {
        tr = evolve(m, rho0, ev.t_end, opt);
    } else {
        tr.samples.push_back(measure(make_operators(m.spec, m.charge), rho0, 0.0));
        tr.final_state = rho0;
    }

    CommandResult r;
    r.table.columns = {"t", "n_e", "sigma_minus_re", "sigma_minus_im"};
    for (const auto& l : m.mode_labels) r.table.columns.push_back("photons_" + l);
    for (const char* s : {"trace_drift", "herm_drift", "min_eig"}) r.table.columns.push_back(s);
    for (const auto& o : tr.samples) {
        std::vector<double> row{o.t, o.n_e, o.sigma_minus.real(), o.sigma_minus.imag()};
        row.insert(row.end(), o.photons.begin(), o.photons.end());
        row.push_back(o.check.trace_drift);
        row.push_back(o.check.herm_drift);
        row.push_back(o.check.min_eig);
        r.table.rows.push_back(std::move(row));
    }
    const Observables& last = tr.samples.back();
    json s;
    s["model"] = model_name(c.model);
    s["dimension"] = m.spec.dimension();
    s["t_end"] = ev.t_end;
    s["final_n_e"] = last.n_e;
    s["final_photons"] = last.photons;
    s["worst_trace_drift"] = std::max(tr.worst_trace_drift, last.check.trace_drift);
    s["worst_herm_drift"] = std::max(tr.worst_herm_drift, last.check.herm_drift);
    s["worst_min_eig"] = std::min(tr.worst_min_eig, last.check.min_eig);
    if (auto n = detail::badcavity_prediction(c, p)) s["n_e_badcavity_ss"] = *n;
    r.summary = s;
    r.x_column = "t";
    r.y_columns = {"n_e"};
    return r;
}

using CommandFn = CommandResult (*)(const RunConfig&, unsigned);

inline const std::vector<std::pair<std::string, CommandFn>>& commands() {
    static const std::vector<std::pair<std::string, CommandFn>> table{
        {"hybridize", cmd_hybridize}, {"diagnose", cmd_diagnose}, {"rates", cmd_rates},
        {"evolve", cmd_evolve},       {"steady", cmd_steady},     {"compare", cmd_compare}};
    return table;
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::ConfigError, "cannot write " + p.string());
    f << text;
}

inline std::string render_csv(const std::string& command, const RunConfig& c, const Table& t) {
    std::string s;
    s += "# tool: qnmq " + std::string(version) + "\n";
    s += "# command: " + command + "\n";
    s += "# config_hash: fnv1a64:" + config_hash(c) + "\n";
    s += "# model: " + std::string(model_name(c.model)) + "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
    s += "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) s += ",";
            s += fmt(row[i]);
        }
        s += "\n";
    }
    return s;
}

inline json plot_manifest(const std::string& command, const CommandResult& r) {
    return {{"csv", command + ".csv"},
            {"x", r.x_column},
            {"y", r.y_columns},
            {"y_scale", r.log_y ? "log" : "linear"},
            {"comment_prefix", "#"}};
}

struct Options {
    std::string command;
    std::string config;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::optional<double> rtol, atol;
    std::optional<int> nmax;
};

inline void apply_overrides(RunConfig& c, const Options& o) {
    if (o.out) c.out_dir = *o.out;
    if (o.rtol) c.rtol = *o.rtol;
    if (o.atol) c.atol = *o.atol;
    if (o.nmax) c.n_max = *o.nmax;
    if (!(c.rtol > 0.0) || !(c.atol > 0.0)) throw Error(ErrorKind::ConfigError, "tolerances must be > 0");
    if (c.n_max < 1) throw Error(ErrorKind::ConfigError, "n_max must be >= 1");
}

inline int execute(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        RunConfig c = load_config(o.config);
        apply_overrides(c, o);
        CommandFn fn = nullptr;
        for (const auto& [name, f] : commands())
            if (name == o.command) fn = f;
        if (!fn) throw Error(ErrorKind::ConfigError, "unknown command " + o.command);

        CommandResult r = fn(c, resolve_threads(o.threads));
        std::filesystem::path dir = c.out_dir;
        std::filesystem::create_directories(dir);
        write_text(dir / (o.command + ".csv"), render_csv(o.command, c, r.table));
        write_text(dir / (o.command + ".plot.json"), plot_manifest(o.command, r).dump(2) + "\n");
        write_text(dir / "effective_config.json", effective_config(c).dump(2) + "\n");
        if (!r.summary.is_null()) write_text(dir / (o.command + ".summary.json"), r.summary.dump(2) + "\n");
        for (const auto& m : r.messages) err << m << "\n";
        out << o.command << ": " << r.table.rows.size() << " rows -> " << (dir / (o.command + ".csv")).string()
            << "\n";
        return r.exit;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        if (e.kind() == ErrorKind::UnifiedInvalid) err << "advice: use the separated model\n";
        if (e.kind() == ErrorKind::AboveThreshold) err << "advice: the linear-amplifier description does not apply\n";
        return exit_code_for(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_numerical;
    }
}

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qnmq: quantized quasinormal modes for coupled gain-loss resonators"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);
    Options o;
    for (const auto& [name, fn] : commands()) {
        (void)fn;
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", o.config, "JSON run configuration")->required();
        sub->add_option("--out", o.out, "output directory (overrides output.dir)");
        sub->add_option("--threads", o.threads, "worker threads (default: QNMQ_THREADS or 1)");
        sub->add_option("--rtol", o.rtol, "integrator relative tolerance");
        sub->add_option("--atol", o.atol, "integrator absolute tolerance");
        sub->add_option("--nmax", o.nmax, "Fock cutoff per mode");
        sub->callback([&o, name = name] { o.command = name; });
    }
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config;
    }
    return execute(o, out, err);
}

}  // namespace qnmq::cli
