// s6vlab: batch experiment runner over the s6v library.
//
//   s6vlab <subcommand> [--config cfg.json] [--out dir] [--seed n] [--threads n]
//
// Every subcommand reads a JSON parameter block (defaults below, unknown keys
// rejected) and writes CSV/JSON tables plus SVG figures into --out.

#include "plot.hpp"

#include "s6v/dope.hpp"
#include "s6v/equilibrium.hpp"
#include "s6v/painleve34.hpp"
#include "s6v/six_vertex.hpp"
#include "s6v/special.hpp"
#include "s6v/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#ifndef S6V_GIT_DESCRIBE
#define S6V_GIT_DESCRIBE "unknown"
#endif

namespace fs = std::filesystem;
using s6v::ojson;
using plot::fmt;

namespace {

const std::map<std::string, ojson>& schemas() {
    static const std::map<std::string, ojson> s = {
        {"simulate", {{"q", 0.25}, {"u", 3.0}, {"M", 4}, {"N", 6}, {"samples", 100000}, {"seed", 1}}},
        {"pmf", {{"q", 0.25}, {"u", 3.0}, {"M", 4}, {"N", 6}}},
        {"bo-check", {{"q", 0.25}, {"u", 3.0}, {"M", 4}, {"N", 6}, {"zeta", {0.5, 1.0, 2.0}}}},
        {"deform-check", {{"alpha", 2.0}, {"beta", 0.3}, {"n", 3}, {"s", 0.0}, {"S", 2.0}, {"t", 0.5}, {"a", 1.0}, {"N", 3.0}}},
        {"poisson", {{"t", 1.0}, {"u", 0.3}, {"K_terms", 200}}},
        {"kernels", {{"x_min", -25.0}, {"x_max", 10.0}, {"points", 141}, {"bessel_max", 400.0}, {"s_min", -6.0}, {"s_max", 4.0}}},
        {"p34", {{"L_minus", 16.0}, {"L_plus", 10.0}, {"tol", 1e-8}, {"mesh", 0.015625}, {"stride", 16}}},
        {"equilibrium", {{"beta", 0.25}, {"nu", 2.0}, {"n", 200}, {"eps", {0.02, 0.01, 0.005}}}},
        {"tails", {{"q", 0.25}, {"u", 40.0}, {"nu", 1.5}, {"N", 400}, {"h", {-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 1.5, 2.0, 2.5, 3.0}}}},
        {"tw-clt", {{"q", 0.25}, {"u", 40.0}, {"nu", 1.5}, {"N", 512}, {"samples", 10000}, {"seed", 1}}},
    };
    return s;
}

bool same_kind(const ojson& a, const ojson& b) {
    if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
    return a.type() == b.type();
}

ojson effective_config(const std::string& sub, const std::string& path) {
    ojson cfg = schemas().at(sub);
    if (path.empty()) return cfg;
    std::ifstream f(path);
    if (!f) throw s6v::ConfigInvalid("cannot open config " + path);
    ojson user;
    try {
        user = ojson::parse(f);
    } catch (const std::exception& e) {
        throw s6v::ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
    }
    if (!user.is_object()) throw s6v::ConfigInvalid("config must be a JSON object");
    for (auto it = user.begin(); it != user.end(); ++it) {
        if (!cfg.contains(it.key())) throw s6v::ConfigInvalid("unknown key '" + it.key() + "' for " + sub);
        if (!same_kind(cfg[it.key()], it.value()))
            throw s6v::ConfigInvalid("key '" + it.key() + "' has the wrong type");
        cfg[it.key()] = it.value();
    }
    return cfg;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct Context {
    std::string sub;
    ojson cfg;
    fs::path out;
    unsigned threads = 1;
    std::string hash;
    std::string git = S6V_GIT_DESCRIBE;

    std::string stamp() const { return "s6vlab " + sub + " config_hash=" + hash + " git=" + git; }

    void write(const std::string& name, const std::string& body) const {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (out / name).string());
        f << body;
    }

    // CSV with a provenance comment line, then the header row.
    std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) const {
        std::ostringstream o;
        o << "# " << stamp() << "\n";
        for (std::size_t i = 0; i < header.size(); ++i) o << (i ? "," : "") << header[i];
        o << "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << fmt(r[i]);
            o << "\n";
        }
        return o.str();
    }

    void write_csv_and_svg(const std::string& stem, const std::vector<std::string>& header,
                           const std::vector<std::vector<double>>& rows,
                           const std::function<plot::Figure(const plot::Table&)>& figure) const {
        const std::string text = csv(header, rows);
        write(stem + ".csv", text);
        if (figure) write(stem + ".svg", plot::render(figure(plot::parse_csv(text))));
    }

    void write_json(const std::string& name, ojson body) const {
        ojson j;
        j["tool"] = "s6vlab";
        j["subcommand"] = sub;
        j["config_hash"] = hash;
        j["git_describe"] = git;
        j["config"] = cfg;
        j["result"] = std::move(body);
        write(name, j.dump(2) + "\n");
    }
};

void run_simulate(const Context& c) {
    const s6v::S6VParams p(c.cfg["q"], c.cfg["u"]);
    const int M = c.cfg["M"], N = c.cfg["N"];
    const std::size_t samples = c.cfg["samples"];
    const std::uint64_t seed = c.cfg["seed"];
    const auto hs = s6v::sample_heights(p, M, N, samples, seed, c.threads);
    std::map<int, long> counts;
    double mean = 0.0, m2 = 0.0;
    for (int h : hs) {
        ++counts[h];
        mean += h;
        m2 += double(h) * h;
    }
    mean /= static_cast<double>(samples);
    const double var = m2 / static_cast<double>(samples) - mean * mean;
    std::vector<std::vector<double>> rows;
    for (const auto& [h, n] : counts) rows.push_back({double(h), double(n)});
    c.write_csv_and_svg("simulate", {"h", "count"}, rows, [&](const plot::Table& t) {
        auto f = plot::from_table(t, "h", {"count"}, "Monte Carlo height histogram");
        f.series[0].points = true;
        return f;
    });
    c.write_json("simulate.json", {{"mean", mean}, {"variance", var}, {"samples", samples}});
}

void run_pmf(const Context& c) {
    const s6v::S6VParams p(c.cfg["q"], c.cfg["u"]);
    const auto pmf = s6v::exact_height_pmf(p, c.cfg["M"], c.cfg["N"]);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < pmf.support.size(); ++i) rows.push_back({double(pmf.support[i]), pmf.probs[i]});
    c.write_csv_and_svg("pmf", {"support", "prob"}, rows, [&](const plot::Table& t) {
        auto f = plot::from_table(t, "support", {"prob"}, "exact height pmf");
        f.series[0].points = true;
        return f;
    });
    c.write_json("pmf.json", {{"total", pmf.total()}});
}

int emit_reports(const Context& c, const std::string& name, const std::vector<s6v::CheckReport>& reports) {
    ojson arr = ojson::array();
    bool ok = true;
    for (const auto& r : reports) {
        arr.push_back(r.to_json());
        ok = ok && r.pass;
    }
    c.write_json(name, arr);
    return ok ? 0 : 1;
}

int run_bo(const Context& c) {
    std::vector<s6v::CheckReport> rs;
    for (double z : c.cfg["zeta"]) rs.push_back(s6v::check_bo_identity(c.cfg["q"], c.cfg["u"], c.cfg["M"], c.cfg["N"], z));
    return emit_reports(c, "bo_check.json", rs);
}

int run_deform(const Context& c) {
    const auto& g = c.cfg;
    return emit_reports(c, "deform_check.json",
                        {s6v::check_deformation_formula(g["alpha"], g["beta"], g["n"], g["s"], g["S"], g["t"], g["a"], g["N"])});
}

int run_poisson(const Context& c) {
    const auto r = s6v::check_poisson_summation(c.cfg["t"], c.cfg["u"], c.cfg["K_terms"]);
    ojson j = r.to_json();
    j["config_hash"] = c.hash;
    j["git_describe"] = c.git;
    const std::string line = j.dump();
    c.write("poisson.json", line + "\n");
    std::cout << line << "\n";
    return r.pass ? 0 : 1;
}

void run_kernels(const Context& c) {
    const double x0 = c.cfg["x_min"], x1 = c.cfg["x_max"];
    const int n = c.cfg["points"];
    std::vector<std::vector<double>> rows;
    for (int i = 0; i < n; ++i) {
        const double x = x0 + (x1 - x0) * i / std::max(n - 1, 1);
        const double asym = std::abs(x) >= 2 ? (x > 0 ? s6v::airy_diag_asymptotics(x).pos_approx : s6v::airy_diag_asymptotics(x).neg_approx)
                                              : NAN;
        rows.push_back({x, s6v::airy_kernel_diag(x), asym});
    }
    c.write_csv_and_svg("airy_diag", {"x", "airy_diag", "asymptotic"}, rows, [&](const plot::Table& t) {
        return plot::from_table(t, "x", {"airy_diag", "asymptotic"}, "Airy kernel diagonal", true);
    });
    rows.clear();
    const double bmax = c.cfg["bessel_max"];
    for (int i = 0; i < n; ++i) {
        const double x = -10.0 + (bmax + 10.0) * i / std::max(n - 1, 1);
        rows.push_back({x, s6v::bessel_kernel_diag(x), x > 0 ? 1.0 / (2.0 * s6v::kPi * std::sqrt(x)) : NAN});
    }
    c.write_csv_and_svg("bessel_diag", {"x", "bessel_diag", "large_x"}, rows, [&](const plot::Table& t) {
        return plot::from_table(t, "x", {"bessel_diag", "large_x"}, "Bessel kernel diagonal", true);
    });
    rows.clear();
    const double s0 = c.cfg["s_min"], s1 = c.cfg["s_max"];
    for (int i = 0; i < n; ++i) {
        const double s = s0 + (s1 - s0) * i / std::max(n - 1, 1);
        rows.push_back({s, s6v::tracy_widom_gue(s)});
    }
    c.write_csv_and_svg("tracy_widom", {"s", "F_GUE"}, rows,
                        [&](const plot::Table& t) { return plot::from_table(t, "s", {"F_GUE"}, "F_GUE by Nystrom"); });
}

void run_p34(const Context& c) {
    const auto sol = s6v::solve_p34(c.cfg["L_minus"], c.cfg["L_plus"], c.cfg["tol"], c.cfg["mesh"]);
    const int stride = std::max(1, c.cfg["stride"].get<int>());
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < sol.size(); i += static_cast<std::size_t>(stride))
        rows.push_back({sol.y[i], sol.u[i], sol.u_prime[i], s6v::p34_kernel_diag(sol, sol.y[i])});
    c.write_csv_and_svg("p34", {"y", "u", "u_prime", "K"}, rows, [&](const plot::Table& t) {
        return plot::from_table(t, "y", {"u", "K"}, "Painleve XXXIV solution and kernel diagonal", true);
    });
    const auto pii = s6v::p34_from_pii_crosscheck(sol);
    const double y8 = -8.0;
    ojson r = {{"newton_iterations", sol.newton_iterations},
               {"newton_residual", sol.newton_residual},
               {"ode_residual", s6v::p34_ode_residual(sol)},
               {"u_minus8_lower_defect", s6v::p34_u(sol, y8) - 4.0 + 1.0 / 512.0},
               {"K_minus8_over_16", s6v::p34_kernel_diag(sol, y8) / 16.0},
               {"pii_residual", pii.max_pii_residual},
               {"riccati_defect", pii.max_riccati_defect},
               {"riccati_drift", pii.max_riccati_drift}};
    if (sol.y.back() >= 8.0) {
        r["u_8_over_leading"] = s6v::p34_u(sol, 8.0) / s6v::p34_upper_boundary(8.0);
        r["K_8"] = s6v::p34_kernel_diag(sol, 8.0);
        r["K_8_leading_form"] = -std::sqrt(8.0) / (2.0 * s6v::kPi) * std::exp(-4.0 / 3.0 * std::pow(8.0, 1.5));
    }
    c.write_json("p34.json", r);
}

void run_equilibrium(const Context& c) {
    const double beta = c.cfg["beta"], nu = c.cfg["nu"];
    const int n = c.cfg["n"];
    auto m = s6v::make_equilibrium(beta, nu);
    const auto prof = s6v::empirical_density_oracle(nu, beta, n);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < prof.x.size(); ++i) rows.push_back({prof.x[i], s6v::density(m, prof.x[i]), prof.rho[i]});
    c.write_csv_and_svg("equilibrium", {"x", "rho", "one_point"}, rows, [&](const plot::Table& t) {
        return plot::from_table(t, "x", {"rho", "one_point"}, "band density formula vs one-point function");
    });
    const auto edges = s6v::ensemble_edges(beta, nu);
    ojson r = {{"a", m.a}, {"b", m.b}, {"mass", s6v::total_mass(m)}, {"clamp_events", m.clamps()},
               {"arccos_argument_at_a", s6v::band_density_argument(m, m.a)},
               {"arccos_argument_at_b", s6v::band_density_argument(m, m.b)},
               {"ensemble_edges", {edges.a, edges.b}}};
    try {
        const auto sc = s6v::scaling_constants(nu, beta);
        for (auto [key, edge] : {std::pair{"fit_at_a", m.a}, std::pair{"fit_at_ensemble_edge", edges.a}}) {
            try {
                const auto f = s6v::c_v_constant(prof, edge, sc, c.cfg["eps"].get<std::vector<double>>());
                r[key] = {{"exponent", f.exponent_extrapolated}, {"c0", f.c0_extrapolated}, {"c_V", f.c_V},
                          {"c_V_times_c", f.product_with_c}};
            } catch (const s6v::Error& e) {
                r[key] = e.what();
            }
        }
    } catch (const s6v::Error& e) {
        r["fit"] = e.what();
    }
    c.write_json("equilibrium.json", r);
}

void run_tails(const Context& c) {
    const int N = c.cfg["N"];
    const auto m = s6v::meixner_side(c.cfg["q"], c.cfg["u"], c.cfg["nu"], N);
    std::vector<std::vector<double>> rows;
    for (double h : c.cfg["h"]) {
        const double lq = s6v::md_log_qlaplace(m, h);
        const double sigma = s6v::md_sigma(m, h);
        const double airy = -s6v::airy_tail_integral(sigma);
        const double cubic = -std::pow(std::abs(sigma), 3) / 12.0;
        const double pred = h > 0.5 ? airy : (h < -0.5 ? cubic : std::log(s6v::tracy_widom_gue(sigma)));
        rows.push_back({h, lq, airy, cubic, std::abs(lq - pred) / std::abs(pred)});
    }
    c.write_csv_and_svg("tails", {"h", "log_qlaplace", "airy_prediction", "cubic_prediction", "rel_err"}, rows,
                        [&](const plot::Table& t) {
                            plot::Table up, lo;
                            up.header = lo.header = {"h32", "h3", "log_qlaplace", "airy_prediction", "cubic_prediction"};
                            for (const auto& r : t.rows) {
                                const double h = r[0];
                                std::vector<double> row = {std::pow(std::abs(h), 1.5), std::pow(std::abs(h), 3), r[1], r[2], r[3]};
                                (h > 0 ? up : lo).rows.push_back(row);
                            }
                            plot::Figure f;
                            f.title = "-log q-Laplace vs h^{3/2} (h>0) and |h|^3 (h<0)";
                            f.xlabel = "h^{3/2} resp. |h|^3";
                            f.ylabel = "-log value";
                            f.log_y = true;
                            for (const auto& cmt : t.comments) f.note += cmt;
                            auto add = [&](const plot::Table& tb, const char* x, const char* y, const std::string& label, bool pts) {
                                if (tb.rows.empty()) return;
                                plot::Series s;
                                s.label = label;
                                s.x = tb.values(x);
                                for (double v : tb.values(y)) s.y.push_back(-v);
                                s.points = pts;
                                f.series.push_back(std::move(s));
                            };
                            add(up, "h32", "log_qlaplace", "upper: determinant", true);
                            add(up, "h32", "airy_prediction", "upper: Airy", false);
                            add(lo, "h3", "log_qlaplace", "lower: determinant", true);
                            add(lo, "h3", "cubic_prediction", "lower: cubic", false);
                            return f;
                        });
}

int run_tw(const Context& c) {
    const auto& g = c.cfg;
    const int N = g["N"];
    if (N > 1024) throw s6v::ParameterOutOfRange("tw-clt supports N <= 1024");
    const auto t = s6v::tw_sample(g["q"], g["u"], g["nu"], N, g["samples"], g["seed"], c.threads);
    auto r = s6v::tw_clt_report(t);
    r.inputs = {{"q", g["q"]}, {"u", g["u"]}, {"nu", g["nu"]}, {"N", N}, {"samples", g["samples"]}, {"seed", g["seed"]}};
    std::map<double, long> counts;
    for (double v : t.values) ++counts[v];
    std::vector<std::vector<double>> rows;
    long acc = 0;
    for (const auto& [v, k] : counts) {
        acc += k;
        rows.push_back({v, double(acc) / double(t.values.size()), s6v::tracy_widom_gue(v)});
    }
    c.write_csv_and_svg("tw_clt", {"x", "empirical_cdf", "F_GUE"}, rows, [&](const plot::Table& tb) {
        auto f = plot::from_table(tb, "x", {"empirical_cdf", "F_GUE"}, "rescaled height vs Tracy-Widom GUE");
        f.series[0].points = true;
        return f;
    });
    return emit_reports(c, "tw_clt.json", {r});
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic six-vertex / Meixner numerical laboratory"};
    app.require_subcommand(1, 1);
    std::string config, out = ".";
    std::uint64_t seed = 0;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config, "JSON parameter block");
    app.add_option("--out", out, "output directory");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides the config)");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    std::optional<double> L_minus, L_plus, tol, mesh;
    std::string plot_csv, plot_x, plot_y, plot_title;
    bool plot_log_y = false;
    app.fallthrough();

    for (const auto& [name, schema] : schemas()) {
        auto* sub = app.add_subcommand(name, "run " + name);
        if (name == "p34") {
            sub->add_option("--L-minus", L_minus, "left end of the grid");
            sub->add_option("--L-plus", L_plus, "right end of the grid");
            sub->add_option("--tol", tol, "Newton tolerance");
            sub->add_option("--mesh", mesh, "grid spacing");
        }
    }
    auto* plot_cmd = app.add_subcommand("plot", "re-render an SVG from a CSV table");
    plot_cmd->add_option("--csv", plot_csv)->required();
    plot_cmd->add_option("--x", plot_x)->required();
    plot_cmd->add_option("--y", plot_y, "comma-separated columns")->required();
    plot_cmd->add_option("--title", plot_title);
    plot_cmd->add_flag("--log-y", plot_log_y);

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot_cmd->parsed()) {
            const auto t = plot::read_csv(plot_csv);
            std::vector<std::string> ys = plot::split(plot_y, ',');
            std::cout << plot::render(plot::from_table(t, plot_x, ys, plot_title.empty() ? fs::path(plot_csv).stem().string() : plot_title, plot_log_y));
            return 0;
        }
        Context c;
        c.sub = app.get_subcommands().front()->get_name();
        c.cfg = effective_config(c.sub, config);
        if (*seed_opt) {
            if (!c.cfg.contains("seed")) throw s6v::ConfigInvalid("--seed given but " + c.sub + " is deterministic without one");
            c.cfg["seed"] = seed;
        }
        if (c.sub == "p34") {
            if (L_minus) c.cfg["L_minus"] = *L_minus;
            if (L_plus) c.cfg["L_plus"] = *L_plus;
            if (tol) c.cfg["tol"] = *tol;
            if (mesh) c.cfg["mesh"] = *mesh;
        }
        c.threads = threads;
        c.out = out;
        fs::create_directories(c.out);
        char hex[17];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(nlohmann::json(c.cfg).dump())));
        c.hash = hex;

        if (c.sub == "simulate") run_simulate(c);
        else if (c.sub == "pmf") run_pmf(c);
        else if (c.sub == "bo-check") return run_bo(c);
        else if (c.sub == "deform-check") return run_deform(c);
        else if (c.sub == "poisson") return run_poisson(c);
        else if (c.sub == "kernels") run_kernels(c);
        else if (c.sub == "p34") run_p34(c);
        else if (c.sub == "equilibrium") run_equilibrium(c);
        else if (c.sub == "tails") run_tails(c);
        else if (c.sub == "tw-clt") return run_tw(c);
        return 0;
    } catch (const s6v::ConfigInvalid& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }
}
