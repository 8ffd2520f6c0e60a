// orbitlab: reproducible experiments on floor-orbit averages, weight kernels,
// Gowers norms, and sparse pattern counts. See README.md for the command set.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "orbitlab/ergodic.hpp"
#include "orbitlab/fit.hpp"
#include "orbitlab/gowers.hpp"
#include "orbitlab/kernels.hpp"
#include "orbitlab/patterns.hpp"
#include "orbitlab/regvar.hpp"

using namespace orbitlab;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kRngDesc = "xoshiro256** seeded via splitmix64, split per cell";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt(std::int64_t v) { return std::to_string(v); }

struct Options {
    std::string func = "power:c=1.02";
    std::optional<double> c;
    std::int64_t n_min = 1 << 6;
    std::int64_t n_max = 1 << 10;
    std::string m_override;  // comma separated list
    std::uint64_t seed = 0;
    std::string out;
    std::string format = "csv";
    // command extras
    std::string in_path, x_col = "N", y_col = "value", set_path;
    std::int64_t u3_max_n = 1 << 12;
    int trials = 50;
};

struct Report {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::string command;
    json config;
    bool bare = false;  // orbit emits one integer per line in csv mode
};

void emit(const Report& rep, const Options& opt) {
    std::ostringstream body;
    if (opt.format == "json") {
        json j;
        j["meta"] = {{"version", kVersion},
                     {"command", rep.command},
                     {"seed", opt.seed},
                     {"rng", kRngDesc},
                     {"config", rep.config}};
        json rows = json::array();
        for (const auto& r : rep.rows) {
            json o;
            for (std::size_t i = 0; i < rep.columns.size(); ++i) o[rep.columns[i]] = r[i];
            rows.push_back(std::move(o));
        }
        j["rows"] = std::move(rows);
        body << j.dump(2) << "\n";
    } else {
        if (!rep.bare) {
            body << "# orbitlab " << kVersion << " command=" << rep.command << " seed=" << opt.seed
                 << " rng=" << kRngDesc << "\n";
            for (std::size_t i = 0; i < rep.columns.size(); ++i)
                body << rep.columns[i] << (i + 1 < rep.columns.size() ? "," : "\n");
        }
        for (const auto& r : rep.rows) {
            for (std::size_t i = 0; i < r.size(); ++i) body << r[i] << (i + 1 < r.size() ? "," : "\n");
        }
    }
    if (opt.out.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream f(opt.out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot open output file " + opt.out);
        f << body.str();
    }
}

RegVarFunction make_function(const Options& opt) {
    std::string spec = opt.func;
    if (opt.c && spec.rfind("xlogx", 0) != 0 && spec.find("c=") == std::string::npos)
        spec += (spec.find(':') == std::string::npos ? ":" : ",") + std::string("c=") + fmt(*opt.c);
    return parse_function_spec(spec);
}

std::vector<std::int64_t> dyadic_range(std::int64_t lo, std::int64_t hi) {
    auto pow2 = [](std::int64_t v) { return v >= 1 && (v & (v - 1)) == 0; };
    if (!pow2(lo) || !pow2(hi) || lo > hi)
        throw std::invalid_argument("--n-min/--n-max must be powers of two with n-min <= n-max");
    std::vector<std::int64_t> out;
    for (std::int64_t n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
}

std::vector<std::int64_t> parse_m_list(const std::string& s) {
    std::vector<std::int64_t> out;
    if (s.empty()) return out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const long long v = std::strtoll(item.c_str(), &end, 10);
        if (end == item.c_str() || *end != '\0' || v < 2)
            throw std::invalid_argument("--m-override: expected integers >= 2");
        out.push_back(v);
    }
    return out;
}

json config_echo(const Options& o) {
    return json{{"func", o.func}, {"n_min", o.n_min}, {"n_max", o.n_max},
                {"m_override", o.m_override}, {"format", o.format}};
}

// ---- commands ----------------------------------------------------------

void cmd_orbit(const Options& opt) {
    const auto f = make_function(opt);
    const auto orbit = floor_orbit_upto(f, opt.n_max);
    Report rep;
    rep.command = "orbit";
    rep.config = config_echo(opt);
    rep.columns = {"n"};
    rep.bare = true;
    for (auto v : orbit) rep.rows.push_back({fmt(v)});
    emit(rep, opt);
}

void cmd_kernel_decay(const Options& opt) {
    const auto f = make_function(opt);
    const auto Ns = dyadic_range(opt.n_min, opt.n_max);
    const auto Ms = parse_m_list(opt.m_override);
    const auto table = phi_table(f, Ns.back());
    Report rep;
    rep.command = "kernel-decay";
    rep.config = config_echo(opt);
    rep.columns = {"N", "c", "family", "M", "error_l1", "main_ratio", "u3_main_over_sqrtN"};
    for (std::int64_t N : Ns) {
        std::vector<std::optional<std::int64_t>> cells;
        if (Ms.empty()) cells.push_back(std::nullopt);
        else for (auto m : Ms) cells.push_back(m);
        const double ratio = main_term_ratio(f, N);
        for (const auto& m : cells) {
            const auto k = build_kernel(f, KernelParams::make(N, f.c, m), &table);
            double u3sum = std::nan("");
            if (N <= opt.u3_max_n) {
                u3sum = 0.0;
                for (const auto& s : dyadic_main_slices(k)) {
                    std::vector<cd> vals(s.values.size());
                    for (std::size_t i = 0; i < s.values.size(); ++i) vals[i] = cd{s.values[i], 0.0};
                    u3sum += gowers_norm(SignalZ(s.begin, std::move(vals)), 3);
                }
                u3sum /= std::sqrt(static_cast<double>(N));
            }
            rep.rows.push_back({fmt(N), fmt(f.c), family_name(f.family), fmt(k.params.M),
                                fmt(error_l1(k)), fmt(ratio), fmt(u3sum)});
        }
    }
    emit(rep, opt);
}

void cmd_gowers_sweep(const Options& opt) {
    Report rep;
    rep.command = "gowers-sweep";
    rep.config = config_echo(opt);
    rep.columns = {"W", "norm_s", "value", "method"};
    for (std::int64_t W : dyadic_range(opt.n_min, opt.n_max)) {
        const auto f = SignalZ::indicator(1, W);
        rep.rows.push_back({fmt(W), "2", fmt(gowers_norm(f, 2)), "fast"});
        rep.rows.push_back({fmt(W), "3", fmt(gowers_norm(f, 3)), "fast"});
        if (W <= 32) {
            rep.rows.push_back({fmt(W), "2", fmt(std::pow(u2_fourth_bruteforce(f), 0.25)), "brute"});
            rep.rows.push_back({fmt(W), "3", fmt(std::pow(u3_eighth_bruteforce(f), 0.125)), "brute"});
        }
    }
    emit(rep, opt);
}

void cmd_ratio_test(const Options& opt) {
    Report rep;
    rep.command = "ratio-test";
    rep.config = config_echo(opt);
    rep.columns = {"N", "shape", "trial", "ratio"};
    const Rng base = Rng::seeded(opt.seed);
    const char* shapes[] = {"ap3", "corner", "square"};
    for (std::int64_t N : dyadic_range(opt.n_min, opt.n_max)) {
        for (int si = 0; si < 3; ++si) {
            for (int t = 0; t < opt.trials; ++t) {
                Rng rng = base.split((static_cast<std::uint64_t>(N) << 20) ^
                                     (static_cast<std::uint64_t>(si) << 16) ^
                                     static_cast<std::uint64_t>(t));
                std::vector<cd> f3v(static_cast<std::size_t>(N));
                for (auto& z : f3v) z = cd{rng.pm1(), 0.0};
                const SignalZ f3(1, std::move(f3v), 1.0);
                double ratio = 0.0;
                if (si == 0) {
                    auto mk = [&] {
                        std::vector<cd> v(static_cast<std::size_t>(4 * N + 1));
                        for (auto& z : v) z = cd{rng.pm1(), 0.0};
                        return SignalZ(-2 * N, std::move(v), 1.0);
                    };
                    const auto f0 = mk(), f1 = mk(), f2 = mk();
                    ratio = u3_control_ratio_ap3(f0, f1, f2, f3, N);
                } else if (si == 1) {
                    const std::int64_t K = 4 * N + 1;
                    auto mk = [&] {
                        Signal2D g(-2 * N, -2 * N, K, K);
                        for (auto& z : g.values) z = cd{rng.pm1(), 0.0};
                        return g;
                    };
                    const auto g0 = mk(), g1 = mk(), g2 = mk();
                    ratio = u3_control_ratio_corner(g0, g1, g2, f3, N);
                } else {
                    auto mk = [&] {
                        std::vector<cd> v(static_cast<std::size_t>(4 * N * N + 1));
                        for (auto& z : v) z = cd{rng.pm1(), 0.0};
                        return SignalZ(-2 * N * N, std::move(v), 1.0);
                    };
                    const auto s0 = mk(), s1 = mk();
                    ratio = u3_control_ratio_square(s0, s1, f3, N);
                }
                rep.rows.push_back({fmt(N), shapes[si], fmt(static_cast<std::int64_t>(t)), fmt(ratio)});
            }
        }
    }
    emit(rep, opt);
}

IntegerSet read_integer_set(const std::string& path, std::int64_t N) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open set file " + path);
    std::vector<std::int64_t> xs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        xs.push_back(std::stoll(line));
    }
    return IntegerSet::from_elements(N, xs);
}

GridSet read_grid_set(const std::string& path, std::int64_t N) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open set file " + path);
    GridSet g = GridSet::empty(N);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("grid set rows are x,y pairs");
        const std::int64_t x = std::stoll(line.substr(0, comma));
        const std::int64_t y = std::stoll(line.substr(comma + 1));
        if (x < 1 || x > N || y < 1 || y > N)
            throw std::invalid_argument("grid set entry outside [1,N]^2");
        g.insert(x, y);
    }
    return g;
}

void push_pattern_row(Report& rep, const RegVarFunction& f, std::int64_t N, const PatternReport& r) {
    const bool d = r.decomposition.has_value();
    rep.rows.push_back({fmt(N), fmt(f.c), family_name(f.family), pattern_shape_name(r.shape),
                        fmt(r.raw_count), fmt(r.normalized),
                        d ? fmt(r.decomposition->gamma_term) : "",
                        d ? fmt(r.decomposition->p_term) : "",
                        d ? fmt(r.decomposition->error_term) : "",
                        d ? fmt(r.decomposition->residual) : ""});
}

void cmd_roth_count(const Options& opt) {
    const auto f = make_function(opt);
    const std::int64_t N = opt.n_max;
    const IntegerSet A = opt.set_path.empty() ? greedy_free_set_ap3(N, f)
                                              : read_integer_set(opt.set_path, N);
    Report rep;
    rep.command = "roth-count";
    rep.config = config_echo(opt);
    rep.columns = {"N", "c", "family", "shape", "raw_count", "normalized",
                   "gamma_term", "p_term", "error_term", "residual"};
    push_pattern_row(rep, f, N, sparse_count_decomposition(A, f));
    push_pattern_row(rep, f, N, count_ap3_full(A));
    push_pattern_row(rep, f, N, count_ap3_cyclic(A, 2 * N + 1));
    emit(rep, opt);
}

void cmd_corner_count(const Options& opt) {
    const auto f = make_function(opt);
    const std::int64_t N = opt.n_max;
    const GridSet A = opt.set_path.empty() ? greedy_free_set_corner(N, f)
                                           : read_grid_set(opt.set_path, N);
    Report rep;
    rep.command = "corner-count";
    rep.config = config_echo(opt);
    rep.columns = {"N", "c", "family", "shape", "raw_count", "normalized",
                   "gamma_term", "p_term", "error_term", "residual"};
    push_pattern_row(rep, f, N, count_corners_sparse(A, f));
    push_pattern_row(rep, f, N, count_corners_full(A));
    emit(rep, opt);
}

void cmd_ergodic_sim(const Options& opt) {
    const auto f = make_function(opt);
    Report rep;
    rep.command = "ergodic-sim";
    rep.config = config_echo(opt);
    rep.columns = {"system", "q_or_alpha", "c", "family", "orbit", "N", "re", "im",
                   "abs_err_vs_exact"};
    const auto Ns = dyadic_range(opt.n_min, opt.n_max);
    auto add = [&](const char* system, const std::string& q_or_alpha, const char* orbit,
                   std::int64_t N, cd value, cd exact) {
        rep.rows.push_back({system, q_or_alpha, fmt(f.c), family_name(f.family), orbit, fmt(N),
                            fmt(value.real()), fmt(value.imag()), fmt(std::abs(value - exact))});
    };
    for (std::int64_t q : {2, 3, 5, 7}) {
        const auto sys = FiniteSystem::cyclic(q, 1, 1);
        const auto ind = FiniteObservable::indicator_point(sys, {0, 0});
        const cd exact{1.0 / static_cast<double>(q), 0.0};
        for (std::int64_t N : Ns) {
            add("zq", fmt(q), "full", N,
                bilinear_average(sys, ind, ind, OrbitKind::Full, nullptr, N, {0, 0}), exact);
            add("zq", fmt(q), "floorh", N,
                bilinear_average(sys, ind, ind, OrbitKind::FloorH, &f, N, {0, 0}), exact);
        }
    }
    {
        const double a = std::sqrt(2.0) - 1.0;
        const TorusSystem sys{RotationCoord::irrational(a), RotationCoord::irrational(a), 0.3, 0.1};
        const TorusObservable tf{{{1, cd{1.0, 0.0}}}};
        const TorusObservable tg{{{-1, cd{1.0, 0.0}}}};
        const cd exact = bilinear_limit_exact(sys, tf, tg);
        for (std::int64_t N : Ns) {
            add("torus-resonant", fmt(a), "full", N,
                bilinear_average(sys, tf, tg, OrbitKind::Full, nullptr, N), exact);
            add("torus-resonant", fmt(a), "floorh", N,
                bilinear_average(sys, tf, tg, OrbitKind::FloorH, &f, N), exact);
        }
    }
    {
        const TorusSystem sys{RotationCoord::irrational(std::sqrt(2.0) - 1.0),
                              RotationCoord::irrational(std::sqrt(3.0) - 1.0), 0.0, 0.0};
        const TorusObservable tf{{{1, cd{1.0, 0.0}}}};
        const TorusObservable tg{{{1, cd{1.0, 0.0}}}};
        const cd exact = bilinear_limit_exact(sys, tf, tg);
        for (std::int64_t N : Ns) {
            add("torus-nonresonant", fmt(std::sqrt(2.0) - 1.0), "full", N,
                bilinear_average(sys, tf, tg, OrbitKind::Full, nullptr, N), exact);
            add("torus-nonresonant", fmt(std::sqrt(2.0) - 1.0), "floorh", N,
                bilinear_average(sys, tf, tg, OrbitKind::FloorH, &f, N), exact);
        }
    }
    emit(rep, opt);
}

void cmd_fit(const Options& opt) {
    std::ifstream in(opt.in_path);
    if (!in) throw std::invalid_argument("fit: cannot open --in file " + opt.in_path);
    std::string line;
    std::vector<std::string> header;
    std::vector<std::pair<double, double>> pts;
    int xi = -1, yi = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (header[i] == opt.x_col) xi = static_cast<int>(i);
                if (header[i] == opt.y_col) yi = static_cast<int>(i);
            }
            if (xi < 0 || yi < 0)
                throw std::invalid_argument("fit: columns not found: " + opt.x_col + "," + opt.y_col);
            continue;
        }
        pts.push_back({std::stod(cells[static_cast<std::size_t>(xi)]),
                       std::stod(cells[static_cast<std::size_t>(yi)])});
    }
    const auto r = fit_exponent(pts);
    Report rep;
    rep.command = "fit";
    rep.config = json{{"in", opt.in_path}, {"x_col", opt.x_col}, {"y_col", opt.y_col}};
    rep.columns = {"slope", "intercept", "stderr_slope", "points"};
    rep.rows.push_back({fmt(r.slope), fmt(r.intercept), fmt(r.stderr_slope), fmt(r.points)});
    emit(rep, opt);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"orbitlab: floor-orbit averages, sawtooth kernels, Gowers norms, pattern counts"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub, bool wants_func) {
        if (wants_func) {
            sub->add_option("--func", opt.func, "function spec, e.g. power:c=1.02");
            sub->add_option("--c", opt.c, "exponent c merged into --func when absent there");
        }
        sub->add_option("--n-min", opt.n_min, "smallest N (power of two)");
        sub->add_option("--n-max", opt.n_max, "largest N (power of two)");
        sub->add_option("--seed", opt.seed, "64-bit seed (default 0)");
        sub->add_option("--out", opt.out, "output path (default stdout)");
        sub->add_option("--format", opt.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
    };

    auto* orbit = app.add_subcommand("orbit", "emit N_h cap [1, n-max], one integer per line");
    add_common(orbit, true);
    auto* kd = app.add_subcommand("kernel-decay", "error_l1 / main ratio / U^3 sums over (N, M)");
    add_common(kd, true);
    kd->add_option("--m-override", opt.m_override, "comma list of M values (default: coupled M)");
    kd->add_option("--u3-max-n", opt.u3_max_n, "largest N for the U^3 column (cost is O(N^2 log N))");
    auto* gs = app.add_subcommand("gowers-sweep", "U^2/U^3 norms of interval indicators");
    add_common(gs, false);
    auto* rt = app.add_subcommand("ratio-test", "U^3-control ratios over seeded random trials");
    add_common(rt, false);
    rt->add_option("--trials", opt.trials, "trials per (N, shape), default 50");
    auto* rc = app.add_subcommand("roth-count", "3-AP counts and decomposition for a set");
    add_common(rc, true);
    rc->add_option("--set", opt.set_path, "set file, one integer per line (default: greedy)");
    auto* cc = app.add_subcommand("corner-count", "corner counts for a grid set");
    add_common(cc, true);
    cc->add_option("--set", opt.set_path, "grid set file, x,y per line (default: greedy)");
    auto* es = app.add_subcommand("ergodic-sim", "bilinear averages on the model-system matrix");
    add_common(es, true);
    auto* ft = app.add_subcommand("fit", "log-log OLS slope of a CSV column");
    add_common(ft, false);
    ft->add_option("--in", opt.in_path, "input CSV")->required();
    ft->add_option("--x-col", opt.x_col, "x column name (default N)");
    ft->add_option("--y-col", opt.y_col, "y column name (default value)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        if (cmd == "orbit") cmd_orbit(opt);
        else if (cmd == "kernel-decay") cmd_kernel_decay(opt);
        else if (cmd == "gowers-sweep") cmd_gowers_sweep(opt);
        else if (cmd == "ratio-test") cmd_ratio_test(opt);
        else if (cmd == "roth-count") cmd_roth_count(opt);
        else if (cmd == "corner-count") cmd_corner_count(opt);
        else if (cmd == "ergodic-sim") cmd_ergodic_sim(opt);
        else if (cmd == "fit") cmd_fit(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << json{{"error", {{"command", cmd}, {"type", "config"}, {"message", e.what()}}}}
                  << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << json{{"error", {{"command", cmd}, {"type", "config"}, {"message", e.what()}}}}
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", {{"command", cmd}, {"type", "numeric"}, {"message", e.what()}}}}
                  << "\n";
        return 3;
    }
    return 0;
}
