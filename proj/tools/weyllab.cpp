#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <weyllab/acceptance.hpp>
#include <weyllab/counting.hpp>
#include <weyllab/diophantine.hpp>
#include <weyllab/heat.hpp>
#include <weyllab/hyperbolic.hpp>
#include <weyllab/io.hpp>
#include <weyllab/models.hpp>
#include <weyllab/parallel.hpp>
#include <weyllab/smoothing.hpp>

using namespace weyllab;

namespace {

struct Options {
    std::string model, group, config, out, format = "csv", suite = "primary", kind, radii, window;
    std::string x, y, lambdas, tgrid;
    double lmax = 0.0, T = 0.0, a = 0.0, tmin = 0.0, tmax = 0.0;
    double Y = 10.0, M1 = 1.0, quality = 0.0, hi = 0.0, budget = 1e7;
    int steps = 0, J = 2, threads = 0;
    double cap = 5e6;
    bool laplace = false;
};

// A table of doubles plus optional string columns at the end.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(const std::vector<double>& v, const std::vector<std::string>& extra = {})
    {
        std::vector<std::string> r;
        for (double d : v) r.push_back(fmt17(d));
        r.insert(r.end(), extra.begin(), extra.end());
        rows.push_back(std::move(r));
    }
};

class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) throw ConfigError("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit_table(const Table& t, const Options& o)
{
    Output out(o.out);
    if (o.format == "json") {
        json rows = json::array();
        for (const auto& r : t.rows) {
            json row = json::array();
            for (const auto& cell : r) {
                char* end = nullptr;
                const double v = std::strtod(cell.c_str(), &end);
                if (end && *end == '\0' && !cell.empty())
                    row.push_back(number_or_null(v));
                else
                    row.push_back(cell);
            }
            rows.push_back(row);
        }
        out.stream() << json{{"columns", t.columns}, {"rows", rows}}.dump(2) << '\n';
        return;
    }
    CsvWriter w(out.stream(), t.columns);
    for (const auto& r : t.rows) w.row_strings(r);
}

void emit_json(const json& j, const Options& o)
{
    Output out(o.out);
    out.stream() << j.dump(2) << '\n';
}

Settings load_settings(const Options& o) { return o.config.empty() ? Settings{} : Settings::load(o.config); }

ManifoldModel require_model(const Options& o)
{
    if (o.model.empty()) throw ConfigError("--model is required");
    return load_model(o.model);
}

GroupPresentation require_group(const Options& o)
{
    if (o.group.empty()) throw ConfigError("--group is required");
    return load_group(o.group);
}

std::optional<Point> parse_point(const ManifoldModel& m, const std::string& s)
{
    if (s.empty()) return std::nullopt;
    const auto v = parse_list(s);
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) p(static_cast<Eigen::Index>(i)) = v[i];
    try {
        return m.point(p);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("bad point: ") + e.what());
    }
}

Complex parse_uhp(const std::string& s, Complex fallback)
{
    if (s.empty()) return fallback;
    const auto v = parse_list(s);
    if (v.size() != 2 || !(v[1] > 0.0)) throw ConfigError("hyperbolic points are given as x,y with y > 0");
    return {v[0], v[1]};
}

void require_positive(double v, const char* flag)
{
    if (!(v > 0.0)) throw ConfigError(std::string(flag) + " must be positive");
}

std::vector<double> sorted_grid(std::vector<double> g, const char* what)
{
    if (g.empty()) throw ConfigError(std::string(what) + " grid is empty");
    if (!std::is_sorted(g.begin(), g.end())) throw ConfigError(std::string(what) + " grid must be sorted");
    return g;
}

int cmd_spectrum(const Options& o)
{
    const ManifoldModel m = require_model(o);
    require_positive(o.lmax, "--lmax");
    const Spectrum s = model_spectrum(m, o.lmax, {static_cast<std::uint64_t>(o.cap), false});
    Table t{{"eigenvalue", "frequency", "multiplicity"}, {}};
    for (const auto& l : s.levels()) t.add({l.eigenvalue, l.sqrt_eigenvalue, static_cast<double>(l.multiplicity)});
    emit_table(t, o);
    return 0;
}

SeriesKind resolve_kind(const Options& o, bool remainder, bool have_x, bool have_y)
{
    if (!o.kind.empty()) return series_kind_from(o.kind);
    if (remainder) return have_x ? SeriesKind::R_x : SeriesKind::R_global;
    if (have_y) return SeriesKind::N_xy;
    return have_x ? SeriesKind::N_x : SeriesKind::N_global;
}

CountingSeries build_series(const Options& o, bool remainder)
{
    const ManifoldModel m = require_model(o);
    require_positive(o.lmax, "--lmax");
    const auto x = parse_point(m, o.x);
    const auto y = parse_point(m, o.y);
    const SeriesKind kind = resolve_kind(o, remainder, x.has_value(), y.has_value());
    const bool need_vectors = kind == SeriesKind::N_xy;
    const Spectrum s = model_spectrum(m, o.lmax, {static_cast<std::uint64_t>(o.cap), need_vectors});
    // A final grid row at lmax so the table always ends at the requested cutoff.
    return count_series(s, x, y, o.lmax, kind, {o.lmax});
}

int cmd_count(const Options& o, bool remainder)
{
    const CountingSeries cs = build_series(o, remainder);
    Table t{{"lambda", "value", "kind"}, {}};
    for (const auto& r : cs.rows) t.add({r.lambda, r.right}, {to_string(cs.kind)});
    emit_table(t, o);
    return 0;
}

int cmd_probe(const Options& o)
{
    const CountingSeries cs = build_series(o, true);
    std::optional<std::pair<double, double>> window;
    if (!o.window.empty()) {
        const auto w = parse_list(o.window);
        if (w.size() != 2) throw ConfigError("--window takes lo,hi");
        window = std::make_pair(w[0], w[1]);
    }
    const ProbeReport p = omega_probe(cs, o.a, window);
    emit_json({{"a", p.a},
               {"exponent", p.exponent},
               {"exponent_stderr", p.exponent_stderr},
               {"residual", p.residual},
               {"window", {p.window_lo, p.window_hi}},
               {"fit_points", p.fit_points},
               {"kind", to_string(cs.kind)},
               {"final_running_sup", p.running_sup.back()}},
              o);
    return 0;
}

int cmd_pretrace(const Options& o)
{
    const ManifoldModel m = require_model(o);
    if (!m.is_torus()) throw ConfigError("pretrace needs a torus model");
    const Settings st = load_settings(o);
    require_positive(o.T, "--T");
    std::vector<double> lams;
    if (!o.lambdas.empty())
        lams = sorted_grid(parse_list(o.lambdas), "lambda");
    else {
        require_positive(o.lmax, "--lmax");
        const int steps = o.steps > 0 ? o.steps : 16;
        for (int i = 1; i <= steps; ++i) lams.push_back(o.lmax * i / steps);
    }
    const int n = m.dimension();
    const auto xo = parse_point(m, o.x);
    const Point x = xo ? *xo : Point::Zero(n);
    const auto yo = parse_point(m, o.y);
    const Point y = yo ? *yo : x;
    auto qit = st.Q.find(n);
    if (qit == st.Q.end()) throw ConfigError("Q.n" + std::to_string(n) + " is not set; pass --config with a Q entry");
    const LeadingTermModel lead{n, qit->second};
    const LatticeTorus& tor = m.torus();
    auto params = [&](double lam) {
        TransformParams p;
        p.lambda = lam;
        p.T = o.T;
        if (st.psi_s_max) p.s_max = *st.psi_s_max;
        if (st.quad_tol) p.quad_tol = *st.quad_tol;
        return p;
    };
    double fmax = 0.0;
    for (double l : lams) fmax = std::max(fmax, required_frequency(params(l), n));
    const Spectrum spec = torus_spectrum(tor, fmax, {static_cast<std::uint64_t>(o.cap), true});
    // Lattice translates of y - x within distance T.
    std::vector<double> radii;
    LatticeEnumerator en(tor.basis);
    en.enumerate(y - x, o.T, [&](const std::vector<std::int64_t>&, double d2) { radii.push_back(std::sqrt(d2)); });
    Table t{{"lambda", "k_spectral", "K_geodesic", "k_tilde", "K_leading_sum"}, {}};
    for (double lam : lams) {
        const TransformParams p = params(lam);
        const double ks = k_spectral(spec, x, y, p).value;
        const double kg = K_geodesic_torus(tor, x, y, p);
        const double kt = k_tilde_spectral(spec, x, p);
        double lead_sum = 0.0;
        for (double r : radii)
            if (r > 1e-12) lead_sum += K_leading(lead, r, 1.0, p);
        t.add({lam, ks, kg, kt, lead_sum});
    }
    emit_table(t, o);
    return 0;
}

int cmd_heat(const Options& o)
{
    const ManifoldModel m = require_model(o);
    std::vector<double> ts;
    if (!o.tgrid.empty())
        ts = sorted_grid(parse_list(o.tgrid), "t");
    else {
        require_positive(o.tmin, "--tmin");
        if (!(o.tmax > o.tmin)) throw ConfigError("--tmax must exceed --tmin");
        ts = geometric_grid(o.tmin, o.tmax, static_cast<std::size_t>(o.steps > 1 ? o.steps : 16));
    }
    require_positive(o.lmax, "--lmax");
    const auto x = parse_point(m, o.x);
    const Spectrum s = model_spectrum(m, o.lmax, {static_cast<std::uint64_t>(o.cap), false});
    if (o.laplace) {
        if (!x) throw ConfigError("--laplace needs --x");
        const LaplaceReport r = laplace_remainder_check(s, *x, ts);
        emit_json({{"n", r.n},
                   {"a1", r.a1},
                   {"t", r.t},
                   {"estimate", r.estimate},
                   {"max_rel_deviation", r.max_rel_deviation},
                   {"mu_window", {r.mu_lo, r.mu_hi}},
                   {"window_sup", r.window_sup},
                   {"min_dyadic_sup", r.min_dyadic_sup}},
                  o);
        return 0;
    }
    const HeatSamples hs = heat_samples(s, x, ts);
    double resid = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> coef;
    const double span = ts.back() / ts.front();
    if (span >= 10.0 * (1.0 - 1e-12) && ts.size() >= static_cast<std::size_t>(o.J + 2)) {
        const HeatFit f = fit_heat_coefficients(hs, m.dimension(), o.J);
        resid = f.residual;
        coef = f.coefficients;
    }
    Table t{{"t", "value", "fit_residual"}, {}};
    for (std::size_t i = 0; i < hs.t.size(); ++i) t.add({hs.t[i], hs.value[i], resid});
    emit_table(t, o);
    return 0;
}

std::vector<double> T_grid(const Options& o, double lo_default)
{
    require_positive(o.T, "--T");
    const int steps = o.steps > 1 ? o.steps : 21;
    const double lo = std::min(lo_default, 0.5 * o.T);
    return linear_grid(lo, o.T, static_cast<std::size_t>(steps));
}

json fit_json(const LineFit& f)
{
    return {{"slope", f.slope}, {"intercept", f.intercept}, {"slope_stderr", f.slope_stderr}, {"residual", f.residual}, {"points", f.points}};
}

int cmd_orbit(const Options& o)
{
    const GroupPresentation G = require_group(o);
    const Complex c = G.center.value_or(Complex(0.0, 1.0));
    const Complex x = parse_uhp(o.x, c + Complex(0.0371, 0.0213) * c.imag());
    const Complex y = parse_uhp(o.y, c + Complex(-0.0193, 0.0297) * c.imag());
    OrbitOptions opt;
    opt.cap = static_cast<std::size_t>(o.cap);
    const auto grid = T_grid(o, 4.0);
    const OrbitResult orb = orbit_enumerate(G, x, y, grid.back(), opt);
    const GrowthReport g = S_growth(orb.entries, grid);
    if (o.format == "json") {
        emit_json({{"T", g.T}, {"count", g.count}, {"S", g.value}, {"S_fit", fit_json(g.value_fit)}, {"count_fit", fit_json(g.count_fit)},
                   {"ratio", g.ratio}, {"nodes", orb.nodes}, {"margin", orb.margin}},
                  o);
        return 0;
    }
    Table t{{"T", "count", "S"}, {}};
    for (std::size_t i = 0; i < g.T.size(); ++i) t.add({g.T[i], g.count[i], g.value[i]});
    emit_table(t, o);
    return 0;
}

int cmd_geodesics(const Options& o)
{
    const GroupPresentation G = require_group(o);
    OrbitOptions opt;
    opt.cap = static_cast<std::size_t>(o.cap);
    const auto grid = T_grid(o, 4.0);
    const ConjClassResult cc = conj_classes(G, grid.back(), opt);
    const GrowthReport g = geodesic_growth(cc.classes, grid);
    if (o.format == "json") {
        emit_json({{"T", g.T}, {"count", g.count}, {"geodesic_sum", g.value}, {"sum_fit", fit_json(g.value_fit)},
                   {"count_fit", fit_json(g.count_fit)}, {"ratio", g.ratio}, {"classes", cc.classes.size()}, {"flagged", cc.flagged}, {"method", cc.method}},
                  o);
        return 0;
    }
    Table t{{"T", "count", "geodesic_sum"}, {}};
    for (std::size_t i = 0; i < g.T.size(); ++i) t.add({g.T[i], g.count[i], g.value[i]});
    emit_table(t, o);
    return 0;
}

std::vector<double> read_radii(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    std::vector<double> r;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> v;
        try {
            v = parse_list(line);
        } catch (const ConfigError&) {
            if (first) {
                first = false;
                continue; // header row
            }
            throw;
        }
        first = false;
        if (!v.empty()) r.push_back(v.front());
    }
    return r;
}

int cmd_boxsearch(const Options& o)
{
    if (o.radii.empty()) throw ConfigError("--radii is required");
    AlignmentProblem p;
    p.radii = read_radii(o.radii);
    p.Y = o.Y;
    p.M1 = o.M1;
    if (o.quality > 0.0) p.quality = o.quality;
    if (o.hi > 0.0) p.interval_hi = o.hi;
    require_positive(o.budget, "--budget");
    p.budget = static_cast<std::uint64_t>(o.budget);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    const AlignmentResult r = box_search(p);
    emit_json({{"lambda", r.value}, {"quality", r.quality}, {"evaluations", r.evaluations}, {"success", r.success}}, o);
    return 0;
}

int cmd_verify(const Options& o)
{
    if (o.suite != "primary") throw ConfigError("unknown suite '" + o.suite + "'");
    json rows = json::array();
    bool all = true;
    for (const auto& c : acceptance::primary_suite()) {
        const auto r = acceptance::run_criterion(c);
        all = all && r.passed;
        if (o.format != "json") std::cerr << acceptance::format_row(r) << '\n';
        rows.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"detail", r.detail}});
    }
    if (o.format == "json")
        emit_json({{"suite", o.suite}, {"passed", all}, {"criteria", rows}}, o);
    else {
        Table t{{"id", "name", "result"}, {}};
        for (const auto& r : rows) t.rows.push_back({std::to_string(r["id"].get<int>()), r["name"], r["passed"].get<bool>() ? "pass" : "fail"});
        emit_table(t, o);
    }
    return all ? 0 : 5;
}

void error_json(const std::string& tag, const std::string& msg, int code)
{
    std::cerr << json{{"error", tag}, {"message", msg}, {"exit_code", code}}.dump() << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spectral counting, smoothed kernels, heat traces, Fuchsian orbit sums and alignment solvers"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* s) {
        s->add_option("--out", o.out, "output file (default stdout)");
        s->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        s->add_option("--threads", o.threads, "worker threads (default WEYLLAB_THREADS or hardware)");
        s->add_option("--config", o.config, "JSON config (psi.s_max, quad.tol, Q.n2, Q.n3)");
    };
    auto model_opts = [&](CLI::App* s) {
        s->add_option("--model", o.model, "model JSON file");
        s->add_option("--lmax", o.lmax, "largest frequency");
        s->add_option("--cap", o.cap, "enumeration cap");
    };

    auto* spectrum = app.add_subcommand("spectrum", "list eigenvalues with multiplicities");
    common(spectrum);
    model_opts(spectrum);

    auto* count = app.add_subcommand("count", "counting function N, N_x or N_xy");
    auto* remainder = app.add_subcommand("remainder", "Weyl remainder R, R_x or R_osc");
    auto* probe = app.add_subcommand("probe", "running-sup exponent probe of a remainder");
    for (auto* s : {count, remainder, probe}) {
        common(s);
        model_opts(s);
        s->add_option("--x", o.x, "point x (comma-separated coordinates)");
        s->add_option("--y", o.y, "point y");
        s->add_option("--kind", o.kind, "N, N_x, N_xy, R, R_x or R_osc");
    }
    probe->add_option("--a", o.a, "normalizing exponent");
    probe->add_option("--window", o.window, "fit window lo,hi");

    auto* pretrace = app.add_subcommand("pretrace", "spectral vs geodesic side of the smoothed kernel on a torus");
    common(pretrace);
    model_opts(pretrace);
    pretrace->add_option("--T", o.T, "time window");
    pretrace->add_option("--x", o.x, "point x");
    pretrace->add_option("--y", o.y, "point y");
    pretrace->add_option("--lambdas", o.lambdas, "comma-separated lambda values");
    pretrace->add_option("--steps", o.steps, "number of lambda values up to --lmax");

    auto* heat = app.add_subcommand("heat", "heat trace or diagonal heat kernel with coefficient fit");
    common(heat);
    model_opts(heat);
    heat->add_option("--x", o.x, "point x (diagonal kernel); omit for the trace");
    heat->add_option("--t", o.tgrid, "comma-separated t values");
    heat->add_option("--tmin", o.tmin, "smallest t of a geometric grid");
    heat->add_option("--tmax", o.tmax, "largest t");
    heat->add_option("--steps", o.steps, "grid size");
    heat->add_option("--J", o.J, "number of fitted terms beyond the leading one (<= 2)");
    heat->add_flag("--laplace", o.laplace, "emit the Laplace remainder report");

    auto* orbit = app.add_subcommand("orbit", "orbit counts and S_{x,y}(T) on a T grid");
    auto* geodesics = app.add_subcommand("geodesics", "primitive closed geodesics and the weighted length sum");
    for (auto* s : {orbit, geodesics}) {
        common(s);
        s->add_option("--group", o.group, "group preset JSON file");
        s->add_option("--T", o.T, "largest T");
        s->add_option("--steps", o.steps, "grid size");
        s->add_option("--cap", o.cap, "entry cap");
    }
    orbit->add_option("--x", o.x, "basepoint x as re,im");
    orbit->add_option("--y", o.y, "point y as re,im");

    auto* box = app.add_subcommand("boxsearch", "simultaneous phase alignment by verified search");
    common(box);
    box->add_option("--radii", o.radii, "CSV file with one radius per line");
    box->add_option("--Y", o.Y, "resolution; default target 1/Y");
    box->add_option("--M1", o.M1, "interval start");
    box->add_option("--quality", o.quality, "explicit target for max |e^{i lambda r} - 1|");
    box->add_option("--hi", o.hi, "interval end (default M1 Y^N)");
    box->add_option("--budget", o.budget, "objective evaluations");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    common(verify);
    verify->add_option("--suite", o.suite, "suite name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_json("config", e.what(), 2);
        return 2;
    }

    try {
        if (o.threads > 0) set_thread_count(o.threads);
        if (!o.config.empty()) (void)load_settings(o);
        if (*spectrum) return cmd_spectrum(o);
        if (*count) return cmd_count(o, false);
        if (*remainder) return cmd_count(o, true);
        if (*probe) return cmd_probe(o);
        if (*pretrace) return cmd_pretrace(o);
        if (*heat) return cmd_heat(o);
        if (*orbit) return cmd_orbit(o);
        if (*geodesics) return cmd_geodesics(o);
        if (*box) return cmd_boxsearch(o);
        if (*verify) return cmd_verify(o);
    } catch (const Error& e) {
        error_json(e.tag(), e.what(), e.exit_code());
        return e.exit_code();
    } catch (const std::exception& e) {
        error_json("internal", e.what(), 1);
        return 1;
    }
    return 0;
}
