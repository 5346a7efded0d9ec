#include "dislocore/scenario.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <thread>

#include "dislocore/dirichlet.hpp"
#include "dislocore/errors.hpp"
#include "dislocore/minimize.hpp"

namespace dislocore {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok) throw ConfigError(where + ": unknown field '" + it.key() + "'");
    }
}

double need_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ConfigError(where + ": missing or non-numeric field '" + key + "'");
    return obj[key].get<double>();
}

Vec2 as_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(where + ": expected a [x, y] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

std::vector<Vec2> as_points(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + ": expected an array of [x, y] pairs");
    std::vector<Vec2> out;
    for (const auto& e : j) out.push_back(as_point(e, where));
    return out;
}

json point_json(Vec2 p) { return json::array({p.x, p.y}); }

json points_json(const std::vector<Vec2>& pts) {
    json a = json::array();
    for (const Vec2& p : pts) a.push_back(point_json(p));
    return a;
}

// deterministic uniform double in [0,1) from a raw 64-bit stream
double unit_double(std::uint64_t bits) { return (bits >> 11) * 0x1.0p-53; }

struct SplitMix64 {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return unit_double(next()); }
};

// --- normalization ----------------------------------------------------------

json normalize_domain(const json& in) {
    if (!in.is_object() || !in.contains("kind"))
        throw ConfigError("domain: missing field 'kind'");
    const std::string kind = in["kind"].get<std::string>();
    json d;
    d["kind"] = kind;
    if (kind == "unit_disk") {
        check_keys(in, {"kind"}, "domain");
    } else if (kind == "disk") {
        check_keys(in, {"kind", "center", "radius"}, "domain");
        d["center"] = in.contains("center") ? in["center"] : json::array({0.0, 0.0});
        as_point(d["center"], "domain.center");
        d["radius"] = need_number(in, "radius", "domain");
    } else if (kind == "ellipse") {
        check_keys(in, {"kind", "semi_axes", "samples", "center"}, "domain");
        if (!in.contains("semi_axes")) throw ConfigError("domain: missing field 'semi_axes'");
        as_point(in["semi_axes"], "domain.semi_axes");
        d["semi_axes"] = in["semi_axes"];
        d["samples"] = in.value("samples", 256);
        d["center"] = in.contains("center") ? in["center"] : json::array({0.0, 0.0});
    } else if (kind == "smooth_curve") {
        check_keys(in, {"kind", "points", "convex"}, "domain");
        if (!in.contains("points")) throw ConfigError("domain: missing field 'points'");
        as_points(in["points"], "domain.points");
        d["points"] = in["points"];
        d["convex"] = in.value("convex", true);
    } else {
        throw ConfigError("domain: unknown kind '" + kind + "'");
    }
    return d;
}

json normalize_datum(const json& in) {
    if (!in.is_object() || !in.contains("type"))
        throw ConfigError("datum: missing field 'type'");
    const std::string type = in["type"].get<std::string>();
    json d;
    d["type"] = type;
    if (type == "uniform") {
        check_keys(in, {"type"}, "datum");
    } else if (type == "table") {
        check_keys(in, {"type", "points"}, "datum");
        if (!in.contains("points")) throw ConfigError("datum: missing field 'points'");
        as_points(in["points"], "datum.points"); // (arc, value) pairs share the shape
        d["points"] = in["points"];
    } else {
        throw ConfigError("datum: unknown type '" + type + "'");
    }
    return d;
}

json normalize_spectators(const json& in) {
    json s;
    check_keys(in, {"positions", "moduli"}, "spectators");
    s["positions"] = in.contains("positions") ? in["positions"] : json::array();
    s["moduli"] = in.contains("moduli") ? in["moduli"] : json::array();
    if (as_points(s["positions"], "spectators.positions").size() != s["moduli"].size())
        throw ConfigError("spectators: positions and moduli lengths differ");
    return s;
}

json normalize_params(const std::string& mode, const json& in) {
    json p;
    if (mode == "simulate") {
        check_keys(in,
                   {"positions", "moduli", "t_max", "rel_tol", "abs_tol", "collision_radius",
                    "sample_stride", "continue_after_event"},
                   "params");
        if (!in.contains("positions") || !in.contains("moduli"))
            throw ConfigError("params: simulate requires 'positions' and 'moduli'");
        as_points(in["positions"], "params.positions");
        p["positions"] = in["positions"];
        p["moduli"] = in["moduli"];
        p["t_max"] = in.value("t_max", 1.0);
        p["rel_tol"] = in.value("rel_tol", 1e-8);
        p["abs_tol"] = in.value("abs_tol", 1e-10);
        p["collision_radius"] = in.value("collision_radius", 0.0);
        p["sample_stride"] = in.value("sample_stride", 1);
        p["continue_after_event"] = in.value("continue_after_event", false);
    } else if (mode == "verify-boundary") {
        check_keys(in, {"delta0", "gamma0", "slack_k", "spectators", "rel_tol", "abs_tol"},
                   "params");
        p["delta0"] = need_number(in, "delta0", "params");
        p["gamma0"] = need_number(in, "gamma0", "params");
        p["slack_k"] = in.value("slack_k", 1.0);
        p["spectators"] = normalize_spectators(in.value("spectators", json::object()));
        p["rel_tol"] = in.value("rel_tol", 1e-9);
        p["abs_tol"] = in.value("abs_tol", 1e-11);
    } else if (mode == "verify-pair") {
        check_keys(in, {"zeta0", "eta0", "spectators", "rel_tol", "abs_tol"}, "params");
        p["zeta0"] = need_number(in, "zeta0", "params");
        p["eta0"] = need_number(in, "eta0", "params");
        p["spectators"] = normalize_spectators(in.value("spectators", json::object()));
        p["rel_tol"] = in.value("rel_tol", 1e-9);
        p["abs_tol"] = in.value("abs_tol", 1e-11);
    } else if (mode == "green-check") {
        check_keys(in, {"pairs", "tolerance", "radius_fraction", "panels"}, "params");
        p["pairs"] = in.value("pairs", 100);
        p["tolerance"] = in.value("tolerance", 1e-6);
        p["radius_fraction"] = in.value("radius_fraction", 0.85);
        p["panels"] = in.value("panels", 256);
    } else if (mode == "minimize") {
        check_keys(in,
                   {"datum", "n", "eps", "starts", "grad_tol", "max_iters", "quadrature"},
                   "params");
        p["datum"] = normalize_datum(in.value("datum", json{{"type", "uniform"}}));
        p["n"] = in.value("n", 1);
        p["eps"] = in.contains("eps") ? in["eps"] : json(nullptr);
        p["starts"] = in.value("starts", p["n"].get<int>() == 1 ? 16 : 32);
        p["grad_tol"] = in.value("grad_tol", 1e-3);
        p["max_iters"] = in.value("max_iters", 200);
        p["quadrature"] = in.value("quadrature", "fast");
    } else if (mode == "converge") {
        check_keys(in, {"datum", "configs", "eps_list", "quadrature"}, "params");
        p["datum"] = normalize_datum(in.value("datum", json{{"type", "uniform"}}));
        if (!in.contains("configs") || !in.contains("eps_list"))
            throw ConfigError("params: converge requires 'configs' and 'eps_list'");
        for (const auto& c : in["configs"]) as_points(c, "params.configs[i]");
        p["configs"] = in["configs"];
        p["eps_list"] = in["eps_list"];
        p["quadrature"] = in.value("quadrature", "accurate");
    } else if (mode == "sweep") {
        check_keys(in,
                   {"datum", "n", "eps_list", "starts", "grad_tol", "max_iters", "quadrature",
                    "workers"},
                   "params");
        p["datum"] = normalize_datum(in.value("datum", json{{"type", "uniform"}}));
        p["n"] = in.value("n", 1);
        if (!in.contains("eps_list")) throw ConfigError("params: sweep requires 'eps_list'");
        p["eps_list"] = in["eps_list"];
        p["starts"] = in.value("starts", 8);
        p["grad_tol"] = in.value("grad_tol", 1e-3);
        p["max_iters"] = in.value("max_iters", 200);
        p["quadrature"] = in.value("quadrature", "fast");
        p["workers"] = in.value("workers", 0);
    } else {
        throw ConfigError("mode: unknown mode '" + mode + "'");
    }
    return p;
}

int pool_size(const json& params) {
    if (params.contains("workers")) {
        const int w = params["workers"].get<int>();
        if (w > 0) return w;
    }
    if (const char* env = std::getenv("DISLOCORE_THREADS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void run_pool(std::vector<std::function<void()>>& tasks, int workers) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) tasks[i]();
    };
    std::vector<std::thread> threads;
    const int extra = std::min<int>(workers, static_cast<int>(tasks.size())) - 1;
    for (int i = 0; i < extra; ++i) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
}

} // namespace

// ---------------------------------------------------------------------------
// Scenario

Scenario Scenario::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("scenario parse failure: " + std::string(e.what()));
    }
    return from_json(j);
}

Scenario Scenario::from_json(const json& in) {
    if (!in.is_object()) throw ConfigError("scenario must be a JSON object");
    check_keys(in, {"version", "mode", "seed", "domain", "green", "output", "params"},
               "scenario");
    if (!in.contains("version") || in["version"].get<int>() != 1)
        throw ConfigError("scenario: unsupported or missing 'version' (expected 1)");
    if (!in.contains("mode")) throw ConfigError("scenario: missing field 'mode'");
    if (!in.contains("domain")) throw ConfigError("scenario: missing field 'domain'");
    const std::string mode = in["mode"].get<std::string>();

    json j;
    j["version"] = 1;
    j["mode"] = mode;
    j["seed"] = in.value("seed", std::uint64_t{0});
    j["domain"] = normalize_domain(in["domain"]);
    {
        const json g = in.value("green", json::object());
        check_keys(g, {"backend", "panels"}, "green");
        json gg;
        gg["backend"] = g.value("backend", "auto");
        const std::string b = gg["backend"].get<std::string>();
        if (b != "auto" && b != "image" && b != "bie")
            throw ConfigError("green: unknown backend '" + b + "'");
        gg["panels"] = g.value("panels", 256);
        j["green"] = gg;
    }
    {
        const json o = in.value("output", json::object());
        check_keys(o, {"prefix"}, "output");
        std::string prefix = o.value("prefix", mode);
        for (char& c : prefix)
            if (c == '-') c = '_';
        j["output"] = json{{"prefix", prefix}};
    }
    j["params"] = normalize_params(mode, in.value("params", json::object()));

    // validate positivity of every referenced tolerance
    for (const char* key : {"rel_tol", "abs_tol", "tolerance", "grad_tol"})
        if (j["params"].contains(key) && !(j["params"][key].get<double>() > 0.0))
            throw ConfigError(std::string("params: '") + key + "' must be positive");

    return Scenario(std::move(j));
}

std::string Scenario::output_prefix() const {
    return j_.at("output").at("prefix").get<std::string>();
}

std::string Scenario::hash() const {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016" PRIx64, fnv1a(j_.dump()));
    return buf;
}

Domain Scenario::make_domain() const {
    const json& d = j_.at("domain");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "unit_disk") return Domain::unit_disk();
    if (kind == "disk")
        return Domain::disk(as_point(d.at("center"), "domain.center"),
                            d.at("radius").get<double>());
    if (kind == "ellipse") {
        const Vec2 ax = as_point(d.at("semi_axes"), "domain.semi_axes");
        return Domain::ellipse(ax.x, ax.y, d.at("samples").get<int>(),
                               as_point(d.at("center"), "domain.center"));
    }
    return Domain::smooth_curve(as_points(d.at("points"), "domain.points"),
                                d.at("convex").get<bool>());
}

GreenEngine Scenario::make_engine(const Domain& domain) const {
    const json& g = j_.at("green");
    const std::string backend = g.at("backend").get<std::string>();
    const int panels = g.at("panels").get<int>();
    if (backend == "image") return GreenEngine::image_form(domain);
    if (backend == "bie") return GreenEngine::boundary_integral(domain, panels);
    return GreenEngine::make(domain, panels);
}

// ---------------------------------------------------------------------------
// Writers

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::string& meta_line) {
    os << meta_line << "\n";
    const std::size_t n = traj.moduli.size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",x" << i << ",y" << i;
    os << "\n";
    for (const TrajectorySample& s : traj.samples) {
        os << fmt(s.time);
        std::vector<const Vec2*> slot(n, nullptr);
        for (std::size_t k = 0; k < s.active.size(); ++k)
            slot[static_cast<std::size_t>(s.active[k])] = &s.positions[k];
        for (std::size_t i = 0; i < n; ++i) {
            if (slot[i])
                os << "," << fmt(slot[i]->x) << "," << fmt(slot[i]->y);
            else
                os << ",nan,nan";
        }
        os << "\n";
    }
    const Event& e = traj.terminal_event;
    const char* kind = e.kind == EventKind::BoundaryCollision ? "boundary_collision"
                       : e.kind == EventKind::PairCollision   ? "pair_collision"
                       : e.kind == EventKind::Horizon         ? "horizon"
                                                              : "step_failure";
    os << "# event=" << kind << ",t=" << fmt(e.time) << ",index_a=" << e.index_a
       << ",index_b=" << e.index_b << "\n";
}

namespace {

json event_json(const Event& e) {
    const char* kind = e.kind == EventKind::BoundaryCollision ? "boundary_collision"
                       : e.kind == EventKind::PairCollision   ? "pair_collision"
                       : e.kind == EventKind::Horizon         ? "horizon"
                                                              : "step_failure";
    return json{{"kind", kind},
                {"time", e.time},
                {"index_a", e.index_a},
                {"index_b", e.index_b},
                {"location", point_json(e.location)}};
}

} // namespace

void write_events_jsonl(std::ostream& os, const Trajectory& traj, const json& meta) {
    os << json{{"record", "meta"}, {"meta", meta}}.dump() << "\n";
    for (const TrajectorySample& s : traj.samples) {
        json rec;
        rec["record"] = "sample";
        rec["t"] = s.time;
        rec["positions"] = points_json(s.positions);
        rec["active"] = s.active;
        rec["energy"] = s.energy;
        os << rec.dump() << "\n";
    }
    json fin;
    fin["record"] = "event";
    fin["event"] = event_json(traj.terminal_event);
    fin["steps"] = traj.steps;
    fin["rejections"] = traj.rejections;
    os << fin.dump() << "\n";
}

// ---------------------------------------------------------------------------
// Mode runners

namespace {

struct Ctx {
    const Scenario& sc;
    std::filesystem::path out_dir;
    json meta;

    std::ofstream open(const std::string& suffix) const {
        std::filesystem::create_directories(out_dir);
        const auto path = out_dir / (sc.output_prefix() + suffix);
        std::ofstream os(path);
        if (!os) throw Error("cannot open output file " + path.string());
        return os;
    }

    std::string csv_meta() const {
        return "# dislocore " + std::string(kToolVersion) + " scenario=" + sc.hash() +
               " mode=" + sc.mode();
    }

    void write_report(const json& body) const {
        auto os = open("_report.json");
        json rep;
        rep["meta"] = meta;
        rep["report"] = body;
        os << rep.dump(2) << "\n";
    }
};

Configuration spectators_from(const json& s) {
    Configuration c;
    c.positions = as_points(s.at("positions"), "spectators.positions");
    for (const auto& m : s.at("moduli")) c.moduli.push_back(m.get<int>());
    return c;
}

BoundaryDatum datum_from(const json& d, const Domain& dom) {
    if (d.at("type").get<std::string>() == "uniform") return BoundaryDatum::uniform(dom);
    std::vector<std::pair<double, double>> table;
    for (const auto& p : d.at("points"))
        table.emplace_back(p[0].get<double>(), p[1].get<double>());
    return BoundaryDatum::from_table(dom, table);
}

QuadOpts quad_from(const json& p) {
    const std::string q = p.value("quadrature", "fast");
    if (q == "accurate") return QuadOpts::accurate();
    if (q == "fast") return QuadOpts::fast();
    throw ConfigError("params: unknown quadrature preset '" + q + "'");
}

RunResult run_simulate(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const GreenEngine engine = ctx.sc.make_engine(dom);
    Configuration cfg;
    cfg.positions = as_points(p.at("positions"), "params.positions");
    for (const auto& m : p.at("moduli")) cfg.moduli.push_back(m.get<int>());

    IntegratorOpts opts;
    opts.t_max = p.at("t_max").get<double>();
    opts.rel_tol = p.at("rel_tol").get<double>();
    opts.abs_tol = p.at("abs_tol").get<double>();
    opts.collision_radius = p.at("collision_radius").get<double>();
    opts.sample_stride = p.at("sample_stride").get<int>();
    opts.continue_after_event = p.at("continue_after_event").get<bool>();

    const Trajectory traj = simulate(cfg, engine, opts);
    {
        auto os = ctx.open("_trajectory.csv");
        write_trajectory_csv(os, traj, ctx.csv_meta());
    }
    {
        auto os = ctx.open("_events.jsonl");
        write_events_jsonl(os, traj, ctx.meta);
    }
    json body;
    body["event"] = event_json(traj.terminal_event);
    body["steps"] = traj.steps;
    body["rejections"] = traj.rejections;
    body["samples"] = traj.samples.size();
    body["final_energy"] = traj.samples.back().energy;
    ctx.write_report(body);

    const json ev = event_json(traj.terminal_event);
    return {0, "simulate: event=" + ev["kind"].get<std::string>() +
                   " t=" + fmt6(traj.terminal_event.time)};
}

RunResult run_verify_boundary(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const GreenEngine engine = ctx.sc.make_engine(dom);
    IntegratorOpts opts;
    opts.rel_tol = p.at("rel_tol").get<double>();
    opts.abs_tol = p.at("abs_tol").get<double>();
    const BoundaryBoundReport rep = verify_boundary_bound(
        engine, p.at("delta0").get<double>(), p.at("gamma0").get<double>(),
        spectators_from(p.at("spectators")), p.at("slack_k").get<double>(), opts);

    json body;
    body["delta0"] = rep.delta0;
    body["gamma0"] = rep.gamma0;
    body["t_measured"] = rep.t_measured;
    body["t_coarse"] = rep.t_coarse;
    body["t_half"] = rep.t_half;
    body["bound"] = rep.bound;
    body["slack"] = rep.slack;
    body["ratio"] = rep.ratio;
    body["first_event_ok"] = rep.first_event_ok;
    body["within_bound"] = rep.within_bound;
    body["first_event"] = event_json(rep.first_event);
    body["initial_positions"] = points_json(rep.initial.positions);
    ctx.write_report(body);

    const std::string summary = "verify-boundary: T=" + fmt6(rep.t_measured) +
                                (rep.within_bound ? " <= " : " > ") + "bound " +
                                fmt6(rep.bound) + "*(1+" + fmt6(rep.slack - 1.0) + ") " +
                                (rep.within_bound ? "pass" : "FAIL");
    return {rep.within_bound ? 0 : 2, summary};
}

RunResult run_verify_pair(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const GreenEngine engine = ctx.sc.make_engine(dom);
    IntegratorOpts opts;
    opts.rel_tol = p.at("rel_tol").get<double>();
    opts.abs_tol = p.at("abs_tol").get<double>();
    const PairBoundReport rep =
        verify_pair_bound(engine, p.at("zeta0").get<double>(), p.at("eta0").get<double>(),
                          spectators_from(p.at("spectators")), opts);

    json body;
    body["zeta0"] = rep.zeta0;
    body["eta0"] = rep.eta0;
    body["t_measured"] = rep.t_measured;
    body["t_coarse"] = rep.t_coarse;
    body["t_half"] = rep.t_half;
    body["bound"] = rep.bound;
    body["denominator"] = rep.denominator;
    body["ratio"] = rep.ratio;
    body["first_event_ok"] = rep.first_event_ok;
    body["within_bound"] = rep.within_bound;
    body["first_event"] = event_json(rep.first_event);
    body["initial_positions"] = points_json(rep.initial.positions);
    ctx.write_report(body);

    const std::string summary = "verify-pair: T=" + fmt6(rep.t_measured) +
                                (rep.within_bound ? " <= " : " > ") + "bound " +
                                fmt6(rep.bound) + " " + (rep.within_bound ? "pass" : "FAIL");
    return {rep.within_bound ? 0 : 2, summary};
}

RunResult run_green_check(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    if (dom.kind() == DomainKind::SmoothCurve)
        throw ConfigError("green-check compares backends on disk domains");
    const GreenEngine image = GreenEngine::image_form(dom);
    const GreenEngine bie = GreenEngine::boundary_integral(dom, p.at("panels").get<int>());

    const int pairs = p.at("pairs").get<int>();
    const double frac = p.at("radius_fraction").get<double>();
    SplitMix64 rng{ctx.sc.seed() + 0x9e3779b9ull};
    auto sample_point = [&] {
        while (true) {
            const double x = 2.0 * rng.uniform() - 1.0;
            const double y = 2.0 * rng.uniform() - 1.0;
            if (x * x + y * y <= 1.0)
                return dom.center() + (frac * dom.radius()) * Vec2{x, y};
        }
    };

    double max_k_err = 0.0, max_h_err = 0.0, max_sym_err = 0.0;
    for (int s = 0; s < pairs; ++s) {
        const Vec2 x = sample_point(), y = sample_point();
        const double kb = bie.regular_part(x, y);
        max_k_err = std::max(max_k_err, std::abs(kb - image.regular_part(x, y)));
        max_sym_err = std::max(max_sym_err, std::abs(kb - bie.regular_part(y, x)));
        max_h_err = std::max(max_h_err, std::abs(bie.robin(x) - image.robin(x)));
    }
    const double tol = p.at("tolerance").get<double>();

    json body;
    body["pairs"] = pairs;
    body["panels"] = p.at("panels");
    body["max_k_error"] = max_k_err;
    body["max_robin_error"] = max_h_err;
    body["max_symmetry_error"] = max_sym_err;
    body["tolerance"] = tol;
    body["pass"] = max_k_err < tol;
    ctx.write_report(body);

    return {max_k_err < tol ? 0 : 2, "green-check: max|k_bie-k_image|=" + fmt6(max_k_err) +
                                         " tol=" + fmt6(tol) +
                                         (max_k_err < tol ? " pass" : " FAIL")};
}

json report_from(const MinimizationReport& m) {
    json r;
    r["argmin"] = points_json(m.argmin);
    r["value"] = m.value;
    r["iterations"] = m.iterations;
    r["starts_used"] = m.starts_used;
    r["interior_margin"] = m.interior_margin;
    r["converged"] = m.converged;
    r["trace"] = m.trace;
    r["start_values"] = m.start_values;
    return r;
}

RunResult run_minimize(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const BoundaryDatum datum = datum_from(p.at("datum"), dom);
    const DirichletSolver solver(dom);
    MinimizeOpts opts;
    opts.starts = p.at("starts").get<int>();
    opts.grad_tol = p.at("grad_tol").get<double>();
    opts.max_iters = p.at("max_iters").get<int>();
    opts.quadrature = quad_from(p);
    const int n = p.at("n").get<int>();

    const MinimizationReport rep =
        p.at("eps").is_null()
            ? minimize_limit(solver, datum, n, opts)
            : minimize_finite_eps(solver, datum, n, p.at("eps").get<double>(), opts);

    json body = report_from(rep);
    body["n"] = n;
    body["eps"] = p.at("eps");
    const bool pass = rep.interior_margin > 0.0 && rep.converged;
    body["pass"] = pass;
    ctx.write_report(body);
    return {pass ? 0 : 2, "minimize: value=" + fmt6(rep.value) +
                              " margin=" + fmt6(rep.interior_margin) +
                              (pass ? " pass" : " FAIL")};
}

RunResult run_converge(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const BoundaryDatum datum = datum_from(p.at("datum"), dom);
    const DirichletSolver solver(dom);
    const QuadOpts quad = quad_from(p);
    std::vector<double> eps_list;
    for (const auto& e : p.at("eps_list")) eps_list.push_back(e.get<double>());

    auto csv = ctx.open("_converge.csv");
    csv << ctx.csv_meta() << "\n";
    csv << "config,eps,f_eps,f_limit,gap\n";

    int decreasing = 0, total = 0;
    json body = json::array();
    for (std::size_t c = 0; c < p.at("configs").size(); ++c) {
        const std::vector<Vec2> centers = as_points(p.at("configs")[c], "params.configs");
        const double f_limit = limit_functional_n(solver, datum, centers, quad);
        json entry;
        entry["config"] = points_json(centers);
        entry["f_limit"] = f_limit;
        json gaps = json::array();
        bool mono = true;
        double prev_gap = std::numeric_limits<double>::infinity();
        for (double eps : eps_list) {
            const double fe = renormalized_finite_eps(solver, datum, centers, eps, quad);
            const double gap = std::abs(fe - f_limit);
            csv << c << "," << fmt(eps) << "," << fmt(fe) << "," << fmt(f_limit) << ","
                << fmt(gap) << "\n";
            gaps.push_back(json{{"eps", eps}, {"f_eps", fe}, {"gap", gap}});
            if (gap >= prev_gap) mono = false;
            prev_gap = gap;
        }
        entry["gaps"] = gaps;
        entry["decreasing"] = mono;
        body.push_back(entry);
        ++total;
        if (mono) ++decreasing;
    }
    ctx.write_report(json{{"configs", body},
                          {"decreasing", decreasing},
                          {"total", total},
                          {"pass", decreasing == total}});
    const bool pass = decreasing == total;
    return {pass ? 0 : 2, "converge: gap decreasing at " + std::to_string(decreasing) + "/" +
                              std::to_string(total) + (pass ? " pass" : " FAIL")};
}

RunResult run_sweep(const Ctx& ctx) {
    const json& p = ctx.sc.config().at("params");
    const Domain dom = ctx.sc.make_domain();
    const BoundaryDatum datum = datum_from(p.at("datum"), dom);
    const DirichletSolver solver(dom);
    MinimizeOpts opts;
    opts.starts = p.at("starts").get<int>();
    opts.grad_tol = p.at("grad_tol").get<double>();
    opts.max_iters = p.at("max_iters").get<int>();
    opts.quadrature = quad_from(p);
    const int n = p.at("n").get<int>();
    std::vector<double> eps_list;
    for (const auto& e : p.at("eps_list")) eps_list.push_back(e.get<double>());

    const int workers = pool_size(p);
    opts.parallel_starts = workers <= 1;

    const MinimizationReport limit = minimize_limit(solver, datum, n, opts);
    // TODO: warm-start each eps minimization from the previous argmin
    std::vector<MinimizationReport> reports(eps_list.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        tasks.push_back([&, i] {
            reports[i] = minimize_finite_eps(solver, datum, n, eps_list[i], opts);
        });
    run_pool(tasks, workers);

    double margin_smallest = 0.0, eps_smallest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eps_list.size(); ++i)
        if (eps_list[i] < eps_smallest) {
            eps_smallest = eps_list[i];
            margin_smallest = reports[i].interior_margin;
        }
    const double floor = 0.8 * margin_smallest;

    auto csv = ctx.open("_sweep.csv");
    csv << ctx.csv_meta() << "\n";
    csv << "eps,value,interior_margin,gap_to_limit,argmin\n";
    bool uniform = true;
    json rows = json::array();
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double gap = std::abs(reports[i].value - limit.value);
        std::string argmin;
        for (const Vec2& a : reports[i].argmin)
            argmin += (argmin.empty() ? "" : ";") + fmt(a.x) + " " + fmt(a.y);
        csv << fmt(eps_list[i]) << "," << fmt(reports[i].value) << ","
            << fmt(reports[i].interior_margin) << "," << fmt(gap) << ",\"" << argmin
            << "\"\n";
        if (reports[i].interior_margin < floor) uniform = false;
        json row = report_from(reports[i]);
        row["eps"] = eps_list[i];
        row["gap_to_limit"] = gap;
        rows.push_back(row);
    }
    json body;
    body["limit"] = report_from(limit);
    body["rows"] = rows;
    body["margin_floor"] = floor;
    body["margin_uniform"] = uniform;
    const bool pass = uniform && limit.interior_margin > 0.0;
    body["pass"] = pass;
    ctx.write_report(body);
    return {pass ? 0 : 2, "sweep: margin_floor=" + fmt6(floor) +
                              (uniform ? " uniform pass" : " non-uniform FAIL")};
}

} // namespace

RunResult run_scenario(const Scenario& scenario, const std::string& out_dir, bool quiet) {
    Ctx ctx{scenario, std::filesystem::path(out_dir), {}};
    ctx.meta = json{{"tool", "dislocore"},
                    {"version", kToolVersion},
                    {"scenario_hash", scenario.hash()},
                    {"mode", scenario.mode()},
                    {"seed", scenario.seed()}};

    const std::string mode = scenario.mode();
    RunResult result;
    if (mode == "simulate")
        result = run_simulate(ctx);
    else if (mode == "verify-boundary")
        result = run_verify_boundary(ctx);
    else if (mode == "verify-pair")
        result = run_verify_pair(ctx);
    else if (mode == "green-check")
        result = run_green_check(ctx);
    else if (mode == "minimize")
        result = run_minimize(ctx);
    else if (mode == "converge")
        result = run_converge(ctx);
    else if (mode == "sweep")
        result = run_sweep(ctx);
    else
        throw ConfigError("unknown mode '" + mode + "'");

    if (!quiet) std::cout << result.summary << "\n";
    return result;
}

} // namespace dislocore
