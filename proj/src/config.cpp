#include "pide/config.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace pide {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586;

[[noreturn]] void fail(const std::string& ptr, const std::string& msg, const std::string& kind = "schema") {
    throw ConfigError(ptr, kind, msg);
}

std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

double number(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(ptr, "expected a finite number");
    return x;
}

int integer(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) fail(ptr, "expected an integer");
    return j.get<int>();
}

std::string text(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& ptr) {
    if (!j.is_array()) fail(ptr, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], child(ptr, i)));
    return out;
}

void allow_keys(const json& obj, const std::string& ptr, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(ptr, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items()) {
        if (!allowed.count(k)) fail(child(ptr, k), "unknown key");
    }
}

const json& require(const json& obj, const std::string& ptr, const char* key) {
    if (!obj.contains(key)) fail(child(ptr, key), "missing required key");
    return obj.at(key);
}

Block block_at(const json& j, const std::string& ptr, const TorusGrid& grid) {
    const std::string name = text(j, ptr);
    Block b;
    try {
        b = block_from_string(name);
    } catch (const Error&) {
        fail(ptr, "block must be x1, x2 or full");
    }
    if (grid.axes(b).empty()) fail(ptr, "block " + name + " has no axes on this grid", "dimension");
    return b;
}

void check_axis(int axis, int dim, const std::string& ptr) {
    if (axis < 0 || axis >= dim) fail(ptr, "axis " + std::to_string(axis) + " not on a " + std::to_string(dim) + "-d grid", "dimension");
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Function cosine(int axis, double amp, double freq, double phase) {
    return [=](const Point& x) { return amp * std::cos(kTwoPi * freq * x[axis] + phase); };
}

GridField field(const json& j, const TorusGrid& grid, std::uint64_t seed, const std::string& ptr) {
    return sample(parse_function(j, grid.dim(), seed, ptr), grid);
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::cauchy: return "cauchy";
        case Mode::ergodic_vd: return "ergodic-vd";
        case Mode::ergodic_lt: return "ergodic-lt";
        case Mode::convergence: return "convergence";
        case Mode::audit: return "audit";
        case Mode::reproduce: return "reproduce";
    }
    return "?";
}

Function parse_function(const json& spec, int dim, std::uint64_t seed, const std::string& ptr) {
    if (spec.is_number()) {
        const double c = number(spec, ptr);
        return [c](const Point&) { return c; };
    }
    if (spec.is_string()) {
        const std::string name = spec.get<std::string>();
        if (name == "zero") return [](const Point&) { return 0.0; };
        if (name.rfind("const:", 0) == 0) {
            double c = 0.0;
            try {
                std::size_t used = 0;
                c = std::stod(name.substr(6), &used);
                if (used != name.size() - 6) throw std::invalid_argument(name);
            } catch (const std::exception&) {
                fail(ptr, "malformed constant " + name);
            }
            return [c](const Point&) { return c; };
        }
        if (name == "cos1") return cosine(0, 1.0, 1.0, 0.0);
        if (name == "cos2") {
            check_axis(1, dim, ptr);
            return cosine(1, 1.0, 1.0, 0.0);
        }
        if (name == "cos2d") {
            check_axis(1, dim, ptr);
            return [](const Point& x) { return std::cos(kTwoPi * x[0]) * std::cos(kTwoPi * x[1]); };
        }
        if (name == "shifted-cos") return [](const Point& x) { return 1.0 + 0.5 * std::cos(kTwoPi * x[0]); };
        if (name == "bump") {
            return [dim](const Point& x) {
                double s = 0.0;
                for (int a = 0; a < dim; ++a) {
                    const double t = std::sin(0.5 * kTwoPi * x[a]);
                    s += t * t;
                }
                return std::exp(-s / 0.05);
            };
        }
        fail(ptr, "unknown primitive " + name);
    }
    if (!spec.is_object() || spec.size() != 1) fail(ptr, "expected a number, a primitive name or a one-key object");
    const auto& [key, body] = *spec.items().begin();
    const std::string p = child(ptr, key);
    if (key == "const") {
        const double c = number(body, p);
        return [c](const Point&) { return c; };
    }
    if (key == "cos") {
        allow_keys(body, p, {"axis", "amp", "freq", "phase"});
        const int axis = body.contains("axis") ? integer(body["axis"], child(p, "axis")) : 0;
        check_axis(axis, dim, child(p, "axis"));
        return cosine(axis, body.contains("amp") ? number(body["amp"], child(p, "amp")) : 1.0,
                      body.contains("freq") ? number(body["freq"], child(p, "freq")) : 1.0,
                      body.contains("phase") ? number(body["phase"], child(p, "phase")) : 0.0);
    }
    if (key == "pos-sin") {
        allow_keys(body, p, {"axis", "power", "sign"});
        const int axis = body.contains("axis") ? integer(body["axis"], child(p, "axis")) : 0;
        check_axis(axis, dim, child(p, "axis"));
        const double power = body.contains("power") ? number(body["power"], child(p, "power")) : 1.0;
        const double sign = body.contains("sign") ? number(body["sign"], child(p, "sign")) : 1.0;
        if (!(power > 0.0)) fail(child(p, "power"), "power must be positive");
        if (sign != 1.0 && sign != -1.0) fail(child(p, "sign"), "sign must be 1 or -1");
        return [=](const Point& x) {
            const double s = sign * std::sin(kTwoPi * x[axis]);
            return s > 0.0 ? std::pow(s, power) : 0.0;
        };
    }
    if (key == "sum" || key == "product") {
        if (!body.is_array() || body.empty()) fail(p, "expected a non-empty array");
        std::vector<Function> parts;
        for (std::size_t i = 0; i < body.size(); ++i) parts.push_back(parse_function(body[i], dim, seed, child(p, i)));
        if (key == "sum") {
            return [parts](const Point& x) {
                double s = 0.0;
                for (const auto& f : parts) s += f(x);
                return s;
            };
        }
        return [parts](const Point& x) {
            double s = 1.0;
            for (const auto& f : parts) s *= f(x);
            return s;
        };
    }
    if (key == "random-smooth") {
        allow_keys(body, p, {"modes", "amp", "seed"});
        const int modes = body.contains("modes") ? integer(body["modes"], child(p, "modes")) : 3;
        const double amp = body.contains("amp") ? number(body["amp"], child(p, "amp")) : 1.0;
        if (modes < 1 || modes > 16) fail(child(p, "modes"), "modes must lie in [1, 16]");
        const std::uint64_t s = body.contains("seed") ? body["seed"].get<std::uint64_t>() : seed;
        std::mt19937_64 rng(splitmix(s));
        struct Mode_ { int k0, k1; double c, phase; };
        std::vector<Mode_> terms;
        const int k1max = dim == 2 ? modes : 0;
        for (int k0 = -modes; k0 <= modes; ++k0) {
            for (int k1 = -k1max; k1 <= k1max; ++k1) {
                if (k0 < 0 || (k0 == 0 && k1 <= 0)) continue;
                const double c = (2.0 * unit(rng) - 1.0) / (1.0 + k0 * k0 + k1 * k1);
                terms.push_back({k0, k1, amp * c, kTwoPi * unit(rng)});
            }
        }
        return [terms](const Point& x) {
            double s = 0.0;
            for (const auto& t : terms) s += t.c * std::cos(kTwoPi * (t.k0 * x[0] + t.k1 * x[1]) + t.phase);
            return s;
        };
    }
    if (key == "noise") {
        allow_keys(body, p, {"amp", "seed"});
        const double amp = body.contains("amp") ? number(body["amp"], child(p, "amp")) : 1.0;
        const std::uint64_t s = body.contains("seed") ? body["seed"].get<std::uint64_t>() : seed;
        return [amp, s](const Point& x) {
            const auto i0 = static_cast<std::uint64_t>(std::llround(x[0] * 1048576.0));
            const auto i1 = static_cast<std::uint64_t>(std::llround(x[1] * 1048576.0));
            const std::uint64_t r = splitmix(splitmix(s ^ i0) ^ (i1 << 21));
            return amp * (2.0 * (static_cast<double>(r >> 11) * 0x1.0p-53) - 1.0);
        };
    }
    fail(p, "unknown function form " + key);
}

ExperimentConfig parse_config(const std::string& text_doc) {
    json doc;
    try {
        doc = json::parse(text_doc);
    } catch (const json::parse_error& e) {
        fail("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig parse_config(const json& doc) {
    allow_keys(doc, "", {"description", "grid", "local", "nonlocal", "gradient", "f", "H_exponent", "mode", "T",
                         "window", "delta_schedule", "tol", "max_iter", "snapshot_times", "u0", "example_id", "seed",
                         "output_dir", "audit"});
    const std::string mode_name = text(require(doc, "", "mode"), "/mode");
    std::optional<Mode> mode;
    for (Mode m : {Mode::cauchy, Mode::ergodic_vd, Mode::ergodic_lt, Mode::convergence, Mode::audit, Mode::reproduce}) {
        if (to_string(m) == mode_name) mode = m;
    }
    if (!mode) fail("/mode", "unknown mode " + mode_name);

    if (*mode == Mode::reproduce) {
        allow_keys(doc, "", {"description", "mode", "example_id", "output_dir", "seed", "tol"});
        ExperimentConfig cfg(make_grid(0, 1, 8));
        cfg.source = doc;
        cfg.mode = Mode::reproduce;
        cfg.example_id = text(require(doc, "", "example_id"), "/example_id");
        if (doc.contains("output_dir")) cfg.output_dir = text(doc["output_dir"], "/output_dir");
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        return cfg;
    }

    const json& g = require(doc, "", "grid");
    allow_keys(g, "/grid", {"d1", "d2", "n"});
    const int d1 = integer(require(g, "/grid", "d1"), "/grid/d1");
    const int d2 = integer(require(g, "/grid", "d2"), "/grid/d2");
    const int n = g.contains("n") ? integer(g["n"], "/grid/n") : 64;
    std::optional<TorusGrid> grid;
    try {
        grid = make_grid(d1, d2, n);
    } catch (const Error& e) {
        fail("/grid", e.what(), "dimension");
    }

    ExperimentConfig cfg(*grid);
    cfg.source = doc;
    cfg.mode = *mode;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) fail("/seed", "expected a non-negative integer");
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    auto& prob = cfg.problem;

    if (doc.contains("local")) {
        const json& arr = doc["local"];
        if (!arr.is_array()) fail("/local", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = child("/local", i);
            allow_keys(arr[i], p, {"block", "a"});
            const Block b = block_at(require(arr[i], p, "block"), child(p, "block"), *grid);
            GridField a = arr[i].contains("a") ? field(arr[i]["a"], *grid, cfg.seed, child(p, "a")) : GridField(*grid, 1.0);
            if (min_value(a) < 0.0) fail(child(p, "a"), "coefficient a must be nonnegative");
            prob.local_terms.push_back({b, std::move(a)});
        }
    }
    if (doc.contains("nonlocal")) {
        const json& arr = doc["nonlocal"];
        if (!arr.is_array()) fail("/nonlocal", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = child("/nonlocal", i);
            allow_keys(arr[i], p, {"block", "beta", "discretization", "normalization", "jump", "truncation_radius", "inner_cut"});
            NonlocalOperatorSpec spec;
            std::optional<Function> alpha;
            spec.block = block_at(require(arr[i], p, "block"), child(p, "block"), *grid);
            spec.measure.beta = number(require(arr[i], p, "beta"), child(p, "beta"));
            if (!(spec.measure.beta > 1.0 && spec.measure.beta < 2.0)) {
                fail(child(p, "beta"), "beta must lie in (1, 2)", "beta-out-of-range");
            }
            spec.measure.block_dim = static_cast<int>(grid->axes(spec.block).size());
            if (arr[i].contains("discretization")) {
                const std::string d = text(arr[i]["discretization"], child(p, "discretization"));
                if (d == "spectral") spec.discretization = Discretization::spectral;
                else if (d == "quadrature") spec.discretization = Discretization::quadrature;
                else fail(child(p, "discretization"), "expected spectral or quadrature");
            }
            if (arr[i].contains("normalization")) {
                const std::string d = text(arr[i]["normalization"], child(p, "normalization"));
                if (d == "normalized") spec.normalization = Normalization::normalized_multiplier;
                else if (d == "raw") spec.normalization = Normalization::raw_kernel;
                else fail(child(p, "normalization"), "expected normalized or raw");
            }
            if (spec.discretization == Discretization::quadrature && spec.measure.block_dim != 1) {
                fail(child(p, "block"), "quadrature needs a one-dimensional block", "dimension");
            }
            if (arr[i].contains("jump")) {
                const json& j = arr[i]["jump"];
                const std::string jp = child(p, "jump");
                if (j.is_string() && j.get<std::string>() == "identity") {
                    spec.jump = JumpFunctionSpec::identity();
                } else if (j.is_object() && j.size() == 1 && j.contains("scaled")) {
                    if (spec.discretization != Discretization::quadrature) {
                        fail(jp, "scaled jumps need the quadrature discretization");
                    }
                    Function a2f = parse_function(j["scaled"], grid->dim(), cfg.seed, child(jp, "scaled"));
                    GridField a2 = sample(a2f, *grid);
                    if (min_value(a2) < 0.0) fail(child(jp, "scaled"), "a2 must be nonnegative");
                    spec.jump = JumpFunctionSpec::scaled(std::move(a2));
                    const double beta = spec.measure.beta;
                    alpha = [a2f, beta](const Point& x) { return std::pow(std::max(a2f(x), 0.0), 1.0 / beta); };
                } else {
                    fail(jp, "expected \"identity\" or {\"scaled\": <function>}");
                }
            }
            if (arr[i].contains("truncation_radius")) {
                spec.truncation_radius = number(arr[i]["truncation_radius"], child(p, "truncation_radius"));
                if (!(spec.truncation_radius > 0.0)) fail(child(p, "truncation_radius"), "must be positive");
            }
            if (arr[i].contains("inner_cut")) {
                spec.inner_cut = number(arr[i]["inner_cut"], child(p, "inner_cut"));
                if (!(spec.inner_cut > 0.0)) fail(child(p, "inner_cut"), "must be positive");
            }
            prob.nonlocal_terms.push_back(std::move(spec));
            cfg.jump_alpha.push_back(std::move(alpha));
        }
    }
    double full_k = 0.0;
    if (doc.contains("gradient")) {
        const json& arr = doc["gradient"];
        if (!arr.is_array()) fail("/gradient", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = child("/gradient", i);
            allow_keys(arr[i], p, {"block", "b", "k"});
            const Block b = block_at(require(arr[i], p, "block"), child(p, "block"), *grid);
            GridField coeff = arr[i].contains("b") ? field(arr[i]["b"], *grid, cfg.seed, child(p, "b")) : GridField(*grid, 1.0);
            const double k = arr[i].contains("k") ? number(arr[i]["k"], child(p, "k")) : 1.0;
            if (k < 0.0) fail(child(p, "k"), "k must be nonnegative");
            if (b == Block::full || grid->dim() == 1) full_k = k;
            prob.gradient_terms.push_back({b, std::move(coeff), k});
        }
    }
    prob.f = field(require(doc, "", "f"), *grid, cfg.seed, "/f");
    prob.hamiltonian_exponent = doc.contains("H_exponent") ? number(doc["H_exponent"], "/H_exponent")
                                                           : (full_k > 0.0 ? full_k : 1.0);
    if (!(prob.hamiltonian_exponent > 0.0)) fail("/H_exponent", "must be positive");
    try {
        validate(prob);
    } catch (const Error& e) {
        fail("", e.what(), "degenerate");
    }

    if (doc.contains("T")) cfg.T = number(doc["T"], "/T");
    if (!(cfg.T > 0.0)) fail("/T", "T must be positive");
    if (doc.contains("window")) {
        cfg.window = number(doc["window"], "/window");
        if (!(cfg.window > 0.0)) fail("/window", "window must be positive");
    }
    if (cfg.mode == Mode::ergodic_lt) {
        const double w = cfg.window > 0.0 ? cfg.window : std::max(1.0, cfg.T / 8.0);
        if (!(cfg.T >= 4.0 * w)) fail("/T", "long-time extraction needs T >= 4 window");
    }
    if (doc.contains("delta_schedule")) cfg.delta_schedule = numbers(doc["delta_schedule"], "/delta_schedule");
    if (cfg.mode == Mode::ergodic_vd || cfg.mode == Mode::convergence) {
        if (cfg.delta_schedule.size() < 3) fail("/delta_schedule", "needs at least three deltas");
        for (std::size_t i = 0; i < cfg.delta_schedule.size(); ++i) {
            if (!(cfg.delta_schedule[i] > 0.0) || (i > 0 && !(cfg.delta_schedule[i] < cfg.delta_schedule[i - 1]))) {
                fail(child("/delta_schedule", i), "deltas must be positive and decreasing");
            }
        }
    }
    if (doc.contains("tol")) cfg.tol = number(doc["tol"], "/tol");
    if (!(cfg.tol > 0.0)) fail("/tol", "tolerance must be positive");
    if (doc.contains("max_iter")) {
        if (!doc["max_iter"].is_number_unsigned() || doc["max_iter"].get<std::size_t>() == 0) {
            fail("/max_iter", "expected a positive integer");
        }
        cfg.max_iter = doc["max_iter"].get<std::size_t>();
    }
    if (doc.contains("snapshot_times")) {
        cfg.snapshot_times = numbers(doc["snapshot_times"], "/snapshot_times");
        for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
            const double s = cfg.snapshot_times[i];
            if (!(s >= 0.0 && s <= cfg.T) || (i > 0 && !(s > cfg.snapshot_times[i - 1]))) {
                fail(child("/snapshot_times", i), "snapshot times must increase within [0, T]");
            }
        }
    } else {
        cfg.snapshot_times.push_back(0.0);
        for (int k = 1; k <= 20; ++k) cfg.snapshot_times.push_back(cfg.T * k / 20.0);
        cfg.snapshot_times.back() = cfg.T;
    }
    if (doc.contains("u0")) cfg.u0 = field(doc["u0"], *grid, cfg.seed, "/u0");
    if (doc.contains("example_id")) cfg.example_id = text(doc["example_id"], "/example_id");
    if (doc.contains("output_dir")) cfg.output_dir = text(doc["output_dir"], "/output_dir");
    if (doc.contains("audit")) {
        const json& a = doc["audit"];
        allow_keys(a, "/audit", {"betas", "deltas"});
        if (a.contains("betas")) {
            cfg.audit_betas = numbers(a["betas"], "/audit/betas");
            for (std::size_t i = 0; i < cfg.audit_betas.size(); ++i) {
                const double b = cfg.audit_betas[i];
                if (!(b > 1.0 && b < 2.0)) fail(child("/audit/betas", i), "beta must lie in (1, 2)", "beta-out-of-range");
            }
        }
        if (a.contains("deltas")) cfg.audit_deltas = numbers(a["deltas"], "/audit/deltas");
    }
    return cfg;
}

}  // namespace pide
