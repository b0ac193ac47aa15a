#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lgt/runio.hpp"

using namespace lgt;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
constexpr int kExitStatistical = 4;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    long long cap_states = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config JSON path")->required();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "override the config seed")->each([&](const std::string&) { args.seed_set = true; });
    cmd->add_option("--threads", args.threads, "worker threads for enumeration");
    cmd->add_option("--cap-states", args.cap_states, "state cap override");
}

struct RunContext {
    RunConfig rc;
    Manifest manifest;
    fs::path out;
};

RunContext start_run(const CommonArgs& args, const std::string& subcommand) {
    RunContext ctx{parse_config(load_json_file(args.config_path)), Manifest{}, fs::path(args.out_dir)};
    if (args.seed_set) ctx.rc.sampler.seed = args.seed;
    if (args.threads > 0) ctx.rc.threads = args.threads;
    if (args.cap_states > 0) ctx.rc.cap = args.cap_states;
    fs::create_directories(ctx.out);
    ctx.manifest.subcommand = subcommand;
    ctx.manifest.config_hash = fnv1a64(read_text_file(args.config_path));
    ctx.manifest.seed = ctx.rc.sampler.seed;
    ctx.manifest.started = timestamp_now();
    json resolved = ctx.rc.raw;
    resolved["resolved_seed"] = ctx.rc.sampler.seed;
    resolved["resolved_threads"] = ctx.rc.threads;
    resolved["resolved_cap_states"] = ctx.rc.cap;
    ctx.manifest.resolved = resolved;
    return ctx;
}

void emit(RunContext& ctx, const std::string& filename, const std::string& text) {
    fs::path p = ctx.out / filename;
    write_text_file(p.string(), text);
    ctx.manifest.output_digests.push_back({filename, fnv1a64(text)});
}

void finish_run(RunContext& ctx) {
    ctx.manifest.finished = timestamp_now();
    write_text_file((ctx.out / "manifest.json").string(), ctx.manifest.to_json().dump(2) + "\n");
}

std::vector<NamedObservable> build_observables(const RunConfig& rc) {
    std::vector<NamedObservable> out;
    if (!rc.raw.contains("observables")) return out;
    for (const auto& item : rc.raw.at("observables")) out.push_back(observable_from_json(item, rc.geometry, rc.group));
    return out;
}

int cmd_simulate(const CommonArgs& args) {
    RunContext ctx = start_run(args, "simulate");
    auto observables = build_observables(ctx.rc);
    if (observables.empty()) throw std::invalid_argument("observables: at least one required for simulate");
    std::vector<Observable> fns;
    for (const auto& o : observables) fns.push_back(o.fn);
    std::vector<std::vector<cplx>> series;
    auto results = estimate_many(fns, ctx.rc.geometry, ctx.rc.group, ctx.rc.bc, ctx.rc.sampler, &series);

    std::ostringstream jsonl;
    for (size_t i = 0; i < observables.size(); ++i)
        for (size_t t = 0; t < series[i].size(); ++t) {
            json line = {{"sweep", static_cast<long>((t + 1) * static_cast<size_t>(ctx.rc.sampler.stride))},
                         {"observable", observables[i].name},
                         {"re", series[i][t].real()},
                         {"im", series[i][t].imag()}};
            jsonl << line.dump() << "\n";
        }
    emit(ctx, "results.jsonl", jsonl.str());

    std::ostringstream csv;
    csv << "observable,re_mean,im_mean,stderr_re,stderr_im,tau_int,n_eff\n";
    for (size_t i = 0; i < observables.size(); ++i) {
        const auto& r = results[i];
        double neff = r.tau_int > 0 ? r.n_samples / (2 * r.tau_int) : r.n_samples;
        csv << observables[i].name << "," << format_g17(r.mean.real()) << "," << format_g17(r.mean.imag()) << ","
            << format_g17(r.se_re) << "," << format_g17(r.se_im) << "," << format_g17(r.tau_int) << ","
            << format_g17(neff) << "\n";
    }
    emit(ctx, "summary.csv", csv.str());
    finish_run(ctx);
    return kExitOk;
}

int cmd_exact(const CommonArgs& args) {
    RunContext ctx = start_run(args, "exact");
    auto observables = build_observables(ctx.rc);
    if (observables.empty()) throw std::invalid_argument("observables: at least one required for exact");
    EnumeratedSpace space(ctx.rc.geometry, ctx.rc.group, ctx.rc.bc);
    json values = json::object();
    for (const auto& o : observables) {
        std::vector<int> window;
        for (int e : o.support)
            if (space.free_position(e) >= 0) window.push_back(e);
        WindowSums ws = exact_window_sums(space, ctx.rc.beta, window, ctx.rc.cap, ctx.rc.threads);
        // enumerate window assignments against the frame
        int n = ctx.rc.group.n;
        std::vector<int> digits(window.size(), 0);
        GaugeConfig cfg = space.config_for(std::vector<int>(static_cast<size_t>(space.digit_count()), 0));
        cplx acc = 0;
        for (size_t b = 0; b < ws.sums.size(); ++b) {
            for (size_t i = 0; i < window.size(); ++i) cfg.set(window[i], make_cyclic(ctx.rc.group, digits[i]));
            acc += o.fn(cfg) * (ws.sums[b] / ws.z);
            size_t i = 0;
            for (; i < window.size(); ++i) {
                if (++digits[i] < n) break;
                digits[i] = 0;
            }
        }
        values[o.name] = {{"re", acc.real()}, {"im", acc.imag()}};
    }
    json golden = {{"geometry", ctx.rc.geometry.describe()},
                   {"group", ctx.rc.group.name()},
                   {"beta", ctx.rc.beta},
                   {"bc", ctx.rc.raw.value("bc", json{{"mode", "free"}})},
                   {"observables", values}};
    emit(ctx, "golden.json", golden.dump(2) + "\n");
    finish_run(ctx);
    return kExitOk;
}

int cmd_wilson(const CommonArgs& args) {
    RunContext ctx = start_run(args, "wilson");
    if (!ctx.rc.raw.contains("wilson")) throw std::invalid_argument("wilson: config block missing");
    const json& w = ctx.rc.raw.at("wilson");
    Representation rep = Representation::parse(ctx.rc.group, w.value("rep", "fund"));
    auto plane = w.value("plane", std::vector<int>{0, 1});
    std::vector<int> anchor = w.value("anchor", std::vector<int>(static_cast<size_t>(ctx.rc.geometry.dim()),
                                                                 ctx.rc.geometry.lo()[0]));
    int rmax = w.value("Rmax", 2), tmax = w.value("Tmax", 2);
    std::string mode = w.value("mode", "exact");

    std::vector<WilsonTableEntry> table;
    for (int R = 1; R <= rmax; ++R)
        for (int T = 1; T <= tmax; ++T) {
            Loop loop = ctx.rc.geometry.rect_loop(plane.at(0), plane.at(1), R, T, anchor);
            WilsonTableEntry e;
            e.R = R;
            e.T = T;
            if (mode == "exact") {
                EnumeratedSpace space(ctx.rc.geometry, ctx.rc.group, ctx.rc.bc);
                cplx v = exact_wilson_expectation(space, ctx.rc.beta, loop, rep, ctx.rc.cap, ctx.rc.threads);
                e.mean = v.real();
                e.err = 0;
            } else if (mode == "mc") {
                Observable f = [loop, rep](const GaugeConfig& c) { return wilson_loop(c, loop, rep); };
                EstimateResult r = estimate(f, ctx.rc.geometry, ctx.rc.group, ctx.rc.bc, ctx.rc.sampler);
                e.mean = r.mean.real();
                e.err = r.se_re;
            } else if (mode == "table") {
                continue; // provided below
            } else {
                throw std::invalid_argument("wilson.mode: unknown '" + mode + "'");
            }
            table.push_back(e);
        }
    if (mode == "table") {
        for (const auto& row : w.at("table"))
            table.push_back(WilsonTableEntry{row.at("R").get<int>(), row.at("T").get<int>(),
                                             row.at("mean").get<double>(), row.value("err", 0.0)});
    }

    PotentialExtract fits = potential_extract(table);
    std::ostringstream csv;
    csv << "R,T,re_mean,stderr\n";
    for (const auto& e : table) csv << e.R << "," << e.T << "," << format_g17(e.mean) << "," << format_g17(e.err) << "\n";
    emit(ctx, "wilson.csv", csv.str());

    json fj;
    fj["potential"] = json::array();
    for (const auto& p : fits.potential)
        fj["potential"].push_back({{"R", p.R}, {"V", p.v}, {"err", p.err}, {"valid", p.valid}});
    fj["creutz"] = json::array();
    for (const auto& c : fits.creutz)
        fj["creutz"].push_back({{"R", c.R}, {"T", c.T}, {"chi", c.chi}, {"err", c.err}});
    fj["area_fit"] = {{"valid", fits.area_fit_valid},
                      {"sigma", fits.sigma},
                      {"sigma_err", fits.sigma_err},
                      {"perimeter", fits.perimeter},
                      {"perimeter_err", fits.perimeter_err},
                      {"constant", fits.constant}};
    fj["excluded_cells"] = fits.excluded.size();
    emit(ctx, "fits.json", fj.dump(2) + "\n");
    finish_run(ctx);
    // whole-row exclusions are a statistical insufficiency signal
    for (const auto& p : fits.potential)
        if (!p.valid) return kExitStatistical;
    return kExitOk;
}

int cmd_center_test(const CommonArgs& args) {
    RunContext ctx = start_run(args, "center-test");
    if (ctx.rc.geometry.shape() != ShapeKind::Slab) throw std::invalid_argument("center-test: needs a slab geometry");
    const json& cfg = ctx.rc.raw.value("center_test", json::object());
    std::vector<int> spatial = cfg.value("spatial", std::vector<int>(static_cast<size_t>(ctx.rc.geometry.dim() - 1), 0));
    VerticalChain chain = ctx.rc.geometry.vertical_chain_through(spatial);
    int n = ctx.rc.group.n;
    EnumeratedSpace space(ctx.rc.geometry, ctx.rc.group, ctx.rc.bc);

    json rows = json::array();
    double max_nontrivial = 0;
    double max_trivial = 0;
    for (int k = 0; k < n; ++k) {
        Representation rep = Representation::cyclic_character(ctx.rc.group, k);
        ChainVariableSpec spec{chain, rep, std::vector<std::pair<int, int>>(chain.edges.size(), {0, 0})};
        cplx v = exact_chain_expectation(space, ctx.rc.beta, spec, ctx.rc.cap, ctx.rc.threads);
        bool nontrivial = acts_nontrivially_on_center(rep);
        if (nontrivial)
            max_nontrivial = std::max(max_nontrivial, std::abs(v));
        else
            max_trivial = std::max(max_trivial, std::abs(v));
        rows.push_back({{"character", k}, {"re", v.real()}, {"im", v.imag()}, {"nontrivial_center_action", nontrivial}});
    }
    json outj = {{"chain_spatial", spatial},
                 {"results", rows},
                 {"max_abs_nontrivial", max_nontrivial},
                 {"max_abs_trivial", max_trivial}};
    emit(ctx, "center.json", outj.dump(2) + "\n");
    finish_run(ctx);
    return kExitOk;
}

int cmd_couple(const CommonArgs& args) {
    RunContext ctx = start_run(args, "couple");
    if (ctx.rc.geometry.shape() != ShapeKind::Slab) throw std::invalid_argument("couple: needs a slab geometry");
    const json& cfg = ctx.rc.raw.value("couple", json::object());
    int r = cfg.value("r", 1);
    int iterations = cfg.value("iterations", 200);
    double tol = cfg.value("tol", 1e-10);

    BoundaryCondition delta = ctx.rc.bc;
    if (delta.mode != BcMode::Fixed) throw std::invalid_argument("couple: bc must be fixed");
    BoundaryCondition delta_p;
    std::string twist = cfg.value("twist", "center");
    if (twist == "center") {
        auto centers = center_elements(ctx.rc.group);
        if (centers.size() < 2) throw std::invalid_argument("couple: group has no nontrivial center element");
        delta_p = center_twist_bc(ctx.rc.geometry, ctx.rc.group, delta, centers[1]);
    } else if (twist == "random") {
        delta_p = BoundaryCondition::fixed_random(ctx.rc.geometry, ctx.rc.group, ctx.rc.sampler.seed + 1);
        // keep the temporal faces equal
        for (int e : ctx.rc.geometry.temporal_edges()) delta_p.values[static_cast<size_t>(e)] = delta.values[static_cast<size_t>(e)];
    } else {
        throw std::invalid_argument("couple.twist: unknown '" + twist + "'");
    }

    SlabCoupling sc(ctx.rc.geometry, ctx.rc.group, ctx.rc.beta, delta, delta_p, r, ctx.rc.cap);
    auto res = sc.iterate(iterations, tol);

    json profile = json::array();
    std::ostringstream csv;
    csv << "edge,dist_to_spatial_boundary,rho\n";
    for (size_t i = 0; i < res.profile.edges.size(); ++i) {
        int e = res.profile.edges[i];
        double dist = ctx.rc.geometry.dist_to_spatial_boundary(e);
        profile.push_back({{"edge", e}, {"dist", dist}, {"rho", res.profile.rho[i]}});
        csv << e << "," << format_g17(dist) << "," << format_g17(res.profile.rho[i]) << "\n";
    }
    json outj = {{"r", r},
                 {"iterations_used", res.iterations},
                 {"converged", res.converged},
                 {"cube_count", sc.cubes().size()},
                 {"profile", profile}};
    emit(ctx, "couple.json", outj.dump(2) + "\n");
    emit(ctx, "profile.csv", csv.str());
    finish_run(ctx);
    return kExitOk;
}

int cmd_corr(const CommonArgs& args) {
    RunContext ctx = start_run(args, "corr");
    if (!ctx.rc.raw.contains("corr")) throw std::invalid_argument("corr: config block missing");
    const json& cfg = ctx.rc.raw.at("corr");
    CorrelationRequest req;
    req.f_plaquette = cfg.at("f_plaquette").get<int>();
    req.g_plaquettes = cfg.at("g_plaquettes").get<std::vector<int>>();
    CorrelationResult res = correlation_decay(req, ctx.rc.geometry, ctx.rc.group, ctx.rc.bc, ctx.rc.sampler);

    std::ostringstream csv;
    csv << "distance,cov,err\n";
    for (const auto& p : res.points)
        csv << format_g17(p.distance) << "," << format_g17(p.cov) << "," << format_g17(p.err) << "\n";
    emit(ctx, "corr.csv", csv.str());
    json fj = {{"fit_valid", res.fit_valid}, {"k1", res.k1}, {"k2", res.k2}, {"k2_err", res.k2_err},
               {"chi2", res.fit_chi2},       {"ndof", res.fit_ndof}};
    emit(ctx, "fit.json", fj.dump(2) + "\n");
    finish_run(ctx);
    if (!res.fit_valid) return kExitStatistical;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lattice gauge simulation and verification engine"};
    app.require_subcommand(1);

    CommonArgs args;
    std::map<std::string, std::function<int(const CommonArgs&)>> handlers = {
        {"simulate", cmd_simulate}, {"exact", cmd_exact},   {"wilson", cmd_wilson},
        {"center-test", cmd_center_test}, {"couple", cmd_couple}, {"corr", cmd_corr}};
    std::vector<CLI::App*> cmds;
    for (const auto& [name, fn] : handlers) {
        CLI::App* c = app.add_subcommand(name);
        add_common(c, args);
        cmds.push_back(c);
    }

    CLI11_PARSE(app, argc, argv);

    std::string chosen;
    for (CLI::App* c : cmds)
        if (c->parsed()) chosen = c->get_name();
    try {
        return handlers.at(chosen)(args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::cerr << "error: " << msg << "\n";
        if (msg.find("cap") != std::string::npos) return kExitResource;
        return kExitResource;
    }
}
