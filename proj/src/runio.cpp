#include "lgt/runio.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lgt {

uint64_t fnv1a64(const std::string& bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    return j;
}

LatticeGeometry geometry_from_json(const json& j) {
    if (!j.contains("shape")) throw std::invalid_argument("geometry.shape: missing");
    std::string shape = j.at("shape").get<std::string>();
    if (shape == "cube") {
        if (!j.contains("dim") || !j.contains("N")) throw std::invalid_argument("geometry: cube needs dim and N");
        return LatticeGeometry::cube(j.at("dim").get<int>(), j.at("N").get<int>());
    }
    if (shape == "slab") {
        if (!j.contains("dim") || !j.contains("N") || !j.contains("M"))
            throw std::invalid_argument("geometry: slab needs dim, M and N");
        return LatticeGeometry::slab(j.at("dim").get<int>(), j.at("M").get<int>(), j.at("N").get<int>());
    }
    if (shape == "grid") {
        if (!j.contains("extents")) throw std::invalid_argument("geometry: grid needs extents");
        return LatticeGeometry::box(j.at("extents").get<std::vector<int>>());
    }
    throw std::invalid_argument("geometry.shape: unknown shape '" + shape + "'");
}

BoundaryCondition bc_from_json(const json& j, const LatticeGeometry& geom, const GroupSpec& group) {
    std::string mode = j.value("mode", "free");
    if (mode == "free") return BoundaryCondition::free();
    if (mode != "fixed") throw std::invalid_argument("bc.mode: must be 'free' or 'fixed'");
    std::string pattern = j.value("pattern", "identity");
    if (pattern == "identity") return BoundaryCondition::fixed_identity(geom, group);
    if (pattern.rfind("random:", 0) == 0) {
        uint64_t seed = std::stoull(pattern.substr(7));
        return BoundaryCondition::fixed_random(geom, group, seed);
    }
    throw std::invalid_argument("bc.pattern: unknown pattern '" + pattern + "'");
}

RunConfig parse_config(const json& j) {
    RunConfig rc{j,
                 LatticeGeometry::cube(2, 1),
                 GroupSpec::cyclic(2),
                 0.0,
                 BoundaryCondition::free(),
                 SamplerParams{},
                 kDefaultStateCap,
                 1};
    if (!j.contains("schema") || j.at("schema").get<int>() != 1)
        throw std::invalid_argument("schema: missing or unsupported (expected 1)");
    if (!j.contains("geometry")) throw std::invalid_argument("geometry: missing");
    rc.geometry = geometry_from_json(j.at("geometry"));
    if (!j.contains("group")) throw std::invalid_argument("group: missing");
    rc.group = GroupSpec::parse(j.at("group").get<std::string>());
    if (!j.contains("beta")) throw std::invalid_argument("beta: missing");
    rc.beta = j.at("beta").get<double>();
    if (!std::isfinite(rc.beta)) throw std::invalid_argument("beta: must be finite");
    rc.bc = bc_from_json(j.value("bc", json{{"mode", "free"}}), rc.geometry, rc.group);
    if (j.contains("sampler")) {
        const json& s = j.at("sampler");
        std::string alg = s.value("algorithm", rc.group.is_finite() ? "heatbath" : "metropolis");
        if (alg == "heatbath")
            rc.sampler.algorithm = SamplerParams::Algorithm::HeatBath;
        else if (alg == "metropolis")
            rc.sampler.algorithm = SamplerParams::Algorithm::Metropolis;
        else
            throw std::invalid_argument("sampler.algorithm: unknown '" + alg + "'");
        rc.sampler.therm_sweeps = s.value("therm", 100);
        rc.sampler.measure_sweeps = s.value("sweeps", 1000);
        rc.sampler.stride = s.value("stride", 1);
        rc.sampler.seed = s.value("seed", 1ULL);
        rc.sampler.proposal_width = s.value("proposal_width", 0.5);
        if (rc.sampler.stride <= 0) throw std::invalid_argument("sampler.stride: must be positive");
    }
    rc.sampler.beta = rc.beta;
    if (j.contains("cap_states")) rc.cap = j.at("cap_states").get<long long>();
    if (j.contains("threads")) rc.threads = j.at("threads").get<int>();
    return rc;
}

NamedObservable observable_from_json(const json& j, const LatticeGeometry& geom, const GroupSpec& group) {
    NamedObservable out;
    std::string type = j.at("type").get<std::string>();
    out.name = j.value("name", type);
    if (type == "wilson") {
        Representation rep = Representation::parse(group, j.value("rep", "fund"));
        auto plane = j.value("plane", std::vector<int>{0, 1});
        std::vector<int> anchor = j.value("anchor", std::vector<int>(static_cast<size_t>(geom.dim()), geom.lo()[0]));
        if (anchor.size() != static_cast<size_t>(geom.dim())) throw std::invalid_argument("wilson.anchor: wrong length");
        Loop loop = geom.rect_loop(plane.at(0), plane.at(1), j.value("R", 1), j.value("T", 1), anchor);
        for (const auto& de : loop.edges) out.support.push_back(de.edge);
        out.fn = [loop, rep](const GaugeConfig& c) { return wilson_loop(c, loop, rep); };
        return out;
    }
    if (type == "plaq_trace") {
        int p = j.at("p").get<int>();
        if (p < 0 || p >= geom.plaquette_count()) throw std::invalid_argument("plaq_trace.p: out of range");
        for (const auto& de : geom.plaquette_edges(p)) out.support.push_back(de.edge);
        out.fn = [p](const GaugeConfig& c) { return cplx(plaquette_trace(c, p)); };
        return out;
    }
    if (type == "chain") {
        Representation rep = Representation::parse(group, j.value("rep", "fund"));
        std::vector<int> spatial = j.at("spatial").get<std::vector<int>>();
        VerticalChain chain = geom.vertical_chain_through(spatial);
        ChainVariableSpec spec{chain, rep, {}};
        if (j.contains("indices")) {
            for (const auto& pair : j.at("indices"))
                spec.indices.push_back({pair.at(0).get<int>(), pair.at(1).get<int>()});
        } else {
            spec.indices.assign(chain.edges.size(), {0, 0});
        }
        if (spec.indices.size() != chain.edges.size())
            throw std::invalid_argument("chain.indices: one (row,col) pair per chain edge");
        out.support = chain.edges;
        out.fn = [spec](const GaugeConfig& c) { return chain_variable(c, spec); };
        return out;
    }
    throw std::invalid_argument("observables.type: unknown '" + type + "'");
}

json Manifest::to_json() const {
    json outs = json::object();
    for (const auto& [name, digest] : output_digests) outs[name] = hex64(digest);
    return json{{"tool", "lgt"},
                {"version", "1.0.0"},
                {"subcommand", subcommand},
                {"config_hash", hex64(config_hash)},
                {"resolved", resolved},
                {"seed", seed},
                {"started", started},
                {"finished", finished},
                {"outputs", outs}};
}

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return std::string(buf);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace lgt
