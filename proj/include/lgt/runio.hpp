#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lgt/coupling.hpp"
#include "lgt/observables.hpp"

namespace lgt {

using json = nlohmann::json;

// stable 64-bit content hash for manifests and golden comparisons
uint64_t fnv1a64(const std::string& bytes);
std::string hex64(uint64_t v);

// 17 significant digits, '.' decimal, no locale
std::string format_g17(double v);

struct RunConfig {
    json raw;
    LatticeGeometry geometry;
    GroupSpec group;
    double beta = 0;
    BoundaryCondition bc;
    SamplerParams sampler;
    long long cap = kDefaultStateCap;
    int threads = 1;
};

// throws std::invalid_argument with a key path on schema violations
RunConfig parse_config(const json& j);
json load_json_file(const std::string& path);

LatticeGeometry geometry_from_json(const json& j);
BoundaryCondition bc_from_json(const json& j, const LatticeGeometry& geom, const GroupSpec& group);

struct NamedObservable {
    std::string name;
    Observable fn;
    std::vector<int> support; // edges, for exact windowed evaluation
};
NamedObservable observable_from_json(const json& j, const LatticeGeometry& geom, const GroupSpec& group);

struct Manifest {
    std::string subcommand;
    uint64_t config_hash = 0;
    json resolved;
    uint64_t seed = 0;
    std::string started, finished;
    std::vector<std::pair<std::string, uint64_t>> output_digests;

    json to_json() const;
};
std::string timestamp_now();
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace lgt
