#pragma once

// JSON schemas: system files, scenario files and report fragments. Rationals
// are always strings "p/q" in lowest terms.

#include "ergo/joinings.hpp"
#include "ergo/lattice.hpp"
#include "ergo/observable.hpp"
#include "ergo/partition.hpp"
#include "ergo/system.hpp"
#include "ergo/torus.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ergo {

using Json = nlohmann::json;

/// Parses the system-file schema: name, r, d, n, weights, generators
/// [{action, axis, perm}] with 1-based action/axis, optional labels.
/// Throws ValidationError(Malformed) on schema errors.
RawSystem raw_system_from_json(const Json& j);
Json system_to_json(const FiniteSystem& sys);

Json to_json(const Rational& q);
Json to_json(const SqrtRational& s);
Json to_json(const Observable& f);
Json to_json(const Partition& p);
/// Records {tuple, mass} in lexicographic tuple order.
Json to_json(const JoinedMeasure& jm);

Observable observable_from_json(const Json& j, std::size_t n);
Angle angle_from_json(const Json& j);
TorusSystem torus_from_json(const Json& j);
TrigObservable trig_from_json(const Json& j, std::size_t m);

struct Scenario {
    std::string name;
    std::string engine = "finite";
    std::string sha256;

    std::optional<RawSystem> system;
    std::map<std::string, Json> observables;
    std::vector<std::string> fs;
    std::vector<FolnerBox> boxes;
    std::uint64_t trials = 20;
    std::uint64_t seed = 1;
    std::size_t max_m = 1;
    std::uint64_t budget = 1'000'000;

    std::optional<TorusSystem> torus;
    std::vector<std::vector<double>> samples;
    std::vector<std::uint64_t> edges;
};

/// Loads a scenario file, or a bare system file treated as a scenario with defaults.
/// Throws ValidationError(Malformed) when the file cannot be read or parsed.
Scenario load_scenario(const std::filesystem::path& path);

/// The observables named by scenario.fs, resolved against the system.
std::vector<Observable> resolve_finite_tuple(const Scenario& sc, const FiniteSystem& sys);
std::vector<TrigObservable> resolve_trig_tuple(const Scenario& sc);

std::string sha256_hex(const std::string& bytes);

} // namespace ergo
