#include "ergo/io.hpp"

#include "ergo/error.hpp"

#include <openssl/sha.h>

#include <fstream>
#include <sstream>

namespace ergo {

namespace {

ValidationError malformed(const std::string& msg)
{
    return ValidationError(ValidationError::Kind::Malformed, msg);
}

Rational rational_from_json(const Json& j)
{
    try {
        if (j.is_string())
            return parse_rational(j.get<std::string>());
        if (j.is_number_integer())
            return Rational(j.get<long>());
    } catch (const std::invalid_argument& e) {
        throw malformed(e.what());
    }
    throw malformed("expected a rational string \"p/q\", got " + j.dump());
}

template <class T>
T field(const Json& j, const char* key)
{
    if (!j.contains(key))
        throw malformed(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception& e) {
        throw malformed(std::string("field '") + key + "': " + e.what());
    }
}

} // namespace

RawSystem raw_system_from_json(const Json& j)
{
    if (!j.is_object())
        throw malformed("system must be an object");
    RawSystem raw;
    raw.name = j.value("name", std::string("unnamed"));
    raw.r = field<std::size_t>(j, "r");
    raw.d = field<std::size_t>(j, "d");
    raw.n = field<std::size_t>(j, "n");
    for (const auto& w : field<Json>(j, "weights"))
        raw.weights.push_back(rational_from_json(w));
    for (const auto& g : field<Json>(j, "generators")) {
        auto action = field<std::size_t>(g, "action");
        auto axis = field<std::size_t>(g, "axis");
        if (action == 0 || axis == 0)
            throw malformed("generator action and axis are 1-based");
        raw.generators.push_back({action - 1, axis - 1, field<std::vector<State>>(g, "perm")});
    }
    if (j.contains("labels"))
        raw.labels = field<std::vector<std::string>>(j, "labels");
    return raw;
}

Json system_to_json(const FiniteSystem& sys)
{
    Json j;
    j["name"] = sys.name();
    j["r"] = sys.r();
    j["d"] = sys.d();
    j["n"] = sys.n();
    Json w = Json::array();
    for (const auto& x : sys.weights())
        w.push_back(to_string(x));
    j["weights"] = w;
    Json gens = Json::array();
    for (std::size_t i = 0; i < sys.d(); ++i)
        for (std::size_t a = 0; a < sys.r(); ++a)
            gens.push_back({{"action", i + 1}, {"axis", a + 1}, {"perm", sys.generator(i, a).image()}});
    j["generators"] = gens;
    if (!sys.labels().empty())
        j["labels"] = sys.labels();
    return j;
}

Json to_json(const Rational& q)
{
    return to_string(q);
}

Json to_json(const SqrtRational& s)
{
    return s.to_string();
}

Json to_json(const Observable& f)
{
    Json a = Json::array();
    for (const auto& v : f.values())
        a.push_back(to_string(v));
    return a;
}

Json to_json(const Partition& p)
{
    Json a = Json::array();
    for (const auto& c : p.cells())
        a.push_back(c);
    return a;
}

Json to_json(const JoinedMeasure& jm)
{
    Json a = Json::array();
    for (std::size_t k = 0; k < jm.support().size(); ++k)
        a.push_back({{"tuple", jm.support()[k]}, {"mass", to_string(jm.masses()[k])}});
    return a;
}

Observable observable_from_json(const Json& j, std::size_t n)
{
    if (!j.is_array() || j.size() != n)
        throw malformed("observable must be an array of " + std::to_string(n) + " rationals");
    std::vector<Rational> v;
    for (const auto& x : j)
        v.push_back(rational_from_json(x));
    return Observable(std::move(v));
}

Angle angle_from_json(const Json& j)
{
    if (j.is_string() || j.is_number_integer())
        return Angle::rational(rational_from_json(j));
    if (j.is_number_float())
        return Angle::opaque(j.get<double>());
    if (!j.is_object())
        throw malformed("rotation entry must be a rational string, a number or an object");
    Angle a;
    if (j.contains("rational"))
        a += Angle::rational(rational_from_json(j.at("rational")));
    if (j.contains("symbol"))
        a += Angle::symbol(field<std::string>(j, "symbol"),
                           j.contains("coeff") ? rational_from_json(j.at("coeff")) : Rational(1));
    if (j.contains("symbols"))
        for (const auto& [name, c] : j.at("symbols").items()) {
            if (!Angle::is_known_symbol(name))
                throw malformed("unknown irrational symbol '" + name + "'");
            a += Angle::symbol(name, rational_from_json(c));
        }
    return a;
}

TorusSystem torus_from_json(const Json& j)
{
    auto m = field<std::size_t>(j, "m");
    auto r = field<std::size_t>(j, "r");
    auto d = field<std::size_t>(j, "d");
    std::vector<std::vector<Angle>> rot(r * d);
    std::vector<bool> seen(r * d, false);
    for (const auto& g : field<Json>(j, "rotations")) {
        auto action = field<std::size_t>(g, "action");
        auto axis = field<std::size_t>(g, "axis");
        if (action == 0 || axis == 0 || action > d || axis > r)
            throw malformed("rotation index out of range");
        std::size_t slot = (action - 1) * r + (axis - 1);
        if (seen[slot])
            throw malformed("duplicate rotation entry");
        seen[slot] = true;
        for (const auto& e : field<Json>(g, "vector"))
            rot[slot].push_back(angle_from_json(e));
    }
    try {
        return make_torus_system(m, r, d, std::move(rot));
    } catch (const DimensionMismatch& e) {
        throw malformed(e.what());
    }
}

TrigObservable trig_from_json(const Json& j, std::size_t m)
{
    if (!j.is_array())
        throw malformed("trig observable must be an array of terms");
    std::vector<TrigTerm> terms;
    for (const auto& t : j) {
        auto k = field<std::vector<std::int64_t>>(t, "k");
        if (k.size() != m)
            throw malformed("frequency vector length differs from the torus dimension");
        terms.push_back({std::move(k), {t.value("re", 0.0), t.value("im", 0.0)}});
    }
    return TrigObservable(m, std::move(terms));
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[SHA256_DIGEST_LENGTH];
    SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned char c : digest) {
        out += hex[c >> 4];
        out += hex[c & 15];
    }
    return out;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw malformed("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();

    Json j;
    try {
        j = Json::parse(bytes);
    } catch (const Json::parse_error& e) {
        throw malformed("scenario is not valid JSON: " + std::string(e.what()));
    }

    Scenario sc;
    sc.sha256 = sha256_hex(bytes);
    if (j.contains("generators")) {
        sc.system = raw_system_from_json(j);
        sc.name = sc.system->name;
        return sc;
    }

    sc.name = j.value("name", path.stem().string());
    sc.engine = j.value("engine", std::string("finite"));
    if (sc.engine != "finite" && sc.engine != "torus")
        throw malformed("engine must be \"finite\" or \"torus\"");

    if (j.contains("system")) {
        const Json& s = j.at("system");
        if (s.is_string()) {
            auto sys_path = path.parent_path() / s.get<std::string>();
            std::ifstream sin(sys_path);
            if (!sin)
                throw malformed("cannot open system file '" + sys_path.string() + "'");
            try {
                sc.system = raw_system_from_json(Json::parse(sin));
            } catch (const Json::parse_error& e) {
                throw malformed("system file is not valid JSON: " + std::string(e.what()));
            }
        } else {
            sc.system = raw_system_from_json(s);
        }
    }
    if (j.contains("torus"))
        sc.torus = torus_from_json(j.at("torus"));
    if (sc.engine == "finite" && !sc.system)
        throw malformed("finite scenario without a system");
    if (sc.engine == "torus" && !sc.torus)
        throw malformed("torus scenario without a torus section");

    if (j.contains("observables"))
        for (const auto& [name, v] : j.at("observables").items())
            sc.observables[name] = v;
    if (j.contains("fs"))
        sc.fs = field<std::vector<std::string>>(j, "fs");
    if (j.contains("boxes"))
        for (const auto& b : j.at("boxes")) {
            FolnerBox box{field<std::vector<std::uint64_t>>(b, "N"), {}};
            box.base = b.contains("base") ? field<std::vector<std::int64_t>>(b, "base")
                                          : std::vector<std::int64_t>(box.lengths.size(), 0);
            sc.boxes.push_back(std::move(box));
        }
    if (j.contains("base_point_trials")) {
        const Json& t = j.at("base_point_trials");
        sc.trials = t.value("count", sc.trials);
        sc.seed = t.value("seed", sc.seed);
    }
    if (j.contains("options")) {
        const Json& o = j.at("options");
        sc.max_m = o.value("max_m", sc.max_m);
        sc.budget = o.value("budget", sc.budget);
    }
    if (j.contains("samples"))
        sc.samples = field<std::vector<std::vector<double>>>(j, "samples");
    if (j.contains("edges"))
        sc.edges = field<std::vector<std::uint64_t>>(j, "edges");
    return sc;
}

std::vector<Observable> resolve_finite_tuple(const Scenario& sc, const FiniteSystem& sys)
{
    std::vector<Observable> fs;
    if (sc.fs.empty()) {
        for (std::size_t i = 0; i < sys.d(); ++i)
            fs.push_back(Observable::constant(sys.n(), 1));
        return fs;
    }
    if (sc.fs.size() != sys.d())
        throw malformed("fs names " + std::to_string(sc.fs.size()) + " observables; the system has d = " +
                        std::to_string(sys.d()));
    for (const auto& name : sc.fs) {
        auto it = sc.observables.find(name);
        if (it == sc.observables.end())
            throw malformed("unknown observable '" + name + "'");
        fs.push_back(observable_from_json(it->second, sys.n()));
    }
    return fs;
}

std::vector<TrigObservable> resolve_trig_tuple(const Scenario& sc)
{
    std::vector<TrigObservable> fs;
    if (sc.fs.size() != sc.torus->d)
        throw malformed("fs must name one trig observable per action");
    for (const auto& name : sc.fs) {
        auto it = sc.observables.find(name);
        if (it == sc.observables.end())
            throw malformed("unknown observable '" + name + "'");
        fs.push_back(trig_from_json(it->second, sc.torus->m));
    }
    return fs;
}

} // namespace ergo
