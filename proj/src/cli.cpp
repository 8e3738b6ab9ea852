#include "ergo/cli.hpp"

#include "ergo/averages.hpp"
#include "ergo/error.hpp"
#include "ergo/extensions.hpp"
#include "ergo/io.hpp"
#include "ergo/joinings.hpp"
#include "ergo/parallel.hpp"
#include "ergo/torus.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>

namespace ergo {

namespace {

struct Flags {
    std::string command;
    std::string scenario;
    std::string out;
    std::string format;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> max_m;
    std::optional<std::uint64_t> budget;
    std::optional<std::uint64_t> trials;
    unsigned threads = 1;
};

/// Fixed mapping from mt19937_64 output, so draws agree across standard libraries.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : gen_(seed) {}
    std::int64_t integer(std::int64_t lo, std::int64_t hi)
    {
        auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(gen_() % span);
    }
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

private:
    std::mt19937_64 gen_;
};

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class T>
std::string join_list(const std::vector<T>& v, const char* sep = ";")
{
    std::ostringstream os;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k)
            os << sep;
        if constexpr (std::is_floating_point_v<T>)
            os << fmt_double(v[k]);
        else
            os << v[k];
    }
    return os.str();
}

struct ExitWith {
    int code;
};

class Context {
public:
    Context(Flags flags, std::ostream& out, std::ostream& err) : flags_(std::move(flags)), out_(out), err_(err) {}

    const Flags& flags() const { return flags_; }
    const Scenario& scenario() const { return *scenario_; }
    void load() { scenario_ = load_scenario(flags_.scenario); }

    std::string format(const std::string& fallback) const { return flags_.format.empty() ? fallback : flags_.format; }
    std::uint64_t seed() const { return flags_.seed.value_or(scenario_->seed); }
    std::uint64_t trials() const { return flags_.trials.value_or(scenario_->trials); }
    std::uint64_t budget() const { return flags_.budget.value_or(scenario_->budget); }

    void emit_json(const Json& result) const
    {
        Json doc;
        doc["command"] = flags_.command;
        doc["engine_version"] = kEngineVersion;
        doc["scenario"] = scenario_ ? scenario_->name : "";
        doc["scenario_sha256"] = scenario_ ? scenario_->sha256 : "";
        doc["result"] = result;
        write("json", doc.dump(2) + "\n");
    }

    void emit_csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                  const std::vector<std::string>& trailer = {}) const
    {
        std::ostringstream os;
        os << "# command=" << flags_.command << " scenario=" << scenario_->name
           << " scenario_sha256=" << scenario_->sha256 << " engine_version=" << kEngineVersion << "\n";
        os << join_list(header, ",") << "\n";
        for (const auto& r : rows)
            os << join_list(r, ",") << "\n";
        for (const auto& t : trailer)
            os << "# " << t << "\n";
        write("csv", os.str());
    }

    void write_side_file(const std::string& filename, const std::string& contents) const
    {
        if (flags_.out.empty())
            return;
        std::filesystem::create_directories(flags_.out);
        std::ofstream f(std::filesystem::path(flags_.out) / filename, std::ios::binary);
        f << contents;
    }

    std::string file_stem() const
    {
        std::string stem = scenario_->name;
        std::replace(stem.begin(), stem.end(), '/', '_');
        return stem;
    }

    std::ostream& err() const { return err_; }

private:
    void write(const std::string& ext, const std::string& text) const
    {
        if (flags_.out.empty()) {
            out_ << text;
            return;
        }
        std::filesystem::create_directories(flags_.out);
        auto path = std::filesystem::path(flags_.out) / (file_stem() + "." + flags_.command + "." + ext);
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw Error("cannot write report '" + path.string() + "'");
        f << text;
    }

    Flags flags_;
    std::ostream& out_;
    std::ostream& err_;
    std::optional<Scenario> scenario_;
};

struct FiniteInputs {
    FiniteSystem system;
    std::vector<Observable> fs;
};

FiniteInputs finite_inputs(const Context& ctx)
{
    const Scenario& sc = ctx.scenario();
    if (sc.engine != "finite")
        throw ValidationError(ValidationError::Kind::Malformed, "command needs a finite-engine scenario");
    FiniteSystem full = validate_system(*sc.system);
    auto fs_full = resolve_finite_tuple(sc, full);
    auto restricted = normalize_support(full);
    std::vector<Observable> fs;
    for (const auto& f : fs_full) {
        std::vector<Rational> v;
        for (auto x : restricted.kept)
            v.push_back(f[x]);
        fs.emplace_back(std::move(v));
    }
    return {std::move(restricted.system), std::move(fs)};
}

Json labels_of(const FiniteSystem& sys, const std::vector<State>& states)
{
    Json a = Json::array();
    for (auto x : states)
        a.push_back(sys.label(x));
    return a;
}

bool is_full_period(const FolnerBox& box, const PeriodBox& p)
{
    for (std::size_t j = 0; j < box.lengths.size(); ++j)
        if (box.lengths[j] % p.periods[j] != 0)
            return false;
    return true;
}

int cmd_validate(Context& ctx)
{
    const Scenario& sc = ctx.scenario();
    if (sc.engine == "torus") {
        const auto& t = *sc.torus;
        ctx.emit_json({{"valid", true}, {"engine", "torus"}, {"m", t.m}, {"r", t.r}, {"d", t.d}});
        return kExitOk;
    }
    try {
        FiniteSystem sys = validate_system(*sc.system);
        resolve_finite_tuple(sc, sys);
        Json orders = Json::array();
        for (std::size_t i = 0; i < sys.d(); ++i) {
            Json row = Json::array();
            for (std::size_t j = 0; j < sys.r(); ++j)
                row.push_back(sys.generator(i, j).order());
            orders.push_back(row);
        }
        std::size_t support = 0;
        for (const auto& w : sys.weights())
            support += sgn(w) > 0;
        ctx.emit_json({{"valid", true},
                       {"engine", "finite"},
                       {"n", sys.n()},
                       {"r", sys.r()},
                       {"d", sys.d()},
                       {"support_size", support},
                       {"generator_orders", orders},
                       {"period_box", period_box(sys).periods}});
        return kExitOk;
    } catch (const ValidationError& e) {
        static const char* kinds[] = {"Malformed", "NonProbabilityWeights", "MeasureNotPreserved", "NonCommuting"};
        Json r{{"valid", false}, {"error", kinds[static_cast<int>(e.kind())]}, {"message", e.what()}};
        if (e.kind() == ValidationError::Kind::MeasureNotPreserved) {
            r["generator"] = e.generator_a;
            r["witness_state"] = e.witness_state;
        } else if (e.kind() == ValidationError::Kind::NonCommuting) {
            r["generators"] = {e.generator_a, e.generator_b};
            r["witness_state"] = e.witness_state;
        }
        ctx.emit_json(r);
        return kExitValidation;
    }
}

int cmd_avg(Context& ctx)
{
    auto in = finite_inputs(ctx);
    const auto& sys = in.system;
    PeriodBox p = period_box(sys);
    std::vector<FolnerBox> boxes = ctx.scenario().boxes;
    if (boxes.empty()) {
        boxes.push_back(FolnerBox::full_period(p));
        std::vector<std::uint64_t> odd;
        for (auto v : p.periods)
            odd.push_back(2 * v + 1);
        boxes.push_back({odd, std::vector<std::int64_t>(sys.r(), 0)});
    }
    for (const auto& b : boxes)
        if (b.lengths.size() != sys.r() || b.base.size() != sys.r())
            throw ValidationError(ValidationError::Kind::Malformed, "box rank differs from r");

    bool ok = true;
    Json box_reports = Json::array();
    std::vector<std::vector<std::string>> rows;
    auto record = [&](const std::string& kind, const AverageReport& rep, bool full) {
        bool equal = rep.truncated == rep.limit;
        ok = ok && rep.within_bound() && (!full || equal);
        rows.push_back({kind, join_list(rep.box.lengths), join_list(rep.box.base), rep.deviation.to_string(),
                        fmt_double(rep.deviation.approx()), rep.bound.to_string(), fmt_double(rep.bound.approx()),
                        rep.within_bound() ? "true" : "false", equal ? "true" : "false"});
        return Json{{"lengths", rep.box.lengths},
                    {"base", rep.box.base},
                    {"deviation", to_json(rep.deviation)},
                    {"deviation_approx", rep.deviation.approx()},
                    {"bound", to_json(rep.bound)},
                    {"bound_approx", rep.bound.approx()},
                    {"within_bound", rep.within_bound()},
                    {"full_period", full},
                    {"equals_limit", equal}};
    };

    Observable limit = exact_limit(sys, in.fs);
    for (const auto& b : boxes) {
        auto rep = average_report(sys, in.fs, b);
        Json j = record("box", rep, is_full_period(b, p));
        j["truncated"] = to_json(rep.truncated);
        box_reports.push_back(j);
    }

    Draws draws(ctx.seed());
    Json trial_rows = Json::array();
    for (std::uint64_t t = 0; t < ctx.trials(); ++t) {
        std::vector<std::int64_t> base(sys.r());
        for (auto& a : base)
            a = draws.integer(-1000, 1000);
        for (const auto& b : boxes) {
            FolnerBox shifted{b.lengths, base};
            auto rep = average_report(sys, in.fs, shifted);
            Json j = record("trial", rep, is_full_period(shifted, p));
            j["trial"] = t;
            trial_rows.push_back(j);
        }
    }

    if (ctx.format("json") == "csv") {
        ctx.emit_csv({"kind", "lengths", "base", "deviation", "deviation_approx", "bound", "bound_approx",
                      "within_bound", "equals_limit"},
                     rows);
    } else {
        ctx.emit_json({{"period_box", p.periods},
                       {"limit", to_json(limit)},
                       {"boxes", box_reports},
                       {"trials", {{"count", ctx.trials()}, {"seed", ctx.seed()}, {"rows", trial_rows}}},
                       {"all_checks_pass", ok}});
    }
    if (!ok) {
        ctx.err() << "average outside its certified bound\n";
        return kExitInternal;
    }
    return kExitOk;
}

int cmd_limit(Context& ctx)
{
    auto in = finite_inputs(ctx);
    const auto& sys = in.system;
    PeriodBox p = period_box(sys);
    Observable limit = exact_limit(sys, in.fs);
    auto vdc = vdc_identity_check(sys, in.fs);
    auto con = contractive_check(sys, in.fs, FolnerBox::full_period(p));
    ctx.emit_json({{"period_box", p.periods},
                   {"limit", to_json(limit)},
                   {"limit_l2", to_json(l2_norm(sys, limit))},
                   {"vdc_identity", {{"lhs_sq", to_json(vdc.lhs_sq)}, {"rhs_sq", to_json(vdc.rhs_sq)}, {"holds", vdc.holds}}},
                   {"contractive", {{"lhs", to_json(con.lhs)}, {"rhs", to_json(con.rhs)}, {"holds", con.holds}}}});
    return vdc.holds && con.holds ? kExitOk : kExitInternal;
}

Json vdc_condition_json(const FiniteSystem& sys, const VdcConditionResult& c)
{
    Json j{{"integrals_vanish", c.integrals_vanish}};
    if (c.witness)
        j["witness"] = {{"basis", labels_of(sys, c.witness->basis)},
                        {"invariant_cell", c.witness->invariant_cell},
                        {"value", to_json(c.witness->value)}};
    if (c.integrals_vanish) {
        j["conclusion_holds"] = c.conclusion_holds;
        if (c.counterexample)
            j["counterexample"] = labels_of(sys, *c.counterexample);
    }
    return j;
}

int cmd_joining(Context& ctx)
{
    auto in = finite_inputs(ctx);
    const auto& sys = in.system;
    JoinedMeasure jm = furstenberg_joining(sys);

    bool ok = jm.total_mass() == 1 && jm.marginals_match_base();
    Json invariance = Json::object();
    for (const auto& a : jm.actions()) {
        bool inv = jm.invariant_under(a);
        invariance[a.name] = inv;
        ok = ok && inv;
    }

    Draws draws(ctx.seed());
    bool shifts_equal = true;
    for (std::uint64_t t = 0; t < ctx.trials(); ++t) {
        std::vector<std::int64_t> shift(sys.r());
        for (auto& a : shift)
            a = draws.integer(-1000, 1000);
        shifts_equal = shifts_equal && furstenberg_joining(sys, shift) == jm;
    }
    ok = ok && shifts_equal;

    auto cond = vdc_condition_check(sys, in.fs.front());
    ok = ok && (!cond.integrals_vanish || cond.conclusion_holds);

    if (ctx.format("json") == "csv") {
        std::vector<std::vector<std::string>> rows;
        for (std::size_t k = 0; k < jm.support().size(); ++k)
            rows.push_back({join_list(jm.support()[k]), to_string(jm.masses()[k])});
        ctx.emit_csv({"tuple", "mass"}, rows);
    } else {
        ctx.emit_json({{"power", jm.power()},
                       {"support_size", jm.support().size()},
                       {"records", to_json(jm)},
                       {"marginals_match", jm.marginals_match_base()},
                       {"invariance", invariance},
                       {"base_shift_trials", {{"count", ctx.trials()}, {"seed", ctx.seed()}, {"all_equal", shifts_equal}}},
                       {"vdc_condition", vdc_condition_json(sys, cond)},
                       {"all_checks_pass", ok}});
    }
    return ok ? kExitOk : kExitInternal;
}

int cmd_hk(Context& ctx)
{
    auto in = finite_inputs(ctx);
    const auto& sys = in.system;
    auto tower = host_kra_tower(sys);
    bool ok = true;
    Json stages = Json::array();
    for (std::size_t k = 0; k < tower.size(); ++k) {
        const auto& st = tower[k];
        if (st.support().size() > ctx.budget())
            throw BudgetExceeded("Host-Kra stage support exceeds the budget", st.support().size(), ctx.budget());
        bool marg = st.marginals_match_base() && st.total_mass() == 1;
        bool inv = st.invariant_under_all();
        ok = ok && marg && inv;
        stages.push_back({{"k", k + 1},
                          {"power", st.power()},
                          {"support_size", st.support().size()},
                          {"marginals_match", marg},
                          {"invariant", inv},
                          {"records", to_json(st)}});
    }
    bool closed = host_kra_closed_form_holds(sys, tower.back());
    auto cond = hk_condition_check(sys, in.fs.front());
    ok = ok && closed && (!cond.integrals_vanish || cond.conclusion_holds);

    Json c{{"integrals_vanish", cond.integrals_vanish}};
    if (cond.witness)
        c["witness"] = labels_of(sys, *cond.witness);
    if (cond.integrals_vanish)
        c["conclusion_holds"] = cond.conclusion_holds;
    ctx.emit_json({{"stages", stages}, {"closed_form_holds", closed}, {"condition", c}, {"all_checks_pass", ok}});
    return ok ? kExitOk : kExitInternal;
}

Json pleasantness_json(const FiniteSystem& sys, const PleasantnessReport& rep)
{
    Json constituents = Json::array();
    for (const auto& p : rep.constituents)
        constituents.push_back(to_json(p));
    Json j{{"n", sys.n()},
           {"pleasant", rep.pleasant},
           {"defect", to_json(rep.defect)},
           {"defect_squared", to_json(rep.defect.squared())},
           {"defect_approx", rep.defect.approx()},
           {"factor", to_json(rep.factor)},
           {"constituents", constituents}};
    if (rep.witness)
        j["witness"] = {{"states", *rep.witness}, {"labels", labels_of(sys, *rep.witness)}};
    return j;
}

int cmd_extend(Context& ctx)
{
    auto in = finite_inputs(ctx);
    std::size_t max_m = ctx.flags().max_m.value_or(ctx.scenario().max_m);
    auto tower = iterate_extensions(in.system, max_m, ctx.budget());

    static const char* verdicts[] = {"pleasant_at_stage", "budget_exceeded", "max_stages_reached"};
    Json stages = Json::array();
    for (const auto& st : tower.stages) {
        stages.push_back({{"m", st.index},
                          {"n", st.system.n()},
                          {"factor_map", st.factor_map},
                          {"system", system_to_json(st.system)}});
        ctx.write_side_file(ctx.file_stem() + ".ext" + std::to_string(st.index) + ".system.json",
                            system_to_json(st.system).dump(2) + "\n");
    }
    const FiniteSystem& last = tower.stages.empty() ? in.system : tower.stages.back().system;
    ctx.emit_json({{"verdict", verdicts[static_cast<int>(tower.verdict)]},
                   {"stabilized", tower.stabilized()},
                   {"stage_count", tower.stages.size()},
                   {"max_m", max_m},
                   {"budget", ctx.budget()},
                   {"stages", stages},
                   {"final_report", tower.report ? pleasantness_json(last, *tower.report) : Json(nullptr)}});
    return tower.verdict == TowerVerdict::BudgetExceeded ? kExitBudget : kExitOk;
}

int cmd_pleasant(Context& ctx)
{
    auto in = finite_inputs(ctx);
    std::size_t steps = ctx.flags().max_m.value_or(0);
    FiniteSystem sys = in.system;
    for (std::size_t m = 1; m <= steps; ++m)
        sys = one_step_extension(sys, ctx.budget(), m).system;
    auto rep = is_pleasant(sys, ctx.budget());
    Json j = pleasantness_json(sys, rep);
    j["extension_steps"] = steps;
    ctx.emit_json(j);
    return kExitOk;
}

int cmd_torus_demo(Context& ctx)
{
    const Scenario& sc = ctx.scenario();
    if (sc.engine != "torus")
        throw ValidationError(ValidationError::Kind::Malformed, "torus-demo needs a torus-engine scenario");
    const TorusSystem& sys = *sc.torus;
    auto fs = resolve_trig_tuple(sc);

    Draws draws(ctx.seed());
    std::vector<std::uint64_t> edges = sc.edges;
    if (edges.empty())
        for (std::uint64_t n = 1; n <= 1024; n *= 2)
            edges.push_back(n);
    std::vector<std::vector<std::int64_t>> bases{std::vector<std::int64_t>(sys.r, 0)};
    for (std::uint64_t t = 0; t < ctx.trials(); ++t) {
        std::vector<std::int64_t> b(sys.r);
        for (auto& a : b)
            a = draws.integer(-1'000'000, 1'000'000);
        bases.push_back(std::move(b));
    }
    std::vector<std::vector<double>> samples = sc.samples;
    if (samples.empty())
        for (int s = 0; s < 5; ++s) {
            std::vector<double> t(sys.m);
            for (auto& c : t)
                c = draws.unit();
            samples.push_back(std::move(t));
        }

    auto rows = convergence_table(sys, fs, edges, bases, samples);
    double rate = rate_constant(rows);
    if (ctx.format("csv") == "json") {
        Json jr = Json::array();
        for (const auto& r : rows)
            jr.push_back({{"N", r.n}, {"base", r.base}, {"t", r.sample}, {"abs_error", r.error}});
        Json limit = Json::array();
        for (const auto& term : character_limit(sys, fs).terms())
            limit.push_back({{"k", term.k}, {"re", term.c.real()}, {"im", term.c.imag()}});
        ctx.emit_json({{"limit", limit}, {"rate_constant", rate}, {"rows", jr}});
    } else {
        std::vector<std::vector<std::string>> table;
        for (const auto& r : rows)
            table.push_back({std::to_string(r.n), join_list(r.base), join_list(r.sample), fmt_double(r.error)});
        ctx.emit_csv({"N", "base", "t", "abs_error"}, table, {"rate_constant=" + fmt_double(rate)});
    }
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact laboratory for nonconventional ergodic averages on finite systems"};
    app.require_subcommand(1);
    Flags flags;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"validate", "Validate the scenario's system"},
        {"avg", "Truncated box averages with certified deviation bounds"},
        {"limit", "Exact limits and the van der Corput identity"},
        {"joining", "Furstenberg self-joining and its checks"},
        {"hk", "Host-Kra tower of relatively independent self-joinings"},
        {"extend", "Iterate the one-step pleasant extension"},
        {"pleasant", "Exact pleasantness defect report"},
        {"torus-demo", "Convergence table for rotation systems on tori"},
    };
    std::uint64_t seed = 0, budget = 0, trials = 0;
    std::size_t max_m = 0;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", flags.scenario, "Scenario or system file")->required();
        sub->add_option("--out", flags.out, "Directory for report files (default: stdout)");
        sub->add_option("--format", flags.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--seed", seed, "Seed for base-point and sample draws");
        sub->add_option("--max-m", max_m, "Extension steps");
        sub->add_option("--budget", budget, "State budget per stage");
        sub->add_option("--trials", trials, "Number of random base points");
        sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    CLI::App* sub = app.get_subcommands().front();
    flags.command = sub->get_name();
    if (sub->count("--seed"))
        flags.seed = seed;
    if (sub->count("--max-m"))
        flags.max_m = max_m;
    if (sub->count("--budget"))
        flags.budget = budget;
    if (sub->count("--trials"))
        flags.trials = trials;
    set_worker_count(flags.threads);

    Context ctx(flags, out, err);
    try {
        ctx.load();
        if (flags.command == "validate")
            return cmd_validate(ctx);
        if (flags.command == "avg")
            return cmd_avg(ctx);
        if (flags.command == "limit")
            return cmd_limit(ctx);
        if (flags.command == "joining")
            return cmd_joining(ctx);
        if (flags.command == "hk")
            return cmd_hk(ctx);
        if (flags.command == "extend")
            return cmd_extend(ctx);
        if (flags.command == "pleasant")
            return cmd_pleasant(ctx);
        return cmd_torus_demo(ctx);
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << " (required " << e.required << ", budget " << e.budget << ")\n";
        return kExitBudget;
    } catch (const InvariantViolation& e) {
        err << "internal invariant violated: " << e.what() << "\n";
        return kExitInternal;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}

} // namespace ergo
