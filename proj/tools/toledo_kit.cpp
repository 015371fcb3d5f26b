// toledo_kit: command line front end for the invariants in include/toledo.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toledo/toledo.hpp"

using namespace toledo;

namespace {

enum Exit { kOk = 0, kParse = 1, kMembership = 2, kConditioning = 3, kRounding = 4, kRelation = 5, kVerify = 6 };

struct RunConfig {
    std::string family = "u";
    std::optional<int> p, q;
    std::vector<std::string> inputs;
    std::uint64_t seed = 0;
    int samples = 100;
    bool strict = false;
    std::string format = "json";
    std::string out;
    std::string tol;
    int sweep = 0;
    bool log = false;
    std::string suite;
};

void add_common(CLI::App* sub, RunConfig& c) {
    sub->add_option("--family", c.family, "u, su, sp, sostar or so")->check(CLI::IsMember({"u", "su", "sp", "sostar", "so"}));
    sub->add_option("--p", c.p, "positive index (n for sp and sostar)");
    sub->add_option("--q", c.q, "negative index");
    sub->add_option("--in", c.inputs, "input JSON file (repeatable)");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--samples", c.samples, "sample count")->check(CLI::PositiveNumber);
    sub->add_flag("--strict", c.strict, "treat conditioning flags as errors");
    sub->add_option("--format", c.format, "json or table")->check(CLI::IsMember({"json", "table"}));
    sub->add_option("--out", c.out, "write the report here instead of stdout");
    sub->add_option("--tol", c.tol, "tolerance overrides, key=value[,key=value]");
}

Tolerances tolerances(const RunConfig& c) {
    Tolerances t;
    if (const char* env = std::getenv("TOLEDO_KIT_TOL")) t.parse_overrides(env);
    if (!c.tol.empty()) t.parse_overrides(c.tol);
    return t;
}

void print_table(std::ostream& os, const json& j, const std::string& prefix) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items()) print_table(os, v, prefix.empty() ? k : prefix + "." + k);
        return;
    }
    if (j.is_array() && !j.empty() && j.front().is_structured()) {
        for (size_t i = 0; i < j.size(); ++i) print_table(os, j[i], prefix + "[" + std::to_string(i) + "]");
        return;
    }
    os << prefix << "  " << j.dump() << "\n";
}

void emit(const RunConfig& c, const json& report) {
    std::ofstream file;
    if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw ParseError("cannot write " + c.out);
    }
    std::ostream& os = c.out.empty() ? std::cout : file;
    if (c.format == "table") print_table(os, report, "");
    else os << report.dump(2) << "\n";
}

void need_inputs(const RunConfig& c, size_t n) {
    if (c.inputs.size() != n) throw ParseError("expected " + std::to_string(n) + " --in file(s)");
}

GroupElement load_element(const RunConfig& c, const std::string& path, const Tolerances& tol) {
    return element_from_json(read_json_file(path), tol, parse_family(c.family), c.p, c.q);
}

json breakdown_json(const RhoBreakdown& r, double sign) {
    json blocks = json::array();
    for (const auto& b : r.per_block) blocks.push_back({{"dim", b.dim}, {"sign", b.sign}, {"rho", sign * b.rho}});
    return {{"total", sign * r.total}, {"hu", sign * r.hu}, {"eu", sign * r.eu}, {"u", sign * r.u},
            {"blocks", blocks}, {"flags", r.condition_flags}};
}

int cmd_rho(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    need_inputs(c, 1);
    GroupElement g = load_element(c, c.inputs[0], tol);
    if (g.family == Family::SO0) throw Error("rho is not provided for so");
    RhoBreakdown r = rho(g.space(), g.u, tol);
    json rep = breakdown_json(r, g.family == Family::Sp ? -1.0 : 1.0);
    rep["family"] = family_name(g.family);
    emit(c, rep);
    return c.strict && !r.condition_flags.empty() ? kConditioning : kOk;
}

int cmd_rot(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    need_inputs(c, 1);
    GroupElement g = load_element(c, c.inputs[0], tol);
    if (g.family == Family::SO0) throw Error("rot works in the U(p,q) picture; so has none");
    GroupPath path = standard_path(g, tol);
    double phase = path_phase(path, tol);
    double corr = rot_correction(g.u, g.p, g.q, tol);
    emit(c, {{"rot_frac", rot_frac(g.space(), g.u, tol)}, {"rot_lift", phase + corr}, {"path_phase", phase},
             {"correction", corr}, {"family", family_name(g.family)}});
    return kOk;
}

int cmd_cocycle(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    if (c.sweep > 0) {
        VerifyConfig v{parse_family(c.family), c.p.value_or(1), c.q.value_or(1), c.sweep, c.seed, tol};
        json r = suite_cocycle_identity(v);
        emit(c, r);
        return r["passed"].get<bool>() ? kOk : kVerify;
    }
    need_inputs(c, 2);
    GroupElement a = load_element(c, c.inputs[0], tol), b = load_element(c, c.inputs[1], tol);
    if (a.family == Family::SO0) throw Error("cocycle works in the U(p,q) picture; so has none");
    if (a.p != b.p || a.q != b.q || a.family != b.family) throw DimensionError("cocycle: elements from different groups");
    CocycleReport r = signature_cocycle(a.u, b.u, a.p, a.q, tol);
    emit(c, {{"sign", r.sign}, {"value", r.value}, {"defect", r.defect}, {"rho_a", r.rho_a}, {"rho_b", r.rho_b},
             {"rho_ab", r.rho_ab}, {"residual", r.residual}});
    return kOk;
}

int cmd_toledo_sign(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    need_inputs(c, 1);
    SurfaceRepresentation rep = representation_from_json(read_json_file(c.inputs[0]));
    double residual = validate(rep, tol);
    json out = {{"family", family_name(rep.family)}, {"genus", rep.pres.genus}, {"boundary", rep.pres.boundary},
                {"euler_characteristic", rep.pres.chi()}, {"relation_residual", residual}};
    require_relation(rep, tol);
    SignatureReport s = signature(rep, tol);
    MilnorWoodReport mw = milnor_wood_report(rep, s);
    out["signature"] = s.signature;
    out["signature_value"] = s.value;
    if (rep.family != Family::SO0) {
        out["toledo"] = s.toledo.toledo;
        out["toledo_u"] = s.toledo.toledo_u;
        out["boundary_lifts"] = s.toledo.boundary_lifts;
        out["boundary_rho"] = s.boundary_rho;
    }
    out["milnor_wood"] = {{"signature_bound", mw.signature_bound}, {"signature_slack", mw.signature_slack},
                          {"signature_bound_ok", mw.signature_bound_ok}, {"toledo_bound", mw.toledo_bound},
                          {"toledo_slack", mw.toledo_slack}, {"toledo_bound_ok", mw.toledo_bound_ok}};
    if (rep.family == Family::Sp && rep.p == 1) {
        Sp2BoundReport b = sp2_improved_bound(rep, tol);
        out["sp2_bound"] = {{"bound", b.bound}, {"elliptic_boundaries", b.elliptic_count}, {"holds", b.holds}};
    }
    emit(c, out);
    return kOk;
}

int cmd_normal_form(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    need_inputs(c, 1);
    json doc = read_json_file(c.inputs[0]);
    Mat n;
    HermitianSpace space;
    if (c.log) {
        GroupElement g = element_from_json(doc, tol, parse_family(c.family), c.p, c.q);
        space = g.space();
        n = nilpotent_log(g.u);
    } else {
        ElementSpec s = element_spec_from_json(doc, parse_family(c.family), c.p, c.q);
        if (s.family != Family::U && s.family != Family::SU) throw Error("normal-form: give N in u(p,q)");
        space = HermitianSpace::standard(s.p, s.q);
        n = s.native;
    }
    JordanBlockDecomp d = block_decompose(space, n);
    json blocks = json::array();
    for (const auto& b : d.blocks) blocks.push_back({{"dim", b.dim}, {"sign", b.sign}});
    emit(c, {{"blocks", blocks}, {"change_of_basis", matrix_to_json(d.change_of_basis())}, {"rho", d.rho()}});
    return kOk;
}

int cmd_verify(const RunConfig& c) {
    Tolerances tol = tolerances(c);
    const auto& suites = verify_suites();
    auto it = suites.find(c.suite);
    if (it == suites.end()) throw ParseError("unknown suite " + c.suite);
    VerifyConfig v{parse_family(c.family), c.p.value_or(1), c.q.value_or(c.suite == "horn" ? 0 : 1), c.samples, c.seed, tol};
    json r = it->second(v);
    emit(c, r);
    return r["passed"].get<bool>() ? kOk : kVerify;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toledo_kit: rho invariants, rotation numbers, signature cocycle and Toledo invariants"};
    app.require_subcommand(1);
    RunConfig c;
    struct Sub {
        const char* name;
        const char* help;
        int (*run)(const RunConfig&);
    };
    const Sub subs[] = {{"rho", "rho invariant with its breakdown", cmd_rho},
                        {"rot", "rotation number and its lift along the standard path", cmd_rot},
                        {"cocycle", "signature cocycle of two elements", cmd_cocycle},
                        {"toledo-sign", "Toledo invariant and signature of a surface representation", cmd_toledo_sign},
                        {"normal-form", "block normal form of a nilpotent element", cmd_normal_form},
                        {"verify", "randomized property suite", cmd_verify}};
    int (*chosen)(const RunConfig&) = nullptr;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, c);
        if (std::string(s.name) == "cocycle") sub->add_option("--sweep", c.sweep, "random pairs to sweep instead of inputs");
        if (std::string(s.name) == "normal-form") sub->add_flag("--log", c.log, "input is a unipotent group element");
        if (std::string(s.name) == "verify") {
            std::string names;
            for (const auto& [k, v] : verify_suites()) names += (names.empty() ? "" : ", ") + k;
            sub->add_option("suite", c.suite, names)->required();
        }
        auto run = s.run;
        sub->callback([&chosen, run] { chosen = run; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }
    try {
        return chosen(c);
    } catch (const RelationError& e) {
        std::cerr << "relation: " << e.what() << "\n";
        return kRelation;
    } catch (const RoundingError& e) {
        std::cerr << "rounding: " << e.what() << "\n";
        return kRounding;
    } catch (const MembershipError& e) {
        std::cerr << "membership: " << e.what() << "\n";
        return kMembership;
    } catch (const ConditioningError& e) {
        std::cerr << "conditioning: " << e.what() << "\n";
        return kConditioning;
    } catch (const NumericalError& e) {
        std::cerr << "numerical: " << e.what() << "\n";
        return kConditioning;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kParse;
    }
}
