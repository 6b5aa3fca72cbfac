#include "app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "dislo/audit.hpp"
#include "dislo/elastic.hpp"
#include "dislo/energy.hpp"
#include "dislo/io.hpp"
#include "dislo/lattice.hpp"
#include "dislo/potential.hpp"
#include "dislo/relax.hpp"
#include "dislo/topology.hpp"

namespace dislo::app {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

const char* kUsageText =
    "usage: dislo <subcommand> [--config FILE] [--output-dir DIR]\n"
    "subcommands: relax, cores, burgers, cuts, decay, dipole, halfspace, audit, reference\n";

struct Session {
    IniConfig cfg;
    fs::path out_dir;
    std::ostream* log = nullptr;

    void write_file(const std::string& name, const std::string& contents) const {
        std::ofstream os(out_dir / name, std::ios::binary);
        os << contents;
    }
};

LatticeDomain build_domain(const IniConfig& cfg) {
    const double radius = cfg.get_double("domain", "radius", 24.0);
    const std::string type = cfg.get("domain", "type", "disk");
    if (type == "disk") return LatticeDomain::disk(radius);
    if (type == "half_space") return LatticeDomain::half_space(radius);
    throw std::invalid_argument("config: unknown domain type " + type);
}

std::unique_ptr<Potential> build_potential(const IniConfig& cfg) {
    return make_potential(cfg.get("potential", "name", "psi_lin"),
                          cfg.get_double("potential", "lambda", 1.0));
}

ReferenceField build_reference(const IniConfig& cfg, const LatticeDomain& dom) {
    if (cfg.get_bool("reference", "flat", false)) return ReferenceField::flat(dom);
    const Vec2 center{cfg.get_double("reference", "center_x", 0.0),
                      cfg.get_double("reference", "center_y", 0.0)};
    const Vec2 shear{cfg.get_double("reference", "shear_x", 0.0),
                     cfg.get_double("reference", "shear_y", 0.0)};
    return ReferenceField::dislocation(dom, center, shear);
}

RelaxConfig build_relax_config(const IniConfig& cfg) {
    RelaxConfig rc;
    rc.tolerance = cfg.get_double("relax", "tolerance", 1e-8);
    rc.max_iterations = static_cast<int>(cfg.get_int("relax", "max_iterations", 200000));
    rc.use_cg = cfg.get_bool("relax", "use_cg", true);
    return rc;
}

Displacement load_initial(const Session& s, const EnergyState& state) {
    const std::string path = s.cfg.get("input", "displacement", "");
    if (path.empty()) return state.zero();
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open displacement file: " + path);
    return read_displacement_csv(is, state.domain());
}

OneForm wrapped_state(const EnergyState& state, const Displacement& u) {
    const LatticeDomain& dom = state.domain();
    const OneForm du = difference(u);
    OneForm alpha(dom);
    for (int b = 0; b < dom.bond_count(); ++b) {
        alpha[b] = wrap_value(state.reference().strain()[b] + du[b]);
    }
    return alpha;
}

int cmd_reference(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const ReferenceField ref = build_reference(s.cfg, dom);
    s.write_file("domain.json", domain_to_json(dom));
    std::ostringstream alpha_csv;
    write_form_csv(alpha_csv, ref.alpha_hat());
    s.write_file("alpha_hat.csv", alpha_csv.str());

    const std::vector<double>& f = ref.force(*pot);
    std::ostringstream force_csv;
    force_csv << "n,m,full_star,force\n";
    for (int i = 0; i < dom.site_count(); ++i) {
        const auto [n, m] = dom.site_nm(i);
        force_csv << n << ',' << m << ',' << (dom.full_star(i) ? 1 : 0) << ','
                  << format_double(f[i]) << '\n';
    }
    s.write_file("force.csv", force_csv.str());

    double fmax = 0.0;
    for (int i = 0; i < dom.site_count(); ++i) {
        if (dom.full_star(i)) fmax = std::max(fmax, std::abs(f[i]));
    }
    std::ostringstream sum;
    sum << "reference field on " << dom.site_count() << " sites, " << dom.bond_count()
        << " bonds\nmax |alpha_hat| = " << format_double(ref.alpha_hat().norm_inf())
        << "\nmax interior |force| = " << format_double(fmax) << "\n";
    s.write_file("reference_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_cores(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const ReferenceField ref = build_reference(s.cfg, dom);
    const EnergyState state(dom, *pot, ref,
                            s.cfg.get_double("relax", "active_radius", dom.radius() - 2.0));
    const Displacement u = load_initial(s, state);
    const OneForm alpha = cleanup_adjacent_cores(wrapped_state(state, u));
    const CoreSet cores = detect_cores(alpha);

    ordered_json j;
    j["schema_version"] = 1;
    auto cell_list = [&](const std::vector<int>& cells) {
        ordered_json arr = ordered_json::array();
        for (int c : cells) {
            const auto [p, q, o] = dom.cell_pqo(c);
            const Vec2 x = dom.cell_barycentre(c);
            arr.push_back({{"p", p},
                           {"q", q},
                           {"orient", o == CellOrient::Ref ? "ref" : "anti"},
                           {"x", x.x},
                           {"y", x.y}});
        }
        return arr;
    };
    j["positive"] = cell_list(cores.positive);
    j["negative"] = cell_list(cores.negative);
    s.write_file("cores.json", j.dump(2));

    std::ostringstream sum;
    sum << "cores: " << cores.positive.size() << " positive, " << cores.negative.size()
        << " negative\n";
    s.write_file("cores_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_burgers(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const ReferenceField ref = build_reference(s.cfg, dom);
    const EnergyState state(dom, *pot, ref,
                            s.cfg.get_double("relax", "active_radius", dom.radius() - 2.0));
    const Displacement u = load_initial(s, state);
    const int burgers = net_burgers(wrapped_state(state, u));
    ordered_json j;
    j["schema_version"] = 1;
    j["net_burgers"] = burgers;
    s.write_file("burgers.json", j.dump(2));
    *s.log << "net Burgers vector = " << burgers << "\n";
    s.write_file("burgers_summary.txt", "net Burgers vector = " + std::to_string(burgers) + "\n");
    return kOk;
}

int cmd_relax(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const ReferenceField ref = build_reference(s.cfg, dom);
    const EnergyState state(dom, *pot, ref,
                            s.cfg.get_double("relax", "active_radius", dom.radius() - 2.0));
    const RelaxConfig rc = build_relax_config(s.cfg);
    const Displacement u0 = load_initial(s, state);
    const RelaxResult rr = relax(state, u0, rc);

    std::ostringstream csv;
    write_displacement_csv(csv, rr.u);
    s.write_file("displacement.csv", csv.str());

    const OneForm alpha = wrapped_state(state, rr.u);
    const CoreSet cores = detect_cores(alpha);
    ordered_json j;
    j["schema_version"] = 1;
    j["converged"] = rr.converged;
    j["iterations"] = rr.iterations;
    j["residual"] = rr.residual;
    j["energy"] = rr.energy;
    j["cores_positive"] = cores.positive.size();
    j["cores_negative"] = cores.negative.size();
    if (!dom.is_half_space()) j["net_burgers"] = net_burgers(alpha);
    s.write_file("relax.json", j.dump(2));

    std::ostringstream sum;
    sum << "relax: " << (rr.converged ? "converged" : "INCOMPLETE (iteration budget)")
        << " after " << rr.iterations << " iterations, residual "
        << format_double(rr.residual) << ", energy " << format_double(rr.energy) << "\n";
    s.write_file("relax_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_cuts(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const ReferenceField ref = build_reference(s.cfg, dom);
    const EnergyState state(dom, *pot, ref,
                            s.cfg.get_double("relax", "active_radius", dom.radius() - 2.0));
    const Displacement u = load_initial(s, state);
    const DocpResult docp = docp_shift(state, u);

    ordered_json j;
    j["schema_version"] = 1;
    const auto [p, q, o] = dom.cell_pqo(docp.chosen_cell);
    j["origin_core"] = {{"p", p}, {"q", q}, {"orient", o == CellOrient::Ref ? "ref" : "anti"}};
    j["cut_length_before"] = docp.cut_length_before;
    j["cut_length_after"] = docp.cut_length_after;
    j["energy_drift"] = docp.energy_after - docp.energy_before;
    ordered_json paths = ordered_json::array();
    for (const CutPath& path : docp.cuts.paths) {
        const auto [pn, qn, on] = dom.cell_pqo(path.core_neg);
        const auto [pp, qp, op] = dom.cell_pqo(path.core_pos);
        ordered_json pj;
        pj["negative"] = {{"p", pn}, {"q", qn}, {"orient", on == CellOrient::Ref ? "ref" : "anti"}};
        pj["positive"] = {{"p", pp}, {"q", qp}, {"orient", op == CellOrient::Ref ? "ref" : "anti"}};
        pj["legs"] = {{{"direction", path.legs[0].dir}, {"length", path.legs[0].length}},
                      {{"direction", path.legs[1].dir}, {"length", path.legs[1].length}}};
        pj["hop_length"] = path.length();
        paths.push_back(std::move(pj));
    }
    j["cuts"] = std::move(paths);
    s.write_file("cuts.json", j.dump(2));

    std::ostringstream sum;
    sum << "cuts: " << docp.cuts.paths.size() << " connection(s), total length "
        << docp.cut_length_after << " (was " << docp.cut_length_before << ")\n";
    s.write_file("cuts_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_decay(Session& s) {
    const double radius = s.cfg.get_double("domain", "radius", 50.0);
    const LatticeDomain dom = LatticeDomain::disk(radius);
    const auto pot = build_potential(s.cfg);
    RelaxConfig rc = build_relax_config(s.cfg);
    rc.tolerance = s.cfg.get_double("relax", "tolerance", 1e-10);

    ordered_json j;
    j["schema_version"] = 1;
    std::ostringstream sum;

    auto run_case = [&](const std::string& name, Vec2 center, Vec2 shear, double hi_frac) {
        const ReferenceField ref = ReferenceField::dislocation(dom, center, shear);
        const EnergyState state(dom, *pot, ref, radius - 2.0);
        const RelaxResult rr = relax(state, state.zero(), rc);
        const DecayFit fit =
            decay_fit(difference(rr.u), center, radius / 5.0, hi_frac * radius);
        j[name] = {{"slope", fit.slope},
                   {"intercept", fit.intercept},
                   {"annuli", fit.annuli},
                   {"converged", rr.converged},
                   {"energy", rr.energy}};
        sum << name << ": corrector decay slope " << format_double(fit.slope) << " over ["
            << format_double(radius / 5.0) << ", " << format_double(hi_frac * radius) << "]\n";
    };
    run_case("symmetric", Vec2{0, 0}, Vec2{0, 0}, 0.8);
    run_case("sheared", Vec2{0, 0}, Vec2{0.01, 0.0}, 0.8);
    run_case("off_centre", Vec2{0.12, 0.07}, Vec2{0, 0}, 0.4);

    // reference-strain decay for comparison
    const ReferenceField ref = ReferenceField::dislocation(dom);
    const DecayFit afit = decay_fit(ref.alpha_hat(), Vec2{0, 0}, radius / 5.0, 0.8 * radius);
    j["alpha_hat"] = {{"slope", afit.slope}, {"annuli", afit.annuli}};
    sum << "alpha_hat: decay slope " << format_double(afit.slope) << "\n";

    s.write_file("decay.json", j.dump(2));
    s.write_file("decay_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stoi(tok));
    }
    if (out.empty()) throw std::invalid_argument("config: empty list for " + what);
    return out;
}

int cmd_dipole(Session& s) {
    const LatticeDomain dom = build_domain(s.cfg);
    const auto pot = build_potential(s.cfg);
    const RelaxConfig rc = build_relax_config(s.cfg);
    const auto seps = parse_int_list(s.cfg.get("experiment", "separations", "2,3,6,12,20"),
                                     "experiment.separations");
    std::vector<ExperimentRecord> recs;
    std::ostringstream sum;
    for (int L : seps) {
        recs.push_back(dipole_experiment(dom, *pot, L, rc));
        const ExperimentRecord& r = recs.back();
        sum << "dipole hop separation " << L << ": "
            << (r.persisted ? "persisted" : (r.annihilated ? "annihilated" : "other"))
            << ", cores " << r.cores_before << " -> " << r.cores_after << ", net Burgers "
            << r.net_burgers_before << " -> " << r.net_burgers_after << "\n";
    }
    s.write_file("dipole.json", experiment_records_to_json(recs));
    s.write_file("dipole_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_halfspace(Session& s) {
    const double radius = s.cfg.get_double("domain", "radius", 40.0);
    const auto pot = build_potential(s.cfg);
    const RelaxConfig rc = build_relax_config(s.cfg);
    const auto depths =
        parse_int_list(s.cfg.get("experiment", "depths", "2,4,10,16"), "experiment.depths");
    std::vector<ExperimentRecord> recs;
    std::ostringstream sum;
    for (int L : depths) {
        recs.push_back(halfspace_experiment(radius, *pot, L, rc));
        const ExperimentRecord& r = recs.back();
        sum << "halfspace depth layer " << L << ": "
            << (r.persisted ? "persisted" : (r.annihilated ? "escaped" : "other")) << ", cores "
            << r.cores_after << "\n";
    }
    s.write_file("halfspace.json", experiment_records_to_json(recs));
    s.write_file("halfspace_summary.txt", sum.str());
    *s.log << sum.str();
    return kOk;
}

int cmd_audit(Session& s) {
    AuditConfig acfg;
    acfg.radius = s.cfg.get_double("audit", "radius", 24.0);
    acfg.configs = static_cast<int>(s.cfg.get_int("audit", "configs", 100));
    acfg.seed = static_cast<std::uint64_t>(s.cfg.get_int("audit", "seed", 20240817));
    acfg.support_radius = s.cfg.get_double("audit", "support_radius", 8.0);
    acfg.amplitude = s.cfg.get_double("audit", "amplitude", 1.5);
    const auto pot = build_potential(s.cfg);
    const AuditReport rep = run_audit(acfg, *pot);
    s.write_file("audit.json", audit_report_to_json(rep));
    const std::string text = audit_report_to_text(rep);
    s.write_file("audit_summary.txt", text);
    *s.log << text;
    return rep.all_hard_pass() ? kOk : kRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << kUsageText;
        return kUsage;
    }
    const std::string cmd = args[0];
    const bool known = cmd == "relax" || cmd == "cores" || cmd == "burgers" || cmd == "cuts" ||
                       cmd == "decay" || cmd == "dipole" || cmd == "halfspace" || cmd == "audit" ||
                       cmd == "reference";
    if (cmd == "--help" || cmd == "-h" || cmd == "help") {
        out << kUsageText;
        return kOk;
    }
    if (!known) {
        err << "unknown subcommand: " << cmd << "\n" << kUsageText;
        return kUsage;
    }

    std::string config_path, out_override;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[++i];
        } else if (args[i] == "--output-dir" && i + 1 < args.size()) {
            out_override = args[++i];
        } else {
            err << "unrecognized argument: " << args[i] << "\n" << kUsageText;
            return kUsage;
        }
    }

    Session s;
    s.log = &out;
    try {
        if (!config_path.empty()) s.cfg = IniConfig::load(config_path);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kBadConfig;
    }
    const char* env_dir = std::getenv("DISLO_OUTPUT_DIR");
    std::string dir = s.cfg.get("output", "directory", env_dir ? env_dir : "out");
    if (!out_override.empty()) dir = out_override;
    s.out_dir = dir;

    try {
        fs::create_directories(s.out_dir);
        s.cfg.set("run", "command", cmd);
        s.cfg.set("output", "directory", dir);
        s.write_file("effective_config.cfg", s.cfg.serialize());
        if (cmd == "reference") return cmd_reference(s);
        if (cmd == "cores") return cmd_cores(s);
        if (cmd == "burgers") return cmd_burgers(s);
        if (cmd == "relax") return cmd_relax(s);
        if (cmd == "cuts") return cmd_cuts(s);
        if (cmd == "decay") return cmd_decay(s);
        if (cmd == "dipole") return cmd_dipole(s);
        if (cmd == "halfspace") return cmd_halfspace(s);
        if (cmd == "audit") return cmd_audit(s);
    } catch (const std::invalid_argument& e) {
        const std::string what = e.what();
        err << "error: " << what << "\n";
        if (what.find("config") != std::string::npos) return kBadConfig;
        return kBadGeometry;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}

}  // namespace dislo::app
