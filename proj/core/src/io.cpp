#include "dislo/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dislo {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_form_csv(std::ostream& os, const OneForm& w) {
    const LatticeDomain& dom = w.domain();
    os << "tail_n,tail_m,dir_i,value\n";
    for (int b = 0; b < dom.bond_count(); ++b) {
        const auto [n, m] = dom.site_nm(dom.bond_tail(b));
        os << n << ',' << m << ',' << dom.bond_dir(b) << ',' << format_double(w[b]) << '\n';
    }
}

OneForm read_form_csv(std::istream& is, const LatticeDomain& dom) {
    OneForm w(dom);
    std::vector<char> seen(dom.bond_count(), 0);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_form_csv: empty input");
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int n, m, dir;
        char* end = nullptr;
        if (std::sscanf(line.c_str(), "%d,%d,%d,", &n, &m, &dir) != 3) {
            throw std::invalid_argument("read_form_csv: malformed row: " + line);
        }
        const auto pos = line.rfind(',');
        const double v = std::strtod(line.c_str() + pos + 1, &end);
        const int site = dom.find_site(n, m);
        if (site < 0) throw std::invalid_argument("read_form_csv: unknown site in row: " + line);
        const BondRef br = dom.bond(site, dir);
        if (br.bond < 0 || br.sign != 1) {
            throw std::invalid_argument("read_form_csv: not a canonical bond: " + line);
        }
        w[br.bond] = v;
        seen[br.bond] = 1;
        ++rows;
    }
    for (int b = 0; b < dom.bond_count(); ++b) {
        if (!seen[b]) throw std::invalid_argument("read_form_csv: missing bond rows");
    }
    if (rows != dom.bond_count()) throw std::invalid_argument("read_form_csv: duplicate bond rows");
    return w;
}

void write_displacement_csv(std::ostream& os, const Displacement& u) {
    const LatticeDomain& dom = u.domain();
    os << "n,m,value\n";
    for (int s = 0; s < dom.site_count(); ++s) {
        const auto [n, m] = dom.site_nm(s);
        os << n << ',' << m << ',' << format_double(u[s]) << '\n';
    }
}

Displacement read_displacement_csv(std::istream& is, const LatticeDomain& dom) {
    Displacement u(dom);
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_displacement_csv: empty input");
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        int n, m;
        if (std::sscanf(line.c_str(), "%d,%d,", &n, &m) != 2) {
            throw std::invalid_argument("read_displacement_csv: malformed row: " + line);
        }
        const auto pos = line.rfind(',');
        const double v = std::strtod(line.c_str() + pos + 1, nullptr);
        const int site = dom.find_site(n, m);
        if (site < 0) throw std::invalid_argument("read_displacement_csv: unknown site: " + line);
        u[site] = v;
    }
    return u;
}

std::string domain_to_json(const LatticeDomain& dom) {
    ordered_json j;
    j["schema_version"] = 1;
    j["type"] = dom.is_half_space() ? "half_space" : "disk";
    j["radius"] = format_double(dom.radius());
    ordered_json sites = ordered_json::array();
    for (int s = 0; s < dom.site_count(); ++s) {
        const auto [n, m] = dom.site_nm(s);
        sites.push_back({n, m});
    }
    j["sites"] = std::move(sites);
    return j.dump();
}

LatticeDomain domain_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    if (j.at("schema_version").get<int>() != 1) {
        throw std::invalid_argument("domain_from_json: unsupported schema version");
    }
    const double radius = std::strtod(j.at("radius").get<std::string>().c_str(), nullptr);
    const std::string type = j.at("type").get<std::string>();
    LatticeDomain dom = type == "half_space" ? LatticeDomain::half_space(radius)
                                             : LatticeDomain::disk(radius);
    const auto& sites = j.at("sites");
    if (static_cast<int>(sites.size()) != dom.site_count()) {
        throw std::invalid_argument("domain_from_json: site list does not match rebuilt domain");
    }
    for (int s = 0; s < dom.site_count(); ++s) {
        const auto [n, m] = dom.site_nm(s);
        if (sites[s][0].get<int>() != n || sites[s][1].get<int>() != m) {
            throw std::invalid_argument("domain_from_json: site list does not match rebuilt domain");
        }
    }
    return dom;
}

namespace {

ordered_json entry_to_json(const AuditEntry& e) {
    ordered_json j;
    j["check"] = e.check;
    j["sample"] = e.sample;
    j["claimed"] = e.claimed;
    j["measured"] = e.measured;
    j["margin"] = e.margin;
    j["hard"] = e.hard;
    j["pass"] = e.pass;
    return j;
}

}  // namespace

std::string audit_report_to_json(const AuditReport& rep) {
    ordered_json j;
    j["schema_version"] = 1;
    j["configs"] = rep.configs;
    j["skipped_draws"] = rep.violations;
    ordered_json entries = ordered_json::array();
    for (const AuditEntry& e : rep.entries) entries.push_back(entry_to_json(e));
    j["checks"] = std::move(entries);
    j["fitted"] = {
        {"r0", {rep.r0_sweep[0], rep.r0_sweep[1]}},
        {"c_eps", {rep.c_eps_sweep[0], rep.c_eps_sweep[1]}},
        {"c0", {rep.c0_sweep[0], rep.c0_sweep[1]}},
        {"c3", {rep.c3_sweep[0], rep.c3_sweep[1]}},
    };
    j["all_hard_pass"] = rep.all_hard_pass();
    return j.dump(2);
}

std::string audit_report_to_text(const AuditReport& rep) {
    std::ostringstream os;
    os << "audit over " << rep.configs << " configurations (" << rep.violations
       << " draws outside hypotheses skipped)\n";
    for (const AuditEntry& e : rep.entries) {
        os << (e.pass ? "  [pass] " : "  [FAIL] ") << e.check << "  claimed " << e.claimed
           << "  measured " << e.measured << "  margin " << e.margin << "  (" << e.sample << ")\n";
    }
    os << "  fitted constants (half sweeps):\n";
    os << "    r0     " << rep.r0_sweep[0] << "  " << rep.r0_sweep[1] << "\n";
    os << "    c_eps  " << rep.c_eps_sweep[0] << "  " << rep.c_eps_sweep[1] << "\n";
    os << "    c0     " << rep.c0_sweep[0] << "  " << rep.c0_sweep[1] << "\n";
    os << "    c3     " << rep.c3_sweep[0] << "  " << rep.c3_sweep[1] << "\n";
    return os.str();
}

std::string experiment_records_to_json(const std::vector<ExperimentRecord>& recs) {
    ordered_json arr = ordered_json::array();
    for (const ExperimentRecord& r : recs) {
        ordered_json j;
        j["schema_version"] = 1;
        j["name"] = r.name;
        j["separation"] = r.separation;
        j["persisted"] = r.persisted;
        j["annihilated"] = r.annihilated;
        j["cores_before"] = r.cores_before;
        j["cores_after"] = r.cores_after;
        j["net_burgers_before"] = r.net_burgers_before;
        j["net_burgers_after"] = r.net_burgers_after;
        j["energy"] = r.energy;
        j["iterations"] = r.iterations;
        j["converged"] = r.converged;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

IniConfig IniConfig::parse(const std::string& text) {
    IniConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": unterminated section header");
            }
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        cfg.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return cfg;
}

IniConfig IniConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse(buf.str());
}

bool IniConfig::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string IniConfig::get(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return fallback;
    const auto kit = it->second.find(key);
    return kit == it->second.end() ? fallback : kit->second;
}

std::string IniConfig::require(const std::string& section, const std::string& key) const {
    if (!has(section, key)) {
        throw std::invalid_argument("config: missing required key [" + section + "] " + key);
    }
    return get(section, key, "");
}

double IniConfig::get_double(const std::string& section, const std::string& key,
                             double fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = get(section, key, "");
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') {
        throw std::invalid_argument("config: [" + section + "] " + key + " is not a number: " + s);
    }
    return v;
}

long IniConfig::get_int(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = get(section, key, "");
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (end == s.c_str() || *end != '\0') {
        throw std::invalid_argument("config: [" + section + "] " + key + " is not an integer: " + s);
    }
    return v;
}

bool IniConfig::get_bool(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = get(section, key, "");
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("config: [" + section + "] " + key + " is not a boolean: " + s);
}

void IniConfig::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

std::string IniConfig::serialize() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [section, keys] : sections_) {
        if (!first) os << '\n';
        first = false;
        os << '[' << section << "]\n";
        for (const auto& [k, v] : keys) os << k << " = " << v << '\n';
    }
    return os.str();
}

}  // namespace dislo
