#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "dislo/audit.hpp"
#include "dislo/forms.hpp"
#include "dislo/lattice.hpp"
#include "dislo/relax.hpp"

namespace dislo {

// All numeric text output uses 17 significant digits so doubles round-trip
// exactly.
std::string format_double(double v);

// --- bond-form CSV: tail_n, tail_m, dir_i, value (canonical bonds) ---
void write_form_csv(std::ostream& os, const OneForm& w);
OneForm read_form_csv(std::istream& is, const LatticeDomain& dom);

// --- displacement CSV: n, m, value ---
void write_displacement_csv(std::ostream& os, const Displacement& u);
Displacement read_displacement_csv(std::istream& is, const LatticeDomain& dom);

// --- domain serialization (JSON, bit-exact round trip) ---
std::string domain_to_json(const LatticeDomain& dom);
LatticeDomain domain_from_json(const std::string& text);

// --- reports and records (JSON, schema_version tagged) ---
std::string audit_report_to_json(const AuditReport& rep);
std::string audit_report_to_text(const AuditReport& rep);
std::string experiment_records_to_json(const std::vector<ExperimentRecord>& recs);

// --- key = value configuration with [section] headers ---
class IniConfig {
public:
    IniConfig() = default;
    static IniConfig parse(const std::string& text);
    static IniConfig load(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::string require(const std::string& section, const std::string& key) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    long get_int(const std::string& section, const std::string& key, long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    // Deterministic serialization (sections and keys sorted).
    std::string serialize() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace dislo
