#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "revcont/mechanism.hpp"
#include "revcont/optimal_revenue.hpp"
#include "revcont/theorem_harness.hpp"
#include "revcont/valuation.hpp"

namespace revcont {

using json = nlohmann::json;

/// %.12g formatting used by all CSV reports; byte-stable for fixed inputs.
inline std::string format_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Distributions: {"k": int, "support": [[...],...], "probs": [...]}
// ---------------------------------------------------------------------------

inline json distribution_to_json(const DiscreteValuation& d) {
    json out;
    out["k"] = d.k;
    out["support"] = d.support;
    out["probs"] = d.probs;
    return out;
}

inline DiscreteValuation distribution_from_json(const json& j) {
    if (!j.contains("support") || !j.contains("probs"))
        throw std::invalid_argument("distribution JSON needs 'support' and 'probs'");
    auto support = j.at("support").get<std::vector<ValuationPoint>>();
    auto probs = j.at("probs").get<std::vector<double>>();
    auto d = validate(std::move(support), std::move(probs));
    if (j.contains("k") && j.at("k").get<int>() != d.k)
        throw std::invalid_argument("distribution JSON 'k' does not match the support");
    return d;
}

/// CSV rows: one support point per line, last column the probability.
inline DiscreteValuation distribution_from_csv(std::istream& in) {
    std::vector<ValuationPoint> support;
    std::vector<double> probs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> fields;
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            size_t pos = 0;
            const double v = std::stod(cell, &pos);
            fields.push_back(v);
        }
        if (fields.size() < 2)
            throw std::invalid_argument("distribution CSV rows need value columns plus a probability");
        probs.push_back(fields.back());
        fields.pop_back();
        support.push_back(std::move(fields));
    }
    return validate(std::move(support), std::move(probs));
}

inline DiscreteValuation load_distribution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv")
        return distribution_from_csv(in);
    json j;
    in >> j;
    return distribution_from_json(j);
}

inline void save_distribution(const DiscreteValuation& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << distribution_to_json(d).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Menus: {"space": "...", "entries": [{"q": [...], "s": ...}, ...]}
// ---------------------------------------------------------------------------

inline json menu_to_json(const Menu& menu) {
    json out;
    out["space"] = to_string(menu.space.kind);
    out["entries"] = json::array();
    for (const auto& e : menu.entries) out["entries"].push_back({{"q", e.q}, {"s", e.s}});
    return out;
}

inline Menu menu_from_json(const json& j) {
    if (!j.contains("space") || !j.contains("entries"))
        throw std::invalid_argument("menu JSON needs 'space' and 'entries'");
    const SpaceKind kind = space_kind_from_string(j.at("space").get<std::string>());
    std::vector<MenuEntry> entries;
    int k = -1;
    for (const auto& ej : j.at("entries")) {
        MenuEntry e;
        e.q = ej.at("q").get<std::vector<double>>();
        e.s = ej.at("s").get<double>();
        if (k < 0) k = static_cast<int>(e.q.size());
        entries.push_back(std::move(e));
    }
    if (k <= 0) throw std::invalid_argument("menu JSON needs at least one entry");
    return make_menu(std::move(entries), {kind, k});
}

inline Menu load_menu(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    in >> j;
    return menu_from_json(j);
}

inline void save_menu(const Menu& menu, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << menu_to_json(menu).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Results and reports
// ---------------------------------------------------------------------------

inline json result_to_json(const OptimalMechanismResult& r) {
    json out;
    out["value"] = r.value;
    out["menu"] = menu_to_json(r.menu);
    out["gap"] = r.dual_gap;
    out["status"] = to_string(r.status);
    out["iterations"] = r.iterations;
    return out;
}

inline json report_to_json(const BoundReport& r) {
    json out;
    out["suite"] = r.suite;
    out["instance_digest"] = r.digest;
    out["lhs"] = r.lhs;
    out["rhs"] = r.rhs;
    out["slack"] = r.slack;
    out["tolerance"] = r.tolerance;
    out["holds"] = r.holds;
    out["skipped"] = r.skipped;
    return out;
}

inline json report_to_json(const LearningReport& r) {
    json out;
    out["n"] = r.n;
    out["rev_target"] = r.rev_target;
    out["rev_achieved"] = r.rev_achieved;
    out["eta"] = r.eta;
    out["delta_budget"] = r.delta_budget;
    out["realized_w"] = r.realized_w;
    out["budget_met"] = r.budget_met;
    out["regret"] = r.regret;
    return out;
}

inline void write_reports_csv(const std::vector<BoundReport>& reports, std::ostream& out) {
    out << "suite,instance_digest,lhs,rhs,slack,holds\n";
    for (const auto& r : reports)
        out << r.suite << ',' << r.digest << ',' << format_sig(r.lhs) << ','
            << format_sig(r.rhs) << ',' << format_sig(r.slack) << ','
            << (r.holds ? "true" : "false") << '\n';
}

inline void save_reports_csv(const std::vector<BoundReport>& reports, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_reports_csv(reports, out);
}

}  // namespace revcont
