#include "otail/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "otail/json_io.hpp"
#include "otail/version.hpp"

namespace otail {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

json provenance(const json& config, const std::string& command) {
    return json{{"tool_version", kToolVersion},
                {"command", command},
                {"config_hash", config_hash(config)}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << content;
}

void write_json_file(const std::string& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::string csv_provenance_line(const json& prov) {
    return "# tool_version=" + prov["tool_version"].get<std::string>() +
           " config_hash=" + prov["config_hash"].get<std::string>() + "\n";
}

std::string tail_grid_csv(const TailGrid& g, const json& prov) {
    std::string out = csv_provenance_line(prov) + "x,log_survival,survival\n";
    for (std::size_t i = 0; i < g.xs.size(); ++i) {
        out += fmt17(g.xs[i]);
        out += ',';
        out += fmt17(g.log_sf[i]);
        out += ',';
        out += fmt17(std::exp(g.log_sf[i]));
        out += '\n';
    }
    return out;
}

json tail_grid_to_json(const TailGrid& g, const json& prov) {
    return json{{"provenance", prov},
                {"abs_error_bound", g.abs_error_bound},
                {"tol_met", g.tol_met},
                {"xs", g.xs},
                {"log_survival", g.log_sf}};
}

std::string ratio_csv(const RatioReport& r, const json& prov) {
    std::string out = csv_provenance_line(prov) + "x,ratio\n";
    for (const auto& [x, v] : r.series) {
        out += fmt17(x);
        out += ',';
        out += fmt17(v);
        out += '\n';
    }
    return out;
}

json ratio_report_to_json(const RatioReport& r) {
    json wins = json::array();
    for (int i = 0; i < 3; ++i) {
        wins.push_back(json{{"sup", r.window_sup[i]},
                            {"inf", r.window_inf[i]},
                            {"log_mean", r.window_log_mean[i]}});
    }
    return json{{"offset", r.offset},
                {"multiplicative", r.multiplicative},
                {"windowed_sup", r.windowed_sup},
                {"global_sup", r.global_sup},
                {"trend", to_string(r.trend)},
                {"verdict", to_string(r.verdict)},
                {"bounded_support_hit", r.bounded_support_hit},
                {"windows", std::move(wins)}};
}

json class_verdict_to_json(const ClassVerdict& v, const json& prov) {
    json j{{"provenance", prov},
           {"class", to_string(v.tail_class)},
           {"verdict", to_string(v.verdict)},
           {"evidence", ratio_report_to_json(v.ratio)}};
    if (v.gamma_estimate) j["gamma_estimate"] = *v.gamma_estimate;
    if (!v.note.empty()) j["note"] = v.note;
    if (!v.diag_series.empty()) {
        json ds = json::array();
        for (const auto& [x, d] : v.diag_series) ds.push_back(json::array({x, d}));
        j["diagnostic_series"] = std::move(ds);
    }
    return j;
}

json condition_report_to_json(const ConditionReport& r, const json& prov) {
    json conds = json::array();
    for (const auto& c : r.conditions) {
        json ev = json::object();
        for (const auto& [k, v] : c.evidence) ev[k] = v;
        conds.push_back(json{{"label", c.label},
                             {"verdict", to_string(c.verdict)},
                             {"summary", c.summary},
                             {"evidence", std::move(ev)}});
    }
    return json{{"provenance", prov},
                {"theorem", r.theorem},
                {"kappa", r.kappa},
                {"overall", to_string(r.overall)},
                {"conditions", std::move(conds)}};
}

std::string mc_csv(const McTailResult& r, const json& prov) {
    std::string out = csv_provenance_line(prov) + "x,estimate,se,n\n";
    for (std::size_t i = 0; i < r.xs.size(); ++i) {
        out += fmt17(r.xs[i]);
        out += ',';
        out += fmt17(r.estimate[i]);
        out += ',';
        out += fmt17(r.se[i]);
        out += ',';
        out += std::to_string(r.samples);
        out += '\n';
    }
    return out;
}

json mc_manifest(const McTailResult& r, const json& prov) {
    return json{{"provenance", prov}, {"seed", r.seed}, {"samples", r.samples}};
}

json decomposition_to_json(const DecompositionTrace& t, double x, const json& prov) {
    return json{{"provenance", prov},
                {"x", x},
                {"k1", t.k1},
                {"k2", t.k2},
                {"k3", t.k3},
                {"k4", t.k4},
                {"total", t.total()},
                {"err_bound", t.err_bound},
                {"truncation", t.truncation}};
}

}
