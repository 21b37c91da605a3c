#pragma once

#include <fstream>
#include <string>

#include "varconvex/certificate.hpp"
#include "varconvex/epi_limits.hpp"
#include "varconvex/equivalence.hpp"
#include "varconvex/geometry.hpp"
#include "varconvex/moreau.hpp"
#include "varconvex/subgradient.hpp"

namespace varconvex {

inline json to_json(const AttentiveWindow& w) {
    json j;
    j["center_x"] = w.center_x;
    j["center_xstar"] = w.center_xstar;
    j["radius_x"] = w.radius_x;
    j["radius_dual"] = w.radius_dual;
    j["eps_value"] = w.eps_value;
    j["f_center"] = w.f_center;
    return j;
}

inline json to_json(const Certificate& c) {
    json j;
    j["criterion"] = c.criterion;
    j["verdict"] = to_string(c.verdict);
    j["witness"] = c.fails() ? c.witness : json(nullptr);
    j["window"] = c.window ? to_json(*c.window) : json(nullptr);
    j["params"] = c.params;
    j["notes"] = c.notes;
    return j;
}

inline json to_json(const GeometryReport& r) {
    json j;
    j["p"] = r.p;
    j["sampled_modulus_convexity"] = json::array();
    for (auto [t, xi] : r.sampled_modulus_convexity)
        j["sampled_modulus_convexity"].push_back({t, xi});
    j["sampled_modulus_smoothness"] = json::array();
    for (auto [s, rho] : r.sampled_modulus_smoothness)
        j["sampled_modulus_smoothness"].push_back({s, rho});
    j["lwp_constant"] = r.lwp_constant ? json(*r.lwp_constant) : json(nullptr);
    j["uwp_constant"] = r.uwp_constant ? json(*r.uwp_constant) : json(nullptr);
    return j;
}

inline json to_json(const EnvelopeResult& r, const Vec& x) {
    json j;
    j["x"] = x;
    j["lambda"] = r.lambda;
    j["tilt"] = r.tilt;
    if (r.unbounded)
        j["value"] = "unbounded";
    else
        j["value"] = r.value.finite() ? json(r.value.value()) : json("empty");
    j["minimizers"] = r.minimizers;
    j["diagnostics"] = {{"doublings", r.doublings},
                        {"boundary_skip", r.boundary_skip},
                        {"boundary_after_max_doublings",
                         r.boundary_after_max_doublings}};
    return j;
}

inline json to_json(const ProxBoundReport& r) {
    json j;
    j["lambda_zero_lower"] = r.lambda_zero_lower;
    j["lambda_zero_upper"] =
        std::isfinite(r.lambda_zero_upper) ? json(r.lambda_zero_upper) : json("inf");
    j["witnesses"] = r.witnesses;
    return j;
}

inline json to_json(const EquivalenceMatrix& m) {
    json j;
    j["function"] = m.function;
    j["point"] = {{"x", m.xbar}, {"xstar", m.xbarstar}};
    j["rows"] = {{"vc_definition", to_json(m.vc_definition)},
                 {"subgradient_inequality", to_json(m.subgradient_inequality)},
                 {"local_max_monotone", to_json(m.local_max_monotone)},
                 {"local_monotone", to_json(m.local_monotone)},
                 {"envelope_convexity", to_json(m.envelope_convexity)}};
    j["consistent"] = m.consistent;
    j["params"] = m.params;
    return j;
}

/// Graph samples serialize to JSON lines: a header record with the sampling
/// parameters followed by one record per entry.
inline std::string to_jsonl(const GraphSample& s) {
    json header;
    header["type"] = "header";
    header["provenance"] =
        s.provenance == Provenance::Analytic ? "analytic" : "numeric";
    header["params"] = s.params;
    std::string out = header.dump() + "\n";
    for (const auto& e : s.entries) {
        json row;
        row["x"] = e.x;
        row["xstar"] = e.xstar;
        row["fx"] = e.fx;
        out += row.dump() + "\n";
    }
    return out;
}

inline GraphSample graph_sample_from_jsonl(const std::string& text) {
    GraphSample s;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty()) continue;
        json j = json::parse(line);
        if (!saw_header) {
            if (j.value("type", "") != "header")
                throw std::runtime_error("graph sample JSONL: missing header");
            s.provenance = j["provenance"] == "analytic" ? Provenance::Analytic
                                                         : Provenance::Numeric;
            s.params = j["params"];
            saw_header = true;
            continue;
        }
        s.entries.push_back(
            {j["x"].get<Vec>(), j["xstar"].get<Vec>(), j["fx"].get<double>()});
    }
    return s;
}

/// RFC 4180 CSV writer: CRLF line endings, quoting only when needed.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header) {
        append_row_strings(header);
    }

    void append_row(const std::vector<json>& cells) {
        std::vector<std::string> strs;
        for (const auto& c : cells)
            strs.push_back(c.is_string() ? c.get<std::string>() : c.dump());
        append_row_strings(strs);
    }

    const std::string& text() const { return text_; }

private:
    void append_row_strings(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) text_ += ',';
            text_ += quote(cells[i]);
        }
        text_ += "\r\n";
    }

    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    }

    std::string text_;
};

inline const char* verdict_mark(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "\xE2\x9C\x93";            // check mark
        case Verdict::FailsWithWitness: return "\xE2\x9C\x97";  // ballot x
        case Verdict::Inconclusive: return "?";
    }
    return "?";
}

/// Markdown summary: one row per (function, point).
inline std::string matrix_markdown(const std::vector<EquivalenceMatrix>& ms) {
    std::string out =
        "| function | point | vc-definition | subgradient-inequality | "
        "local-max-monotone | local-monotone | envelope-convexity | "
        "consistent |\n";
    out += "|---|---|---|---|---|---|---|---|\n";
    for (const auto& m : ms) {
        out += "| " + m.function + " | (" + format_vec(m.xbar) + ", " +
               format_vec(m.xbarstar) + ") | ";
        out += std::string(verdict_mark(m.vc_definition.verdict)) + " | ";
        out += std::string(verdict_mark(m.subgradient_inequality.verdict)) + " | ";
        out += std::string(verdict_mark(m.local_max_monotone.verdict)) + " | ";
        out += std::string(verdict_mark(m.local_monotone.verdict)) + " | ";
        out += std::string(verdict_mark(m.envelope_convexity.verdict)) + " | ";
        out += m.consistent ? "yes" : "NO";
        out += " |\n";
    }
    return out;
}

inline json catalog_descriptor(const TestFunction& f) {
    json j;
    j["name"] = f.name;
    j["dim"] = f.dim;
    json flags;
    flags["convex"] = f.flags.convex;
    flags["known_prox_regular_at"] = json::array();
    for (const auto& [x, xs] : f.flags.known_prox_regular_at)
        flags["known_prox_regular_at"].push_back({{"x", x}, {"xstar", xs}});
    j["flags"] = flags;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

}  // namespace varconvex
