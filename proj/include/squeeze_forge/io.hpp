#pragma once

// JSON and CSV persistence. Doubles are printed with 17 significant digits
// so every file round-trips bit for bit.

#include "squeeze_forge/certificate.hpp"
#include "squeeze_forge/graphs.hpp"
#include "squeeze_forge/schedule.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace sqf {

using json = nlohmann::ordered_json;

/// I/O or parse failure (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";  // keep the float type visible
    return s;
}

namespace detail {

inline void dump17(const json& j, std::ostringstream& os, int indent, int level) {
    const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * level), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
        case json::value_t::object: {
            if (j.empty()) { os << "{}"; return; }
            os << '{' << nl;
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
                dump17(it.value(), os, indent, level + 1);
            }
            os << nl << close << '}';
            return;
        }
        case json::value_t::array: {
            if (j.empty()) { os << "[]"; return; }
            os << '[' << nl;
            bool first = true;
            for (const auto& v : j) {
                if (!first) os << ',' << nl;
                first = false;
                os << pad;
                dump17(v, os, indent, level + 1);
            }
            os << nl << close << ']';
            return;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (std::isfinite(v)) {
                os << format_double(v);
            } else {
                os << "null";
            }
            return;
        }
        default:
            os << j.dump();
    }
}

}  // namespace detail

/// Serialize with %.17g doubles.
inline std::string dump17(const json& j, int indent = 2) {
    std::ostringstream os;
    detail::dump17(j, os, indent, 0);
    if (indent > 0) os << '\n';
    return os.str();
}

/// Write-then-rename so readers never see a partial file.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& what) {
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw IoError(what + " is empty");
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(what + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// GraphStack
// ---------------------------------------------------------------------------

inline json to_json(const GraphStack& s) {
    json j;
    j["base_k"] = s.base_k;
    j["plateau"] = s.cutoff.plateau;
    j["profile"] = std::string(to_string(s.cutoff.profile));
    j["r_max"] = s.r_max;
    j["stages"] = json::array();
    for (const auto& st : s.stages) {
        json e{{"k", st.k}, {"epsilon", st.epsilon}};
        if (st.target != st.k + 1) e["target"] = st.target;
        j["stages"].push_back(std::move(e));
    }
    return j;
}

inline GraphStack graph_stack_from_json(const json& j) {
    try {
        GraphStack s;
        s.base_k = j.at("base_k").get<int>();
        s.cutoff.plateau = j.at("plateau").get<double>();
        s.cutoff.profile = cutoff_profile_from_string(j.value("profile", std::string("log_radial")));
        s.r_max = j.value("r_max", 1.0);
        for (const auto& e : j.at("stages")) {
            GlueStage st;
            st.k = e.at("k").get<int>();
            st.epsilon = e.at("epsilon").get<double>();
            st.target = e.value("target", st.k + 1);
            s.stages.push_back(st);
        }
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("graph stack: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Schedule
// ---------------------------------------------------------------------------

inline json to_json(const Schedule& s) {
    json j;
    j["k0"] = s.k0;
    j["m"] = s.m;
    j["N"] = s.N;
    j["depth"] = s.depth();
    j["entries"] = json::array();
    for (const auto& e : s.entries) {
        j["entries"].push_back({{"k", e.k}, {"epsilon", e.epsilon}, {"delta", e.delta}, {"t", e.t}});
    }
    j["cutoff"] = {{"plateau", s.cutoff.plateau}, {"profile", std::string(to_string(s.cutoff.profile))}};
    j["r_max"] = s.r_max;
    j["chart_radius"] = s.chart_radius;
    return j;
}

inline Schedule schedule_from_json(const json& j) {
    try {
        Schedule s;
        s.k0 = j.at("k0").get<int>();
        s.m = j.at("m").get<int>();
        s.N = j.at("N").get<int>();
        const int depth = j.at("depth").get<int>();
        for (const auto& e : j.at("entries")) {
            s.entries.push_back({e.at("k").get<int>(), e.at("epsilon").get<double>(),
                                 e.at("delta").get<double>(), e.at("t").get<double>()});
        }
        if (depth != s.depth()) throw IoError("schedule: depth does not match the number of entries");
        if (j.contains("cutoff")) {
            s.cutoff.plateau = j["cutoff"].value("plateau", 0.25);
            s.cutoff.profile =
                cutoff_profile_from_string(j["cutoff"].value("profile", std::string("log_radial")));
        }
        s.r_max = j.value("r_max", 1.0);
        s.chart_radius = j.value("chart_radius", s.r_max);
        return s;
    } catch (const json::exception& e) {
        throw IoError(std::string("schedule: ") + e.what());
    }
}

inline Schedule load_schedule(const std::filesystem::path& path) {
    return schedule_from_json(parse_json(read_file(path), "schedule file " + path.string()));
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

inline json to_json(const BallCheckReport& r) {
    return {{"samples", r.samples}, {"violations", r.violations}, {"unsampled", r.unsampled},
            {"points", r.points}, {"min_slack", r.min_slack}};
}

inline json to_json(const PinchRow& p) {
    return {{"lo", p.interval.lo},
            {"hi", p.interval.hi},
            {"stage_kappa_min", p.stage.kappa_min},
            {"stage_kappa_max", p.stage.kappa_max},
            {"shell_kappa_min", p.shell.kappa_min},
            {"shell_kappa_max", p.shell.kappa_max},
            {"ok", p.ok()}};
}

inline json to_json(const SqueezeCertificate& c) {
    json j;
    j["schedule"] = to_json(c.schedule);
    j["shells"] = json::array();
    for (const auto& row : c.shells) {
        const auto& cfg = row.shell.cfg;
        j["shells"].push_back({{"k", row.k},
                               {"t_lo", row.t_lo},
                               {"t_hi", row.t_hi},
                               {"s", cfg.s},
                               {"d", cfg.d},
                               {"r", cfg.r()},
                               {"gap", cfg.gap},
                               {"r_threshold", cfg.r_threshold()},
                               {"gap_threshold", cfg.gap_threshold()},
                               {"bound", row.shell.bound},
                               {"checks", {{"cap", to_json(row.cap)},
                                           {"outer", to_json(row.outer)},
                                           {"pinch", to_json(row.pinch)}}}});
    }
    j["aggregate"] = json::array();
    for (const auto& a : c.aggregate) {
        j["aggregate"].push_back(
            {{"t_lo", a.t_lo}, {"t_hi", a.t_hi}, {"bound", a.bound}, {"rows", a.contributing_k}});
    }
    j["strictly_increasing"] = c.strictly_increasing;
    j["envelope_ok"] = c.envelope_ok;
    j["final_bound"] = c.final_bound();
    j["notes"] = c.notes;
    return j;
}

/// (k, bound) pairs for plotting the bound against k.
inline std::string bounds_csv(const SqueezeCertificate& c) {
    std::string out = "k,bound\n";
    for (const auto& row : c.shells) {
        out += std::to_string(row.k) + "," + format_double(row.shell.bound) + "\n";
    }
    return out;
}

/// CSV rows (surface_id, |x'|, kappa_min, kappa_max) for a recorded sweep.
inline std::string curvature_csv_rows(const std::string& surface_id, const CurvatureRange& range) {
    std::string out;
    for (const auto& s : range.samples) {
        out += surface_id + "," + format_double(s.radius) + "," + format_double(s.kappa_min) + "," +
               format_double(s.kappa_max) + "\n";
    }
    return out;
}

}  // namespace sqf
