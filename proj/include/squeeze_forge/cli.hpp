#pragma once

// Command implementations behind the squeeze-forge and squeeze-cert tools.
// Each returns a process exit code and writes one JSON line per failure to
// the diagnostic stream.

#include "squeeze_forge/certificate.hpp"
#include "squeeze_forge/io.hpp"
#include "squeeze_forge/schedule.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sqf {

enum ExitCode : int {
    kExitOk = 0,
    kExitViolations = 1,
    kExitSearch = 2,
    kExitIo = 3,
    kExitConfig = 4,
};

struct RunConfig {
    int n = 4;
    int k0 = 10;
    int depth = 6;
    std::optional<int> m;
    std::optional<std::uint64_t> seed;
    int grid = 512;
    std::uint64_t pairs = 1'000'000;
    std::uint64_t samples = 1'000'000;
    std::string out;
    std::string schedule;

    /// n = 2m reads as C^m.
    bool complex_interpretable() const { return n % 2 == 0; }

    void validate() const {
        if (n < 2) throw InvariantViolation("--n must be at least 2");
        if (depth < 1) throw InvariantViolation("--depth must be at least 1");
        if (k0 < 2) throw InvariantViolation("--k0 must be at least 2");
        if (m && *m < 1) throw InvariantViolation("--m must be at least 1");
        if (grid < 2) throw InvariantViolation("--grid must be at least 2");
    }

    /// Randomized suites cannot run without a seed or with zero samples.
    void validate_randomized() const {
        validate();
        if (!seed) throw InvariantViolation("--seed is required for randomized checks");
        if (samples == 0) throw InvariantViolation("--samples 0: randomized hypotheses cannot be skipped");
        if (pairs == 0) throw InvariantViolation("--pairs 0: randomized hypotheses cannot be skipped");
    }

    PinchConfig pinch(bool record = false) const {
        PinchConfig p;
        p.dim = n - 1;
        p.sweep.grid = grid;
        p.sweep.record = record;
        return p;
    }
};

inline void emit_diagnostic(std::ostream& diag, json line) { diag << line.dump() << '\n'; }

namespace detail {

inline int config_error(std::ostream& diag, const std::exception& e) {
    emit_diagnostic(diag, {{"error", "config"}, {"message", e.what()}});
    return kExitConfig;
}

inline int io_error(std::ostream& diag, const std::exception& e) {
    emit_diagnostic(diag, {{"error", "io"}, {"message", e.what()}});
    return kExitIo;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

inline int cmd_build(const RunConfig& cfg, std::ostream& diag) {
    try {
        cfg.validate();
    } catch (const std::exception& e) {
        return detail::config_error(diag, e);
    }
    const PinchConfig pinch = cfg.pinch();
    Schedule sched;
    try {
        EpsilonCache cache(pinch);
        const int m = cfg.m ? *cfg.m : find_m(cfg.k0, cfg.k0 + cfg.depth - 1, pinch, &cache).m;
        sched = build_schedule(cfg.k0, cfg.depth, m, pinch, &cache);
        if (sched.N > sched.k0) {
            throw SearchExhausted(sched.k0, m, "k0 lies below the start index N");
        }
    } catch (const SearchExhausted& e) {
        emit_diagnostic(diag, {{"error", "search-exhausted"}, {"k", e.k()}, {"m", e.m()}, {"message", e.what()}});
        return kExitSearch;
    } catch (const NotFound& e) {
        emit_diagnostic(diag, {{"error", "search-exhausted"}, {"k", cfg.k0}, {"message", e.what()}});
        return kExitSearch;
    } catch (const HypothesisViolated& e) {
        emit_diagnostic(diag, {{"error", "search-exhausted"}, {"k", cfg.k0}, {"message", e.what()}});
        return kExitSearch;
    } catch (const InvariantViolation& e) {
        emit_diagnostic(diag, {{"error", "search-exhausted"}, {"k", cfg.k0}, {"message", e.what()}});
        return kExitSearch;
    } catch (const DomainError& e) {
        emit_diagnostic(diag, {{"error", "search-exhausted"}, {"k", cfg.k0}, {"message", e.what()}});
        return kExitSearch;
    }
    try {
        write_atomic(cfg.out.empty() ? "schedule.json" : cfg.out, dump17(to_json(sched)));
    } catch (const std::exception& e) {
        return detail::io_error(diag, e);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct SuiteFailure {
    std::string suite;
    int k = 0;
    std::string detail;
};

struct Verification {
    std::vector<SuiteFailure> failures;
    std::vector<std::pair<std::string, std::string>> csv;  // file name, content
    bool ok() const { return failures.empty(); }
};

inline std::string ball_csv_row(int k, const char* check, const BallCheckReport& r) {
    return std::to_string(k) + "," + check + "," + std::to_string(r.samples) + "," +
           std::to_string(r.violations) + "," + std::to_string(r.unsampled) + "," +
           format_double(r.min_slack) + "\n";
}

/**
 * Runs the suites schedule, pinch, exhaustion, convexity, cap and outer.
 * A schedule that cannot be turned into a domain fails "schedule" and skips
 * the rest. `balls` = false leaves the cap and outer checks to the caller.
 */
inline Verification run_verification(const Schedule& sched, const RunConfig& cfg, bool balls = true) {
    Verification v;
    auto fail = [&](std::string suite, int k, std::string detail) {
        v.failures.push_back({std::move(suite), k, std::move(detail)});
    };
    const int k_first = sched.entries.empty() ? sched.k0 : sched.entries.front().k;
    for (const auto& issue : schedule_issues(sched)) fail("schedule", k_first, issue);

    std::optional<DomainModel> final_dom;
    try {
        final_dom.emplace(sched.domain(sched.depth(), cfg.n));
    } catch (const std::exception& e) {
        fail("schedule", k_first, e.what());
    }
    if (!final_dom) return v;

    const PinchConfig pinch = cfg.pinch(true);
    std::string curv = "surface_id,radius,kappa_min,kappa_max\n";
    std::string pinch_csv = "k,lo,hi,stage_kappa_min,stage_kappa_max,shell_kappa_min,shell_kappa_max,ok\n";
    for (const auto& row : pinch_rows(sched, pinch)) {
        curv += curvature_csv_rows("stage_" + std::to_string(row.k), row.stage);
        curv += curvature_csv_rows("shell_" + std::to_string(row.k), row.shell);
        pinch_csv += std::to_string(row.k) + "," + format_double(row.interval.lo) + "," +
                     format_double(row.interval.hi) + "," + format_double(row.stage.kappa_min) + "," +
                     format_double(row.stage.kappa_max) + "," + format_double(row.shell.kappa_min) + "," +
                     format_double(row.shell.kappa_max) + "," + (row.ok() ? "1" : "0") + "\n";
        if (!row.ok()) {
            fail("pinch", row.k,
                 "curvature range [" + format_double(std::min(row.stage.kappa_min, row.shell.kappa_min)) +
                     ", " + format_double(std::max(row.stage.kappa_max, row.shell.kappa_max)) +
                     "] leaves [" + format_double(row.interval.lo) + ", " + format_double(row.interval.hi) +
                     "]");
        }
    }
    v.csv.emplace_back("curvature.csv", std::move(curv));
    v.csv.emplace_back("pinch.csv", std::move(pinch_csv));

    const auto ex = exhaustion_report(sched.stack(), 10'000);
    v.csv.emplace_back("exhaustion.csv", "comparisons,monotone_failures,identity_failures\n" +
                                             std::to_string(ex.comparisons) + "," +
                                             std::to_string(ex.monotone_failures) + "," +
                                             std::to_string(ex.identity_failures) + "\n");
    if (!ex.ok()) {
        fail("exhaustion", k_first,
             std::to_string(ex.monotone_failures) + " monotonicity and " +
                 std::to_string(ex.identity_failures) + " identity failures");
    }

    const auto conv = convexity_check(*final_dom, cfg.pairs, *cfg.seed);
    v.csv.emplace_back("convexity.csv", "pairs,violations,unsampled,min_clearance\n" +
                                            std::to_string(conv.pairs) + "," + std::to_string(conv.violations) +
                                            "," + std::to_string(conv.unsampled) + "," +
                                            format_double(conv.min_clearance) + "\n");
    if (!conv.ok()) fail("convexity", k_first, std::to_string(conv.violations) + " midpoint violations");

    if (!balls) return v;
    std::string balls_csv = "k,check,samples,violations,unsampled,min_slack\n";
    for (int i = 0; i < sched.depth(); ++i) {
        const auto& e = sched.entries[static_cast<std::size_t>(i)];
        const DomainModel stage = sched.domain(i + 1, cfg.n);
        const std::uint64_t seed = *cfg.seed * 1000003ull + static_cast<std::uint64_t>(e.k);
        const auto cap = cap_inside_check(stage, e.k, sched.m, e.delta, cfg.samples, seed);
        const auto outer = outer_contains_check(stage, e.k, sched.m, e.delta, cfg.samples, seed);
        balls_csv += ball_csv_row(e.k, "cap", cap);
        balls_csv += ball_csv_row(e.k, "outer", outer);
        if (!cap.ok()) fail("cap", e.k, std::to_string(cap.violations) + " cap points outside the domain");
        if (!outer.ok()) {
            fail("outer", e.k, std::to_string(outer.violations) + " domain points outside the outer ball");
        }
    }
    v.csv.emplace_back("balls.csv", std::move(balls_csv));
    return v;
}

inline void write_reports(const Verification& v, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : v.csv) write_atomic(dir / name, content);
}

inline void emit_failures(const Verification& v, std::ostream& diag) {
    for (const auto& f : v.failures) {
        emit_diagnostic(diag, {{"error", "violation"}, {"suite", f.suite}, {"k", f.k}, {"message", f.detail}});
    }
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& diag) {
    try {
        cfg.validate_randomized();
    } catch (const std::exception& e) {
        return detail::config_error(diag, e);
    }
    Schedule sched;
    try {
        sched = load_schedule(cfg.schedule);
    } catch (const std::exception& e) {
        return detail::io_error(diag, e);
    }
    const Verification v = run_verification(sched, cfg);
    try {
        write_reports(v, cfg.out.empty() ? "." : cfg.out);
    } catch (const std::exception& e) {
        return detail::io_error(diag, e);
    }
    emit_failures(v, diag);
    return v.ok() ? kExitOk : kExitViolations;
}

// ---------------------------------------------------------------------------
// certificate
// ---------------------------------------------------------------------------

inline std::filesystem::path bounds_csv_path(const std::filesystem::path& json_path) {
    std::filesystem::path p = json_path;
    return p.replace_extension(".csv");
}

inline int cmd_certificate(const RunConfig& cfg, std::ostream& diag) {
    try {
        cfg.validate_randomized();
    } catch (const std::exception& e) {
        return detail::config_error(diag, e);
    }
    Schedule sched;
    try {
        sched = load_schedule(cfg.schedule);
    } catch (const std::exception& e) {
        return detail::io_error(diag, e);
    }
    const Verification v = run_verification(sched, cfg, false);
    if (!v.ok()) {
        emit_failures(v, diag);
        return kExitViolations;
    }
    CertificateConfig cc;
    cc.pinch = cfg.pinch();
    cc.n = cfg.n;
    cc.samples = cfg.samples;
    cc.seed = *cfg.seed;
    SqueezeCertificate cert;
    try {
        cert = build_certificate(sched, cc);
    } catch (const PrerequisiteFailed& e) {
        emit_diagnostic(diag, {{"error", "violation"}, {"suite", e.suite()}, {"k", e.k()}, {"message", e.what()}});
        return kExitViolations;
    }
    json j = to_json(cert);
    j["n"] = cfg.n;
    j["complex_interpretable"] = cfg.complex_interpretable();
    j["samples"] = cfg.samples;
    j["seed"] = *cfg.seed;
    const std::filesystem::path out = cfg.out.empty() ? "certificate.json" : cfg.out;
    try {
        write_atomic(out, dump17(j));
        write_atomic(bounds_csv_path(out), bounds_csv(cert));
    } catch (const std::exception& e) {
        return detail::io_error(diag, e);
    }
    return kExitOk;
}

}  // namespace sqf
