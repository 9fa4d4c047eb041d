#pragma once

// Command-level orchestration of the three phases: analysis (change
// computation + slicing + selection), offline collection (dependency
// tracing on the instrumented copy), and execution (rewritten suite).

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>

#include "selertion/harness.hpp"
#include "selertion/instrument.hpp"
#include "selertion/store.hpp"

namespace selertion {

struct DriverOptions {
    fs::path projectDir;
    fs::path storeDir;
    bool json = false;
    bool collect = false;
    bool methodLevel = false;  // force assertion-level classes down to method level
};

inline fs::path resolve_store_dir(const fs::path& projectDir, const std::string& cliStore) {
    if (!cliStore.empty()) return fs::path(cliStore);
    if (const char* env = std::getenv("SELERTION_STORE"); env && *env) return fs::path(env);
    return projectDir / ".selertion";
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string report_json(const std::string& revision, const TestReport& r) {
    std::string out = "{\"revision\":\"" + json_escape(revision) + "\",\"testsRun\":" +
                      std::to_string(r.testsRun) +
                      ",\"assertionsEvaluated\":" + std::to_string(r.assertionsEvaluated) +
                      ",\"failures\":" + std::to_string(r.failures) +
                      ",\"errors\":" + std::to_string(r.errors) + ",\"results\":[";
    for (size_t i = 0; i < r.results.size(); ++i) {
        auto& e = r.results[i];
        if (i) out += ",";
        out += "{\"entityId\":\"" + json_escape(e.entityId) + "\",\"outcome\":\"" +
               outcome_name(e.outcome) + "\",\"millis\":" + std::to_string(e.millis) +
               ",\"message\":\"" + json_escape(e.message) + "\"}";
    }
    out += "]}";
    return out;
}

inline void print_report(const DriverOptions& opts, const std::string& revision,
                         const TestReport& r, const Metrics* m) {
    if (opts.json) {
        std::string out = report_json(revision, r);
        if (m) {
            out.pop_back();  // strip closing brace, append metrics fields
            out += ",\"selectedTestRatio\":" + format_ratio(m->selectedTestRatio) +
                   ",\"selectedAssertionRatio\":" + format_ratio(m->selectedAssertionRatio) +
                   "}";
        }
        std::cout << out << "\n";
        return;
    }
    std::cout << render_report(r);
    std::cout << "revision\t" << revision << "\n";
    std::cout << "testsRun\t" << r.testsRun << "\n";
    std::cout << "assertionsEvaluated\t" << r.assertionsEvaluated << "\n";
    std::cout << "failures\t" << r.failures << "\n";
    std::cout << "errors\t" << r.errors << "\n";
    if (m) {
        std::cout << "selectedTestRatio\t" << format_ratio(m->selectedTestRatio) << "\n";
        std::cout << "selectedAssertionRatio\t" << format_ratio(m->selectedAssertionRatio)
                  << "\n";
    }
}

inline long long ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
}

// Recompute and persist slices for the given test classes; classes that
// are gone or not slice-capable lose their slice file.
inline void refresh_class_slices(const Project& p, const TestInventory& inv, const Store& store,
                                 const std::set<std::string>& classes) {
    for (auto& fq : classes) {
        fs::path file = store.slices() / (fq + ".slices");
        const TestClassInfo* ci = inv.find_class(fq);
        if (!ci || classify_selectability(inv, p, fq).level == Level::Class) {
            std::error_code ec;
            fs::remove(file, ec);
            continue;
        }
        save_slices_for_class(store.slices(), fq, compute_class_slices(p, inv, fq));
    }
}

inline void save_all_slices(const Project& p, const TestInventory& inv, const Store& store) {
    std::set<std::string> all;
    for (auto& tc : inv.testClasses) all.insert(tc.fqName);
    refresh_class_slices(p, inv, store, all);
}

inline void write_report_file(const Store& store, const std::string& revision,
                              const TestReport& r) {
    write_file_atomic(store.reports() / (revision + ".report.tsv"), render_report(r));
}

inline void write_metrics_file(const Store& store, const std::string& revision,
                               const Metrics& m) {
    write_file_atomic(store.metrics() / (revision + ".tsv"), render_metrics(m));
}

}  // namespace detail

// Initial run: every class counts as newly added, the whole suite runs
// once, and all store artifacts are built from scratch.
inline int cmd_init(const DriverOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    Project p = load_project(opts.projectDir);
    Store store(opts.storeDir);
    store.ensure_layout();
    StoreLock lock(store.dir);

    TestInventory inv = enumerate_tests(p);
    ChecksumStore sums = compute_store(p);
    save_checksum_store(sums, store.checksums());
    detail::save_all_slices(p, inv, store);

    install_instrumented_copy(p, inv, store.instrumented(), opts.methodLevel);
    save_dependency_db(collect_dependencies(store.instrumented()), store.deps());
    long long analysisMs = detail::ms_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    TestReport report = run_tests(p, inv);
    detail::write_report_file(store, sums.revisionId, report);

    Metrics m;
    bool anyTests = false;
    for (auto& tc : inv.testClasses) anyTests = anyTests || !tc.testMethods.empty();
    m.selectedTestRatio = anyTests ? 1.0 : 0.0;
    m.selectedAssertionRatio = anyTests ? 1.0 : 0.0;
    m.analysisMillis = analysisMs;
    m.executionMillis = detail::ms_since(t1);
    detail::write_metrics_file(store, sums.revisionId, m);

    StoreState state;
    state.lastAnalyzedRevisionId = sums.revisionId;
    state.collectionCurrent = true;
    store.save_state(state);

    detail::print_report(opts, sums.revisionId, report, &m);
    return report.exit_code();
}

// Per-revision analyze + select + execute + restore, then copy sync and
// optional collection refresh.
inline int cmd_run(const DriverOptions& opts) {
    Store store(opts.storeDir);
    StoreState state = store.load_state();
    StoreLock lock(store.dir);

    auto t0 = std::chrono::steady_clock::now();
    Project p = load_project(opts.projectDir);
    TestInventory inv = enumerate_tests(p);
    auto old = load_checksum_store(store.checksums());
    if (!old) throw StoreError("checksum store missing; run init first");
    ChangeSet delta = compute_changes(*old, p);
    ChecksumStore now = compute_store(p);
    const std::string& rev = now.revisionId;

    // refresh assertion slices for changed test classes, purge stale ones
    std::set<std::string> touchedTestClasses;
    for (auto& c : delta.classChanges)
        if (c.isTest) touchedTestClasses.insert(c.fqName);
    for (auto& mc : delta.methodChanges)
        if (mc.isTest) touchedTestClasses.insert(slices_class_of(mc.signature));
    detail::refresh_class_slices(p, inv, store, touchedTestClasses);

    TestReport report;
    Metrics metrics;
    if (delta.empty()) {
        detail::write_report_file(store, rev, report);
        metrics.analysisMillis = detail::ms_since(t0);
        detail::write_metrics_file(store, rev, metrics);
        state.lastAnalyzedRevisionId = rev;
        store.save_state(state);
        detail::print_report(opts, rev, report, &metrics);
        return 0;
    }

    DependencyDB db = load_dependency_db(store.deps());
    SliceStore slices = load_slice_store(store.slices());
    SelectionResult sel = select_tests(p, inv, slices, db, delta);

    if (!state.collectionCurrent) {
        // stale dependency data: any test class whose file changed is
        // selected whole, conservatively
        std::set<std::string> changedFiles;
        for (auto& [path, sum] : now.fileSums) {
            auto it = old->fileSums.find(path);
            if (it == old->fileSums.end() || it->second != sum) changedFiles.insert(path);
        }
        for (auto& tc : inv.testClasses) {
            auto it = p.fileOf.find(tc.fqName);
            if (it != p.fileOf.end() && changedFiles.count(it->second)) {
                sel.gammaC.insert(tc.fqName);
                sel.triggers.emplace("C=" + tc.fqName, "staleCollection");
            }
        }
        for (auto it = sel.gammaM.begin(); it != sel.gammaM.end();)
            it = sel.gammaC.count(slices_class_of(*it)) ? sel.gammaM.erase(it) : ++it;
        for (auto it = sel.gammaA.begin(); it != sel.gammaA.end();) {
            const std::string& sig = it->second.methodSignature;
            if (sel.gammaM.count(sig) || sel.gammaC.count(slices_class_of(sig)))
                it = sel.gammaA.erase(it);
            else
                ++it;
        }
    }

    write_file_atomic(store.selection() / (rev + ".tsv"), render_selection_manifest(sel));
    save_checksum_store(now, store.checksums());
    metrics = compute_metrics(sel, inv);
    metrics.analysisMillis = detail::ms_since(t0);

    if (!sel.empty()) {
        sel.rewrittenFiles = rewrite_tests(p, inv, slices, sel);
        apply_rewrite(opts.projectDir, store.backup(), sel.rewrittenFiles);
        auto t1 = std::chrono::steady_clock::now();
        try {
            report = execute_tests(opts.projectDir);
        } catch (...) {
            restore_tests(opts.projectDir, store.backup());
            throw;
        }
        metrics.executionMillis = detail::ms_since(t1);
        restore_tests(opts.projectDir, store.backup());
        for (auto& [path, text] : sel.rewrittenFiles)
            write_file_atomic(store.rewritten() / rev / path, text);
    }

    detail::write_report_file(store, rev, report);
    detail::write_metrics_file(store, rev, metrics);

    sync_instrumented_copy(p, inv, store.instrumented(), opts.methodLevel);
    state.collectionCurrent = false;
    if (opts.collect) {
        save_dependency_db(collect_dependencies(store.instrumented()), store.deps());
        state.collectionCurrent = true;
    }
    state.lastAnalyzedRevisionId = rev;
    store.save_state(state);

    detail::print_report(opts, rev, report, &metrics);
    return report.exit_code();
}

// Full suite on the original sources, no selection.
inline int cmd_retestall(const DriverOptions& opts) {
    Project p = load_project(opts.projectDir);
    TestInventory inv = enumerate_tests(p);
    TestReport report = run_tests(p, inv);
    std::string rev = compute_store(p).revisionId;
    Store store(opts.storeDir);
    store.ensure_layout();
    detail::write_report_file(store, rev, report);
    detail::print_report(opts, rev, report, nullptr);
    return report.exit_code();
}

inline int cmd_mutate(const DriverOptions& opts, unsigned long long seed,
                      const std::string& outDir) {
    fs::path out = outDir.empty()
                       ? fs::path(opts.projectDir.string() + ".mutant" + std::to_string(seed))
                       : fs::path(outDir);
    MutantInfo info = generate_mutant(opts.projectDir, seed, out);
    if (opts.json) {
        std::cout << "{\"mutationOp\":\"" << info.mutationOp << "\",\"file\":\""
                  << detail::json_escape(info.file) << "\",\"methodSignature\":\""
                  << detail::json_escape(info.methodSignature) << "\",\"description\":\""
                  << detail::json_escape(info.description) << "\",\"outDir\":\""
                  << detail::json_escape(out.string()) << "\"}\n";
    } else {
        std::cout << "mutationOp\t" << info.mutationOp << "\n";
        std::cout << "file\t" << info.file << "\n";
        std::cout << "methodSignature\t" << info.methodSignature << "\n";
        std::cout << "description\t" << info.description << "\n";
        std::cout << "outDir\t" << out.string() << "\n";
    }
    return 0;
}

inline int cmd_report(const DriverOptions& opts, const std::string& revision) {
    Store store(opts.storeDir);
    fs::path file = store.reports() / (revision + ".report.tsv");
    if (!fs::exists(file)) {
        std::cerr << "no report for revision " << revision << "\n";
        return 2;
    }
    std::string text = read_file(file);
    if (opts.json) {
        std::string out = "{\"revision\":\"" + detail::json_escape(revision) +
                          "\",\"results\":[";
        bool first = true;
        for (auto& row : tsv_parse(text)) {
            if (!first) out += ",";
            first = false;
            out += "{\"entityId\":\"" + detail::json_escape(row[0]) + "\",\"outcome\":\"" +
                   row[1] + "\",\"millis\":" + row[2] + "}";
        }
        out += "]}";
        std::cout << out << "\n";
    } else {
        std::cout << text;
    }
    return 0;
}

inline int cmd_oracle(const DriverOptions& opts, const fs::path& dirV1, const fs::path& dirV2) {
    std::set<std::string> affected = oracle_affected_entities(dirV1, dirV2);
    if (opts.json) {
        std::string out = "[";
        bool first = true;
        for (auto& s : affected) {
            if (!first) out += ",";
            first = false;
            out += "\"" + detail::json_escape(s) + "\"";
        }
        out += "]";
        std::cout << out << "\n";
    } else {
        for (auto& s : affected) std::cout << s << "\n";
    }
    return 0;
}

}  // namespace selertion
