#pragma once

// Test runner: executes suites (original, instrumented, or rewritten)
// with @Before/@BeforeClass lifecycle, expected-exception semantics and
// parameterized rows, and folds instrumentation trace records into the
// per-entity dependency database.

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "selertion/instrument.hpp"
#include "selertion/interp.hpp"

namespace selertion {

enum class Outcome { Pass, Fail, Error };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::Pass: return "pass";
        case Outcome::Fail: return "fail";
        case Outcome::Error: return "error";
    }
    return "?";
}

struct EntityResult {
    std::string entityId;  // M=<class>#<method(sig)>
    Outcome outcome = Outcome::Pass;
    std::string message;
    long long millis = 0;
    // assertions evaluated while running this entity; on failure the
    // highest index is the failing assertion, earlier ones passed
    long long assertionsEvaluated = 0;
    int failLine = 0;  // source line of the failed assertion, 0 otherwise
};

struct TestReport {
    std::vector<EntityResult> results;
    int testsRun = 0;  // distinct test methods (slice methods fold into their owner)
    long long assertionsEvaluated = 0;
    int failures = 0;
    int errors = 0;
    std::string output;
    // per test-method exhaustive call traces, when requested
    std::map<std::string, std::set<std::string>> tracedCalls;

    int exit_code() const { return (failures + errors) > 0 ? 1 : 0; }
};

inline std::string render_report(const TestReport& r) {
    std::vector<std::vector<std::string>> rows;
    for (auto& e : r.results)
        rows.push_back({e.entityId, outcome_name(e.outcome), std::to_string(e.millis)});
    return tsv_render(rows);
}

// generated slice methods are named <method>__slice<k>
inline std::string strip_slice_suffix(const std::string& name) {
    auto pos = name.rfind("__slice");
    if (pos == std::string::npos) return name;
    std::string tail = name.substr(pos + 7);
    if (tail.empty() || tail.find_first_not_of("0123456789") != std::string::npos) return name;
    return name.substr(0, pos);
}

inline std::string entity_class_of(const std::string& entityId) {
    auto eq = entityId.find('=');
    std::string rest = eq == std::string::npos ? entityId : entityId.substr(eq + 1);
    auto hash = rest.find('#');
    return hash == std::string::npos ? rest : rest.substr(0, hash);
}

// --- dependency collection -------------------------------------------------

struct DependencyDB {
    std::map<std::string, std::set<std::string>> entries;  // entityId -> signatures
};

class DependencyCollector {
public:
    TraceSink sink() {
        return [this](const std::string& kind, const std::string& payload) {
            if (kind == "emit") {
                for (auto& frame : stack_) frame.second.insert(payload);
            } else if (kind == "begin") {
                stack_.emplace_back(payload, std::set<std::string>{});
            } else {
                close(payload);
            }
        };
    }

    size_t depth() const { return stack_.size(); }

    // force-close scopes left open by an exceptional exit
    void unwind_to(size_t depth) {
        while (stack_.size() > depth) pop_top();
    }

    DependencyDB take_db() {
        if (!stack_.empty()) throw StoreError("marker imbalance: unclosed trace scopes");
        DependencyDB db;
        db.entries = db_;
        // setup-scope callees merge into every entity of the same class
        for (auto& [id, sigs] : db_) {
            if (!starts_with(id, "B=")) continue;
            std::string cls = id.substr(2);
            for (auto& [other, set] : db.entries) {
                if (!starts_with(other, "B=") && entity_class_of(other) == cls)
                    set.insert(sigs.begin(), sigs.end());
            }
        }
        for (auto it = db.entries.begin(); it != db.entries.end();)
            it = starts_with(it->first, "B=") ? db.entries.erase(it) : ++it;
        return db;
    }

private:
    void close(const std::string& id) {
        bool found = false;
        for (auto& frame : stack_)
            if (frame.first == id) found = true;
        if (!found) throw StoreError("marker imbalance: end without begin for " + id);
        while (!stack_.empty()) {
            bool match = stack_.back().first == id;
            pop_top();
            if (match) break;
        }
    }

    void pop_top() {
        auto& [id, sigs] = stack_.back();
        db_[id].insert(sigs.begin(), sigs.end());
        stack_.pop_back();
    }

    std::vector<std::pair<std::string, std::set<std::string>>> stack_;
    std::map<std::string, std::set<std::string>> db_;
};

inline void save_dependency_db(const DependencyDB& db, const fs::path& depsDir) {
    fs::remove_all(depsDir);
    fs::create_directories(depsDir);
    for (auto& [id, sigs] : db.entries) {
        std::string text;
        for (auto& s : sigs) text += s + "\n";
        write_file_atomic(depsDir / (id + ".dep"), text);
    }
}

inline DependencyDB load_dependency_db(const fs::path& depsDir) {
    DependencyDB db;
    if (!fs::exists(depsDir)) return db;
    std::vector<fs::path> paths;
    for (auto& e : fs::directory_iterator(depsDir))
        if (e.path().extension() == ".dep") paths.push_back(e.path());
    std::sort(paths.begin(), paths.end());
    for (auto& p : paths) {
        std::string id = p.filename().string();
        id = id.substr(0, id.size() - 4);
        auto& set = db.entries[id];
        for (auto& line : split(read_file(p), '\n'))
            if (!line.empty()) set.insert(line);
    }
    return db;
}

// --- runner ----------------------------------------------------------------

struct RunOptions {
    const std::set<std::string>* filter = nullptr;  // entity ids C=... / M=...
    DependencyCollector* collector = nullptr;
    bool callClassMarkers = false;  // invoke synthesized class marker methods
    bool traceCalls = false;        // fill TestReport::tracedCalls
};

namespace detail {

// @Test methods visible on a class: own declarations first, then
// inherited ones not overridden by name+arity.
inline std::vector<const MethodModel*> gather_test_methods(const Project& p,
                                                           const std::string& classFq) {
    std::vector<const MethodModel*> out;
    std::set<std::string> seen;  // name/arity keys
    for (const ClassModel* cm = p.find_class(classFq); cm;
         cm = cm->superName.empty() ? nullptr : p.find_class(cm->superName)) {
        for (auto& m : cm->methods) {
            std::string key = m.name + "/" + std::to_string(m.decl->params.size());
            if (!seen.insert(key).second) continue;
            if (m.isTest) out.push_back(&m);
        }
    }
    return out;
}

inline std::vector<const MethodModel*> gather_lifecycle(const Project& p,
                                                        const std::string& classFq,
                                                        bool beforeClass) {
    // super-first order
    std::vector<const MethodModel*> chainOut;
    std::vector<const ClassModel*> chain;
    for (const ClassModel* cm = p.find_class(classFq); cm;
         cm = cm->superName.empty() ? nullptr : p.find_class(cm->superName))
        chain.push_back(cm);
    std::reverse(chain.begin(), chain.end());
    for (auto* cm : chain)
        for (auto& m : cm->methods)
            if ((beforeClass && m.isBeforeClass) || (!beforeClass && m.isBefore))
                chainOut.push_back(&m);
    return chainOut;
}

// non-static fields in declaration order, root class first (binding
// order for parameterized rows)
inline std::vector<std::string> instance_field_order(const Project& p,
                                                     const std::string& classFq) {
    std::vector<std::string> out;
    std::vector<const ClassModel*> chain;
    for (const ClassModel* cm = p.find_class(classFq); cm;
         cm = cm->superName.empty() ? nullptr : p.find_class(cm->superName))
        chain.push_back(cm);
    std::reverse(chain.begin(), chain.end());
    for (auto* cm : chain)
        for (auto& f : cm->decl->fields)
            if (!f.isStatic) out.push_back(f.name);
    return out;
}

inline std::string sig_tail(const std::string& sig) {
    auto hash = sig.find('#');
    return hash == std::string::npos ? sig : sig.substr(hash + 1);
}

}  // namespace detail

inline TestReport run_tests(const Project& p, const TestInventory& inv, RunOptions opts = {}) {
    Interpreter interp(p);
    if (opts.collector) interp.set_trace_sink(opts.collector->sink());

    TestReport report;
    std::string currentTraceKey;
    if (opts.traceCalls) {
        interp.set_call_hook([&](const MethodModel& m) {
            if (!currentTraceKey.empty()) report.tracedCalls[currentTraceKey].insert(m.signature);
        });
    }

    std::set<std::string> distinctTests;

    for (auto& tc : inv.testClasses) {
        const std::string& fq = tc.fqName;

        auto testMethods = detail::gather_test_methods(p, fq);
        if (opts.filter) {
            bool wholeClass = opts.filter->count("C=" + fq) > 0;
            if (!wholeClass) {
                std::vector<const MethodModel*> kept;
                for (auto* tm : testMethods) {
                    std::string id = "M=" + fq + "#" + detail::sig_tail(tm->signature);
                    if (opts.filter->count(id)) kept.push_back(tm);
                }
                testMethods = std::move(kept);
            }
            if (testMethods.empty()) continue;
        }

        size_t classDepth = opts.collector ? opts.collector->depth() : 0;
        auto classError = [&](const std::string& msg) {
            for (auto* tm : testMethods) {
                EntityResult r;
                r.entityId = "M=" + fq + "#" + detail::sig_tail(tm->signature);
                r.outcome = Outcome::Error;
                r.message = msg;
                report.results.push_back(r);
                ++report.errors;
                distinctTests.insert(fq + "#" + strip_slice_suffix(tm->name));
            }
            if (opts.collector) opts.collector->unwind_to(classDepth);
        };

        if (opts.callClassMarkers && p.resolve_method(fq, kClassBeginMethod, 0)) {
            try {
                interp.invoke_by_name(fq, kClassBeginMethod, nullptr, {});
            } catch (...) {
                classError("class marker failed");
                continue;
            }
        }

        // rows for parameterized classes; one empty row otherwise
        std::vector<std::vector<Value>> rows;
        std::set<std::string> classTrace;
        try {
            if (tc.parameterized) {
                currentTraceKey = opts.traceCalls ? "__class__" : "";
                Value v = interp.static_field(fq, "params");
                if (!std::holds_alternative<ListPtr>(v.v))
                    throw MjError("params field of " + fq + " is not a row list");
                for (auto& row : *std::get<ListPtr>(v.v)) {
                    if (std::holds_alternative<ListPtr>(row.v))
                        rows.push_back(*std::get<ListPtr>(row.v));
                    else
                        rows.push_back({row});
                }
            } else {
                rows.emplace_back();
            }

            currentTraceKey = opts.traceCalls ? "__class__" : "";
            size_t d = opts.collector ? opts.collector->depth() : 0;
            try {
                for (auto* bc : detail::gather_lifecycle(p, fq, true))
                    interp.invoke(*bc, nullptr, {});
            } catch (...) {
                if (opts.collector) opts.collector->unwind_to(d);
                throw;
            }
        } catch (const MjError& e) {
            classError(e.message);
            continue;
        } catch (const MjThrow& t) {
            classError("unhandled exception " + t.name);
            continue;
        } catch (const AssertFail& f) {
            classError(f.message);
            continue;
        }
        if (opts.traceCalls && report.tracedCalls.count("__class__")) {
            classTrace = report.tracedCalls["__class__"];
            report.tracedCalls.erase("__class__");
        }

        auto fieldOrder = detail::instance_field_order(p, fq);
        std::map<std::string, EntityResult> agg;  // entityId -> aggregated result
        std::vector<std::string> order;

        for (auto& row : rows) {
            for (auto* tm : testMethods) {
                std::string entityId = "M=" + fq + "#" + detail::sig_tail(tm->signature);
                if (!agg.count(entityId)) {
                    order.push_back(entityId);
                    agg[entityId].entityId = entityId;
                }
                EntityResult& slot = agg[entityId];
                currentTraceKey = opts.traceCalls ? entityId : "";

                long long assertsBefore = interp.assertions_evaluated();
                auto t0 = std::chrono::steady_clock::now();
                size_t d = opts.collector ? opts.collector->depth() : 0;
                Outcome outcome = Outcome::Pass;
                std::string message;
                int failLine = 0;
                try {
                    ObjPtr obj = interp.instantiate(fq, {});
                    for (size_t i = 0; i < fieldOrder.size() && i < row.size(); ++i)
                        obj->fields[fieldOrder[i]] = row[i];
                    for (auto* b : detail::gather_lifecycle(p, fq, false))
                        interp.invoke(*b, obj, {});
                    interp.invoke(*tm, obj, {});
                    if (!tm->expectsException.empty()) {
                        outcome = Outcome::Fail;
                        message = "expected " + tm->expectsException + " was not thrown";
                    }
                } catch (const AssertFail& f) {
                    outcome = Outcome::Fail;
                    message = f.message;
                    failLine = f.line;
                } catch (const MjThrow& t) {
                    if (t.name == tm->expectsException) {
                        outcome = Outcome::Pass;
                    } else {
                        outcome = Outcome::Error;
                        message = "unhandled exception " + t.name;
                    }
                } catch (const MjError& e) {
                    outcome = Outcome::Error;
                    message = e.message;
                }
                if (opts.collector) opts.collector->unwind_to(d);

                slot.millis += std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - t0)
                                   .count();
                slot.assertionsEvaluated += interp.assertions_evaluated() - assertsBefore;
                if (int(outcome) > int(slot.outcome)) {
                    slot.outcome = outcome;
                    slot.message = message;
                    slot.failLine = failLine;
                } else if (outcome != Outcome::Pass && slot.message.empty()) {
                    slot.message = message;
                    slot.failLine = failLine;
                }
                distinctTests.insert(fq + "#" + strip_slice_suffix(tm->name));
            }
        }
        currentTraceKey.clear();

        if (opts.callClassMarkers && p.resolve_method(fq, kClassEndMethod, 0)) {
            try {
                interp.invoke_by_name(fq, kClassEndMethod, nullptr, {});
            } catch (...) {
                // marker method failures must not mask test outcomes
            }
        }
        if (opts.collector) opts.collector->unwind_to(classDepth);

        for (auto& id : order) {
            EntityResult& r = agg[id];
            if (!classTrace.empty()) report.tracedCalls[id].insert(classTrace.begin(),
                                                                   classTrace.end());
            if (r.outcome == Outcome::Fail) ++report.failures;
            if (r.outcome == Outcome::Error) ++report.errors;
            report.results.push_back(std::move(r));
        }
    }

    report.testsRun = int(distinctTests.size());
    report.assertionsEvaluated = interp.assertions_evaluated();
    report.output = interp.output();
    return report;
}

inline TestReport execute_tests(const fs::path& projectDir,
                                const std::set<std::string>* filter = nullptr) {
    Project p = load_project(projectDir);
    TestInventory inv = enumerate_tests(p);
    RunOptions opts;
    opts.filter = filter;
    return run_tests(p, inv, opts);
}

// Offline collection: run the whole suite on the instrumented copy and
// fold trace records into per-entity dependency sets.
inline DependencyDB collect_dependencies(const fs::path& instrumentedDir) {
    Project p = load_project(instrumentedDir);
    TestInventory inv = enumerate_tests(p);
    DependencyCollector collector;
    RunOptions opts;
    opts.collector = &collector;
    opts.callClassMarkers = true;
    run_tests(p, inv, opts);
    return collector.take_db();
}

}  // namespace selertion
