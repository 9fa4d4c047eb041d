#pragma once

// On-disk store layout, advisory locking, and phase state. All writes
// inside the store follow the write-temp-then-rename discipline so a
// crash leaves either the old or the new state, never a mix.

#include <string>

#include "selertion/fingerprint.hpp"
#include "selertion/util.hpp"

namespace selertion {

inline constexpr const char* kStoreLayoutVersion = "1";

struct StoreState {
    std::string layoutVersion = kStoreLayoutVersion;
    std::string lastAnalyzedRevisionId;
    bool collectionCurrent = false;
};

struct Store {
    fs::path dir;

    explicit Store(fs::path d) : dir(std::move(d)) {}

    fs::path checksums() const { return dir / "checksums"; }
    fs::path slices() const { return dir / "slices"; }
    fs::path deps() const { return dir / "deps"; }
    fs::path reports() const { return dir / "reports"; }
    fs::path selection() const { return dir / "selection"; }
    fs::path metrics() const { return dir / "metrics"; }
    fs::path rewritten() const { return dir / "rewritten"; }
    fs::path instrumented() const { return dir / "instrumented"; }
    fs::path backup() const { return dir / "backup"; }
    fs::path state_file() const { return dir / "state.tsv"; }

    bool initialized() const { return fs::exists(state_file()); }

    void ensure_layout() const {
        for (auto& p : {dir, checksums(), slices(), deps(), reports(), selection(), metrics(),
                        rewritten(), instrumented()})
            fs::create_directories(p);
    }

    StoreState load_state() const {
        if (!initialized()) throw StoreError("store not initialized: " + dir.string());
        StoreState st;
        for (auto& row : tsv_parse(read_file(state_file()))) {
            if (row[0] == "layoutVersion") st.layoutVersion = row[1];
            if (row[0] == "lastAnalyzedRevisionId") st.lastAnalyzedRevisionId = row[1];
            if (row[0] == "collectionCurrent") st.collectionCurrent = row[1] == "1";
        }
        if (st.layoutVersion != kStoreLayoutVersion)
            throw StoreError("store layout version mismatch: found " + st.layoutVersion +
                             ", expected " + kStoreLayoutVersion);
        return st;
    }

    void save_state(const StoreState& st) const {
        std::vector<std::vector<std::string>> rows = {
            {"collectionCurrent", st.collectionCurrent ? "1" : "0"},
            {"lastAnalyzedRevisionId", st.lastAnalyzedRevisionId},
            {"layoutVersion", st.layoutVersion},
        };
        write_file_atomic(state_file(), tsv_render(rows));
    }
};

// Whole-directory advisory lock: one writer at a time per store.
class StoreLock {
public:
    explicit StoreLock(const fs::path& storeDir) : lockDir_(storeDir / ".lock") {
        fs::create_directories(storeDir);
        std::error_code ec;
        if (!fs::create_directory(lockDir_, ec) || ec)
            throw StoreError("store lock held by another process: " + lockDir_.string());
        owned_ = true;
    }

    StoreLock(const StoreLock&) = delete;
    StoreLock& operator=(const StoreLock&) = delete;

    ~StoreLock() {
        if (owned_) {
            std::error_code ec;
            fs::remove(lockDir_, ec);
        }
    }

private:
    fs::path lockDir_;
    bool owned_ = false;
};

}  // namespace selertion
