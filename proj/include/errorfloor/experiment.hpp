#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace efloor {

struct InvalidManifest : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TaskFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyStore : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runs one experiment manifest (JSON). Tasks: code-info, decode, mc-sweep,
// instanton-search, biased-search, spectrum, ct-verify, report. Writes
// results plus a manifest copy and provenance (seed, config, manifest hash)
// into the manifest's output directory. Re-running a manifest reproduces
// outputs byte-identically; interrupted sweeps and spectra resume from the
// checkpoint rows already on disk.
//
// Returns a short human-readable summary (also printed by the CLI).
std::string run_manifest(const std::string& manifest_json);

// Stable FNV-1a hash of the canonical manifest serialization.
std::uint64_t manifest_hash(const std::string& manifest_json);

}  // namespace efloor
