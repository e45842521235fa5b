#include "errorfloor/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "errorfloor/channel.hpp"
#include "errorfloor/comptree.hpp"
#include "errorfloor/decoder.hpp"
#include "errorfloor/graph.hpp"
#include "errorfloor/mc.hpp"
#include "errorfloor/rng.hpp"
#include "errorfloor/search.hpp"

namespace efloor {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t manifest_hash(const std::string& manifest_json) {
    // FNV-1a over the canonical (key-sorted) serialization.
    const std::string canon = json::parse(manifest_json).dump();
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw TaskFailure("cannot open " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Replace-atomic: write next to the target, then rename over it.
void write_file_atomic(const fs::path& p, const std::string& content) {
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw TaskFailure("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, p);
}

TannerGraph resolve_code(const std::string& spec) {
    if (spec == "tanner155") return construct_tanner_155();
    if (spec.rfind("margulis:", 0) == 0) return construct_margulis(std::stoi(spec.substr(9)));
    if (spec.rfind("alist:", 0) == 0) return parse_alist(read_file(spec.substr(6)));
    throw InvalidManifest("unknown code spec: " + spec);
}

std::string code_label(const std::string& spec) {
    if (spec.rfind("alist:", 0) == 0) return fs::path(spec.substr(6)).stem().string();
    return spec;
}

double num(const json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}
long inum(const json& j, const char* key, long fallback) {
    return j.contains(key) ? j.at(key).get<long>() : fallback;
}

SearchConfig search_config_from(const json& m) {
    SearchConfig cfg;
    const std::string mode = m.value("mode", std::string("soft"));
    if (mode == "soft")
        cfg.mode = SearchMode::Soft;
    else if (mode == "hard")
        cfg.mode = SearchMode::Hard;
    else
        throw InvalidManifest("unknown search mode: " + mode);
    cfg.n_iterations = static_cast<int>(inum(m, "iters", cfg.n_iterations));
    cfg.restarts = static_cast<int>(inum(m, "restarts", cfg.restarts));
    cfg.max_evals = static_cast<int>(inum(m, "max_evals", cfg.max_evals));
    cfg.simplex_scale = num(m, "simplex_scale", cfg.simplex_scale);
    cfg.anneal_factor = num(m, "anneal_factor", cfg.anneal_factor);
    cfg.rng_seed = m.value("seed", 0ULL);
    if (m.contains("mask")) cfg.mask = m.at("mask").get<std::vector<int>>();
    if (m.contains("seed_point")) cfg.seed_point = m.at("seed_point").get<std::vector<double>>();
    return cfg;
}

json record_json(const InstantonRecord& rec, const std::string& hash) {
    json j = json::parse(rec.to_json());
    j["manifest_hash"] = hash;
    return j;
}

struct CtResult {
    bool found = false;
    int root = -1;
    double ct_l_sq = 0.0;
    long long sum = 0, sum_sq = 0;
    bool match = false;
    std::string note;
};

// Like ct_verify, but keeps the best-matching coefficient vector so the
// report can show the integer sums.
CtResult ct_report(const TannerGraph& g, const InstantonRecord& rec, int depth) {
    CtResult out;
    std::vector<double> probe(rec.x.size());
    for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] = 1.0 - (1.0 + 1e-4) * (1.0 - rec.x[i]);
    DecoderConfig dcfg;
    dcfg.n_iterations = rec.n_iterations;
    const auto outcome = decode(g, probe, dcfg);
    const auto& roots = outcome.erroneous_bits.empty() ? rec.erroneous_bits : outcome.erroneous_bits;
    if (roots.empty()) {
        out.note = "no erroneous bit to root the tree at";
        return out;
    }
    double best_gap = std::numeric_limits<double>::infinity();
    for (int root : roots) {
        try {
            const auto coeffs = extract_coefficients(build_tree(g, root, rec.n_iterations, depth), probe);
            const double l = ct_length_sq(coeffs);
            const double gap = std::fabs(l - rec.l_sq);
            if (gap < best_gap) {
                best_gap = gap;
                out.found = true;
                out.root = root;
                out.ct_l_sq = l;
                out.sum = coeffs.sum();
                out.sum_sq = coeffs.sum_sq();
            }
        } catch (const DegenerateTie& e) {
            if (out.note.empty()) out.note = e.what();
        }
    }
    if (out.found) out.match = best_gap <= 1e-3 * std::max(1.0, rec.l_sq);
    return out;
}

// --- task implementations ---------------------------------------------

std::string task_code_info(const json& m, const fs::path& out_dir, const std::string& hash) {
    const TannerGraph g = resolve_code(m.at("code").get<std::string>());
    const int rank = gf2_rank(g);
    json j;
    j["manifest_hash"] = hash;
    j["n_bits"] = g.n_bits();
    j["n_checks"] = g.n_checks();
    j["n_edges"] = g.n_edges();
    j["k"] = g.n_bits() - rank;
    j["gf2_rank"] = rank;
    int dv_min = g.n_checks() + 1, dv_max = 0, dc_min = g.n_bits() + 1, dc_max = 0;
    for (int i = 0; i < g.n_bits(); ++i) {
        dv_min = std::min(dv_min, g.bit_degree(i));
        dv_max = std::max(dv_max, g.bit_degree(i));
    }
    for (int c = 0; c < g.n_checks(); ++c) {
        dc_min = std::min(dc_min, g.check_degree(c));
        dc_max = std::max(dc_max, g.check_degree(c));
    }
    j["bit_degree"] = dv_min == dv_max ? json(dv_min) : json{{"min", dv_min}, {"max", dv_max}};
    j["check_degree"] = dc_min == dc_max ? json(dc_min) : json{{"min", dc_min}, {"max", dc_max}};
    write_file_atomic(out_dir / "code_info.json", j.dump(2) + "\n");

    std::ostringstream s;
    s << "n=" << g.n_bits() << " m=" << g.n_checks() << " k=" << (g.n_bits() - rank);
    if (dv_min == dv_max && dc_min == dc_max)
        s << " regular(" << dv_min << "," << dc_min << ")";
    return s.str();
}

std::string task_decode(const json& m, const fs::path& out_dir, const std::string& hash) {
    const TannerGraph g = resolve_code(m.at("code").get<std::string>());
    DecoderConfig dcfg;
    dcfg.n_iterations = static_cast<int>(inum(m, "iters", 4));

    std::vector<double> x;
    if (m.contains("x")) {
        x = m.at("x").get<std::vector<double>>();
    } else {
        const auto snr = SnrPoint::from_db(m.at("snr_db").get<double>());
        Rng rng(mix_seed(m.value("seed", 0ULL), static_cast<std::uint64_t>(inum(m, "frame", 0))));
        x = sample_output(g.n_bits(), snr, rng);
    }
    const auto out = decode(g, x, dcfg);

    json j;
    j["manifest_hash"] = hash;
    j["iters"] = dcfg.n_iterations;
    j["x"] = x;
    j["l_sq"] = instanton_length_sq(x);
    j["failed"] = out.failed;
    j["erroneous_bits"] = out.erroneous_bits;
    j["syndrome_ok"] = out.syndrome_ok;
    write_file_atomic(out_dir / "decode.json", j.dump(2) + "\n");

    std::ostringstream s;
    s << (out.failed ? "FAIL" : "OK") << " erroneous=" << out.erroneous_bits.size()
      << " l_sq=" << instanton_length_sq(x);
    return s.str();
}

std::string task_mc_sweep(const json& m, const fs::path& out_dir, const std::string& hash) {
    const std::string code = m.at("code").get<std::string>();
    const TannerGraph g = resolve_code(code);
    const std::string label = code_label(code);

    MCConfig cfg;
    for (double db : m.at("snr_db").get<std::vector<double>>())
        cfg.snr_points.push_back(SnrPoint::from_db(db));
    if (m.contains("iters")) cfg.iteration_counts = m.at("iters").get<std::vector<int>>();
    cfg.max_frames = inum(m, "max_frames", cfg.max_frames);
    cfg.target_errors = static_cast<int>(inum(m, "target_errors", cfg.target_errors));
    cfg.master_seed = m.value("seed", 0ULL);
    cfg.workers = static_cast<int>(inum(m, "workers", 1));
    cfg.force = m.value("force", false);
    if (m.contains("best_known_l_sq")) cfg.best_known_l_sq = m.at("best_known_l_sq").get<double>();

    // Checkpoint-resume: cells already present in fer.csv are not re-run.
    // Counter-based cell seeds make the resumed file identical to a clean run.
    const fs::path csv_path = out_dir / "fer.csv";
    std::vector<std::string> done_rows;
    std::set<std::string> done_keys;
    if (fs::exists(csv_path)) {
        std::istringstream in(read_file(csv_path));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("code,", 0) == 0) continue;
            // columns: code,snr_db,s2,iters,...
            std::istringstream row(line);
            std::string tok, db_tok, s2_tok, it_tok;
            std::getline(row, tok, ',');
            std::getline(row, db_tok, ',');
            std::getline(row, s2_tok, ',');
            std::getline(row, it_tok, ',');
            done_rows.push_back(line);
            done_keys.insert(db_tok + '|' + it_tok);
        }
    }
    auto key_of_pt = [&](const SnrPoint& snr, int n_it) {
        std::ostringstream k;
        k.precision(12);
        k << snr.snr_db;
        return k.str() + '|' + std::to_string(n_it);
    };

    std::vector<std::string> rows = done_rows;
    auto flush = [&] {
        std::ostringstream os;
        os << "# manifest_hash=" << hash << '\n' << FERPoint::csv_header() << '\n';
        for (const auto& r : rows) os << r << '\n';
        write_file_atomic(csv_path, os.str());
    };

    long fresh = 0;
    sweep(g, cfg,
          [&](const SnrPoint& snr, int n_it) { return done_keys.count(key_of_pt(snr, n_it)) > 0; },
          [&](const FERPoint& pt) {
              if (pt.skipped) return;
              rows.push_back(pt.csv_row(label));
              ++fresh;
              flush();
          });
    flush();

    std::ostringstream s;
    s << "fer.csv: " << rows.size() << " cells (" << fresh << " new, " << done_rows.size()
      << " resumed)";
    return s.str();
}

std::string task_instanton(const json& m, const fs::path& out_dir, const std::string& hash,
                           bool biased) {
    const TannerGraph g = resolve_code(m.at("code").get<std::string>());
    SearchConfig cfg = search_config_from(m);
    if (m.contains("codeword_support")) {
        // start phase 2 from the mid-point between two codewords
        cfg.seed_point = codeword_seed(g, m.at("codeword_support").get<std::vector<int>>());
        if (!cfg.mask) cfg.mask = m.at("codeword_support").get<std::vector<int>>();
    }
    InstantonRecord rec = biased ? biased_search(g, cfg) : search(g, cfg);
    if (m.value("ct_verify", false) && rec.n_iterations <= static_cast<int>(inum(m, "depth_cap", 6)))
        ct_verify(g, rec, static_cast<int>(inum(m, "depth_cap", 6)));
    write_file_atomic(out_dir / "instanton.json", record_json(rec, hash).dump(2) + "\n");

    std::ostringstream s;
    s.precision(10);
    s << "l_sq=" << rec.l_sq << (rec.on_surface ? " on-surface" : " off-surface");
    if (rec.ct_l_sq) s << " ct_l_sq=" << *rec.ct_l_sq << (rec.ct_verified ? " verified" : " MISMATCH");
    return s.str();
}

std::string task_spectrum(const json& m, const fs::path& out_dir, const std::string& hash) {
    const TannerGraph g = resolve_code(m.at("code").get<std::string>());
    const SearchConfig cfg = search_config_from(m);
    const int n_attempts = static_cast<int>(inum(m, "attempts", 100));
    const int workers = static_cast<int>(inum(m, "workers", 1));

    // Checkpoint-resume: records already in spectrum.jsonl keep their lines;
    // only missing attempt ids are searched (per-attempt counter seeds make
    // the merged file identical to an uninterrupted run).
    const fs::path jsonl = out_dir / "spectrum.jsonl";
    std::map<std::uint64_t, InstantonRecord> have;
    if (fs::exists(jsonl)) {
        std::istringstream in(read_file(jsonl));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            InstantonRecord r = InstantonRecord::from_json(line);
            have.emplace(r.attempt_id, std::move(r));
        }
    }
    std::vector<int> missing;
    for (int a = 0; a < n_attempts; ++a)
        if (!have.count(static_cast<std::uint64_t>(a))) missing.push_back(a);

    std::mutex mtx;
    std::atomic<std::size_t> next{0};
    std::atomic<int> failed{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= missing.size()) return;
            const int attempt = missing[idx];
            SearchConfig acfg = cfg;
            acfg.rng_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(attempt));
            try {
                InstantonRecord rec = search(g, acfg);
                rec.attempt_id = static_cast<std::uint64_t>(attempt);
                std::lock_guard lock(mtx);
                have.emplace(rec.attempt_id, std::move(rec));
            } catch (const NoFailureFound&) {
                failed.fetch_add(1);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    Spectrum spec;
    spec.n_attempts = n_attempts;
    spec.n_failed_attempts = failed.load();
    spec.bin_width = num(m, "bin_width", spec.bin_width);
    std::ostringstream lines;
    for (auto& [id, rec] : have) {
        spec.records.push_back(rec);
        lines << rec.to_json() << '\n';
    }
    write_file_atomic(jsonl, lines.str());
    write_file_atomic(out_dir / "l2_hist.txt",
                      "# manifest_hash=" + hash + "\n" + spec.histogram_text());

    json summary;
    summary["manifest_hash"] = hash;
    summary["attempts"] = n_attempts;
    summary["records"] = spec.records.size();
    summary["no_failure_attempts"] = spec.n_failed_attempts;
    if (auto mn = spec.min_l_sq()) summary["min_l_sq"] = *mn;
    write_file_atomic(out_dir / "spectrum_summary.json", summary.dump(2) + "\n");

    std::ostringstream s;
    s.precision(10);
    s << spec.records.size() << "/" << n_attempts << " records";
    if (auto mn = spec.min_l_sq()) s << " min_l_sq=" << *mn;
    return s.str();
}

std::string task_ct_verify(const json& m, const fs::path& out_dir, const std::string& hash) {
    const TannerGraph g = resolve_code(m.at("code").get<std::string>());
    const fs::path rec_path = m.at("record").get<std::string>();
    InstantonRecord rec = InstantonRecord::from_json(read_file(rec_path));
    const int depth = static_cast<int>(inum(m, "depth", rec.n_iterations));
    if (rec.n_iterations > depth)
        throw DepthCapExceeded(
            "record was produced at " + std::to_string(rec.n_iterations) +
            " iterations, above the requested tree depth; re-run with depth >= that "
            "(trees beyond depth 6 are impractically large)");

    const CtResult r = ct_report(g, rec, std::max(depth, 6));
    json j;
    j["manifest_hash"] = hash;
    j["record"] = rec_path.string();
    j["record_l_sq"] = rec.l_sq;
    if (r.found) {
        j["root"] = r.root;
        j["ct_l_sq"] = r.ct_l_sq;
        j["coeff_sum"] = r.sum;
        j["coeff_sum_sq"] = r.sum_sq;
        j["match"] = r.match;
    } else {
        j["match"] = false;
        j["degenerate_tie"] = true;
    }
    if (!r.note.empty()) j["note"] = r.note;
    write_file_atomic(out_dir / "ct_report.json", j.dump(2) + "\n");

    std::ostringstream s;
    s.precision(10);
    if (r.found)
        s << "ct_l_sq=" << r.ct_l_sq << " sum=" << r.sum << " sum_sq=" << r.sum_sq
          << (r.match ? " match" : " MISMATCH");
    else
        s << "extraction failed: " << r.note;
    return s.str();
}

std::string task_report(const json& m, const fs::path& out_dir, const std::string& hash) {
    const fs::path store = m.contains("store") ? fs::path(m.at("store").get<std::string>())
                                               : out_dir;
    const fs::path csv_path = store / "fer.csv";
    const fs::path jsonl = store / "spectrum.jsonl";
    const bool have_fer = fs::exists(csv_path);
    const bool have_spec = fs::exists(jsonl);
    if (!have_fer && !have_spec)
        throw EmptyStore("store holds neither fer.csv nor spectrum.jsonl: " + store.string());

    int files = 0;
    if (have_fer) {
        struct Row {
            std::string code;
            double snr_db, s2;
            int iters;
            double fer, lo, hi;
        };
        std::vector<Row> rows;
        std::istringstream in(read_file(csv_path));
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#' || line.rfind("code,", 0) == 0) continue;
            std::istringstream rs(line);
            Row r;
            std::string tok;
            std::getline(rs, r.code, ',');
            std::getline(rs, tok, ',');
            r.snr_db = std::stod(tok);
            std::getline(rs, tok, ',');
            r.s2 = std::stod(tok);
            std::getline(rs, tok, ',');
            r.iters = std::stoi(tok);
            std::getline(rs, tok, ',');  // frames
            std::getline(rs, tok, ',');  // errors
            std::getline(rs, tok, ',');
            r.fer = std::stod(tok);
            std::getline(rs, tok, ',');
            r.lo = std::stod(tok);
            std::getline(rs, tok, ',');
            r.hi = std::stod(tok);
            rows.push_back(r);
        }
        std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
            if (a.iters != b.iters) return a.iters < b.iters;
            return a.s2 < b.s2;
        });

        std::ostringstream db_out, s2_out;
        db_out.precision(12);
        s2_out.precision(12);
        db_out << "# manifest_hash=" << hash << "\n# columns: snr_db fer ci_low ci_high\n";
        s2_out << "# manifest_hash=" << hash << "\n# columns: s_squared fer ci_low ci_high\n";
        int cur = std::numeric_limits<int>::min();
        for (const Row& r : rows) {
            if (r.iters != cur) {
                cur = r.iters;
                db_out << "\n# n_iterations=" << cur << '\n';
                s2_out << "\n# n_iterations=" << cur << '\n';
            }
            db_out << r.snr_db << ' ' << r.fer << ' ' << r.lo << ' ' << r.hi << '\n';
            s2_out << r.s2 << ' ' << r.fer << ' ' << r.lo << ' ' << r.hi << '\n';
        }
        if (m.contains("asymptotes")) {
            std::vector<std::pair<double, std::string>> asy;
            for (const auto& a : m.at("asymptotes"))
                asy.emplace_back(a.at("l_sq").get<double>(), a.value("label", std::string("asymptote")));
            std::vector<FERPoint> pts;
            for (const Row& r : rows) {
                FERPoint p;
                p.snr = SnrPoint::from_s_squared(r.s2);
                pts.push_back(p);
            }
            for (const auto& curve : overlay_asymptotes(pts, asy)) {
                s2_out << "\n# asymptote " << curve.label << " l_sq=" << curve.l_sq
                       << " (fer = exp(-l_sq*s^2/2))\n";
                for (const auto& [s2, fer] : curve.points) s2_out << s2 << ' ' << fer << '\n';
            }
        }
        write_file_atomic(out_dir / "fer_vs_db.txt", db_out.str());
        write_file_atomic(out_dir / "fer_vs_s2.txt", s2_out.str());
        files += 2;
    }
    if (have_spec) {
        Spectrum spec;
        spec.bin_width = num(m, "bin_width", spec.bin_width);
        std::istringstream in(read_file(jsonl));
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) spec.records.push_back(InstantonRecord::from_json(line));
        write_file_atomic(out_dir / "l2_hist.txt",
                          "# manifest_hash=" + hash + "\n" + spec.histogram_text());
        files += 1;
    }
    return "report: " + std::to_string(files) + " file(s) written";
}

}  // namespace

std::string run_manifest(const std::string& manifest_json) {
    json m;
    try {
        m = json::parse(manifest_json);
    } catch (const json::exception& e) {
        throw InvalidManifest(std::string("manifest is not valid JSON: ") + e.what());
    }
    if (!m.is_object() || !m.contains("task")) throw InvalidManifest("manifest lacks a task field");
    const std::string task = m.at("task").get<std::string>();
    const fs::path out_dir = m.value("out", std::string("."));
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    const std::string hash = hash_hex(manifest_hash(manifest_json));

    // Provenance: the manifest copy plus its hash live next to the results.
    write_file_atomic(out_dir / "manifest.json", m.dump(2) + "\n");
    {
        json prov;
        prov["manifest_hash"] = hash;
        prov["task"] = task;
        if (m.contains("code")) prov["code"] = m.at("code");
        prov["seed"] = m.value("seed", 0ULL);
        write_file_atomic(out_dir / "provenance.json", prov.dump(2) + "\n");
    }

    std::string summary;
    try {
        if (task == "code-info")
            summary = task_code_info(m, out_dir, hash);
        else if (task == "decode")
            summary = task_decode(m, out_dir, hash);
        else if (task == "mc-sweep")
            summary = task_mc_sweep(m, out_dir, hash);
        else if (task == "instanton-search")
            summary = task_instanton(m, out_dir, hash, false);
        else if (task == "biased-search")
            summary = task_instanton(m, out_dir, hash, true);
        else if (task == "spectrum")
            summary = task_spectrum(m, out_dir, hash);
        else if (task == "ct-verify")
            summary = task_ct_verify(m, out_dir, hash);
        else if (task == "report")
            summary = task_report(m, out_dir, hash);
        else
            throw InvalidManifest("unknown task: " + task);
    } catch (const InvalidManifest&) {
        throw;
    } catch (const EmptyStore&) {
        throw;
    } catch (const json::exception& e) {
        throw InvalidManifest(std::string("manifest field error: ") + e.what());
    } catch (const std::exception& e) {
        throw TaskFailure(task + ": " + e.what());
    }
    return "[" + task + "] " + summary;
}

}  // namespace efloor
