// efloor: command-line front end over the errorfloor C API. Each subcommand
// assembles an experiment manifest (JSON) and hands it to ef_run_manifest;
// flags override manifest fields, manifest fields override defaults.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "errorfloor.h"

using nlohmann::json;

namespace {

std::vector<double> parse_snr_list(const std::string& spec) {
    // "2.0,2.5,3.0" or "2.0:4.0:0.5" (inclusive range)
    std::vector<double> out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi, step;
        char c1, c2;
        std::istringstream in(spec);
        if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' || step <= 0)
            throw CLI::ValidationError("--snr-db", "range must be lo:hi:step with step > 0");
        for (double v = lo; v <= hi + 1e-12; v += step) out.push_back(v);
        return out;
    }
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stod(tok));
    if (out.empty()) throw CLI::ValidationError("--snr-db", "empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    std::istringstream in(spec);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoi(tok));
    return out;
}

template <typename T>
std::vector<T> read_numbers(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError(what, "cannot open " + path);
    std::vector<T> out;
    T v;
    while (in >> v) out.push_back(v);
    if (out.empty()) throw CLI::ValidationError(what, path + " holds no numbers");
    return out;
}

int default_workers() {
    if (const char* env = std::getenv("ERRORFLOOR_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

int run(const json& manifest) {
    char* summary = nullptr;
    const ef_status st = ef_run_manifest(manifest.dump().c_str(), &summary);
    if (st != EF_OK) {
        std::cerr << "error (" << st << "): " << ef_last_error() << "\n";
        return 1;
    }
    if (summary) {
        std::cout << summary << "\n";
        ef_string_free(summary);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LDPC error-floor analysis: min-sum decoding, instanton search, "
                 "computational-tree verification, Monte-Carlo FER"};
    app.require_subcommand(1);

    std::string code = "tanner155";
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    int workers = default_workers();
    int iters = 4;

    auto add_common = [&](CLI::App* sub, bool needs_code = true) {
        if (needs_code)
            sub->add_option("--code", code, "tanner155 | margulis:P | alist:PATH")
                ->capture_default_str();
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--seed", seed, "master RNG seed")->capture_default_str();
        sub->add_option("--workers", workers, "worker threads (env ERRORFLOOR_WORKERS)")
            ->capture_default_str();
    };

    // code-info
    auto* sc_info = app.add_subcommand("code-info", "print code parameters (n, m, k, degrees)");
    add_common(sc_info);

    // decode
    auto* sc_dec = app.add_subcommand("decode", "decode one sampled or supplied channel output");
    add_common(sc_dec);
    double dec_snr_db = 6.0;
    long dec_frame = 0;
    std::string x_file;
    sc_dec->add_option("--iters", iters, "decoding iterations")->capture_default_str();
    sc_dec->add_option("--snr-db", dec_snr_db, "SNR in dB (20 log10 s)")->capture_default_str();
    sc_dec->add_option("--frame", dec_frame, "frame index for the sampled noise");
    sc_dec->add_option("--x-file", x_file, "file of channel-output values (overrides sampling)");

    // mc-sweep
    auto* sc_mc = app.add_subcommand("mc-sweep", "Monte-Carlo FER over an SNR/iteration grid");
    add_common(sc_mc);
    std::string snr_spec = "4.0,5.0,6.0";
    std::string iters_spec;
    long max_frames = 1'000'000;
    int target_errors = 100;
    double best_l_sq = -1.0;
    bool force = false;
    sc_mc->add_option("--snr-db", snr_spec, "dB list a,b,c or range lo:hi:step")
        ->capture_default_str();
    sc_mc->add_option("--iters", iters_spec, "iteration counts, comma list (default ladder)");
    sc_mc->add_option("--max-frames", max_frames)->capture_default_str();
    sc_mc->add_option("--target-errors", target_errors)->capture_default_str();
    sc_mc->add_option("--best-known-l-sq", best_l_sq,
                      "skip cells whose instanton asymptote predicts FER below 1e-7");
    sc_mc->add_flag("--force", force, "run even the skip-guarded cells");

    // instanton-search / biased-search / spectrum
    std::string mode = "soft";
    int restarts = 8, max_evals = 20000, attempts = 100;
    std::string mask_file, seed_point_file, codeword_file;
    bool do_ct = false;
    auto add_search_opts = [&](CLI::App* sub) {
        add_common(sub);
        sub->add_option("--iters", iters, "decoding iterations")->capture_default_str();
        sub->add_option("--mode", mode, "soft | hard")->capture_default_str();
        sub->add_option("--restarts", restarts, "annealed Nelder-Mead restarts")
            ->capture_default_str();
        sub->add_option("--max-evals", max_evals, "objective evaluations per restart")
            ->capture_default_str();
        sub->add_option("--mask-file", mask_file, "file of bit indices allowed to carry noise");
        sub->add_option("--seed-point-file", seed_point_file,
                        "file of channel-output values to start from");
        sub->add_option("--codeword-file", codeword_file,
                        "file of flip-support bit indices; seeds at the codeword mid-point");
        sub->add_flag("--ct-verify", do_ct, "verify the record against the computational tree");
    };
    auto* sc_inst = app.add_subcommand("instanton-search", "one annealed instanton search");
    add_search_opts(sc_inst);
    auto* sc_bias = app.add_subcommand("biased-search",
                                       "two-phase search: masked, then full-space from the masked optimum");
    add_search_opts(sc_bias);
    auto* sc_spec = app.add_subcommand("spectrum", "many independent searches, l^2 histogram");
    add_search_opts(sc_spec);
    sc_spec->add_option("--attempts", attempts, "independent search attempts")
        ->capture_default_str();

    // ct-verify
    auto* sc_ct = app.add_subcommand("ct-verify", "check a stored record against the tree");
    add_common(sc_ct);
    std::string record_path;
    int depth = -1;
    sc_ct->add_option("--record", record_path, "instanton JSON record")->required();
    sc_ct->add_option("--depth", depth, "tree depth (default: the record's iteration count)");

    // report
    auto* sc_rep = app.add_subcommand("report", "plot-ready text bundles from stored results");
    add_common(sc_rep, false);
    std::string store;
    std::string asymptotes_spec;
    sc_rep->add_option("--store", store, "result directory to read (default: --out)");
    sc_rep->add_option("--asymptotes", asymptotes_spec,
                       "comma list of l^2 values to overlay, e.g. 10.076,13.06");

    CLI11_PARSE(app, argc, argv);

    json m;
    m["code"] = code;
    m["out"] = out_dir;
    m["seed"] = seed;
    m["workers"] = workers;

    if (app.got_subcommand(sc_info)) {
        m["task"] = "code-info";
    } else if (app.got_subcommand(sc_dec)) {
        m["task"] = "decode";
        m["iters"] = iters;
        if (!x_file.empty())
            m["x"] = read_numbers<double>(x_file, "--x-file");
        else {
            m["snr_db"] = dec_snr_db;
            m["frame"] = dec_frame;
        }
    } else if (app.got_subcommand(sc_mc)) {
        m["task"] = "mc-sweep";
        m["snr_db"] = parse_snr_list(snr_spec);
        if (!iters_spec.empty()) m["iters"] = parse_int_list(iters_spec);
        m["max_frames"] = max_frames;
        m["target_errors"] = target_errors;
        if (best_l_sq > 0.0) m["best_known_l_sq"] = best_l_sq;
        if (force) m["force"] = true;
    } else if (app.got_subcommand(sc_inst) || app.got_subcommand(sc_bias) ||
               app.got_subcommand(sc_spec)) {
        m["task"] = app.got_subcommand(sc_inst)   ? "instanton-search"
                    : app.got_subcommand(sc_bias) ? "biased-search"
                                                  : "spectrum";
        m["iters"] = iters;
        m["mode"] = mode;
        m["restarts"] = restarts;
        m["max_evals"] = max_evals;
        if (!mask_file.empty()) m["mask"] = read_numbers<int>(mask_file, "--mask-file");
        if (!seed_point_file.empty())
            m["seed_point"] = read_numbers<double>(seed_point_file, "--seed-point-file");
        if (!codeword_file.empty())
            m["codeword_support"] = read_numbers<int>(codeword_file, "--codeword-file");
        if (do_ct) m["ct_verify"] = true;
        if (app.got_subcommand(sc_spec)) m["attempts"] = attempts;
    } else if (app.got_subcommand(sc_ct)) {
        m["task"] = "ct-verify";
        m["record"] = record_path;
        if (depth >= 0) m["depth"] = depth;
    } else if (app.got_subcommand(sc_rep)) {
        m["task"] = "report";
        m.erase("code");
        if (!store.empty()) m["store"] = store;
        if (!asymptotes_spec.empty()) {
            auto& arr = m["asymptotes"] = json::array();
            std::istringstream in(asymptotes_spec);
            std::string tok;
            while (std::getline(in, tok, ',')) {
                json a;
                a["l_sq"] = std::stod(tok);
                a["label"] = "l_sq=" + tok;
                arr.push_back(a);
            }
        }
    }

    return run(m);
}
