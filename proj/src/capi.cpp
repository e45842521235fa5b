#include "errorfloor.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "errorfloor/channel.hpp"
#include "errorfloor/comptree.hpp"
#include "errorfloor/decoder.hpp"
#include "errorfloor/experiment.hpp"
#include "errorfloor/graph.hpp"
#include "errorfloor/search.hpp"

using namespace efloor;

struct ef_graph {
    TannerGraph g;
};

namespace {

thread_local std::string t_last_error;

const char* store_error(const std::string& msg) {
    t_last_error = msg;
    return t_last_error.c_str();
}

// Map C++ exceptions onto the status enum; everything funnels through here.
template <typename Fn>
ef_status guarded(Fn&& fn) {
    try {
        fn();
        return EF_OK;
    } catch (const MalformedHeader& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const DegreeMismatch& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const IndexOutOfRange& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const InconsistentAdjacency& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const NonPrimeParameter& e) {
        store_error(e.what());
        return EF_ERR_INVALID_ARGUMENT;
    } catch (const ShapeMismatch& e) {
        store_error(e.what());
        return EF_ERR_SHAPE_MISMATCH;
    } catch (const NoFailureFound& e) {
        store_error(e.what());
        return EF_ERR_NO_FAILURE;
    } catch (const DegenerateTie& e) {
        store_error(e.what());
        return EF_ERR_DEGENERATE_TIE;
    } catch (const DepthCapExceeded& e) {
        store_error(e.what());
        return EF_ERR_DEPTH_CAP;
    } catch (const NotACodeword& e) {
        store_error(e.what());
        return EF_ERR_NOT_A_CODEWORD;
    } catch (const InvalidManifest& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const nlohmann::json::exception& e) {
        store_error(e.what());
        return EF_ERR_PARSE;
    } catch (const NonPositiveSNR& e) {
        store_error(e.what());
        return EF_ERR_INVALID_ARGUMENT;
    } catch (const std::invalid_argument& e) {
        store_error(e.what());
        return EF_ERR_INVALID_ARGUMENT;
    } catch (const std::ios_base::failure& e) {
        store_error(e.what());
        return EF_ERR_IO;
    } catch (const std::exception& e) {
        store_error(e.what());
        return EF_ERR_RUNTIME;
    } catch (...) {
        store_error("unknown error");
        return EF_ERR_RUNTIME;
    }
}

char* dup_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ef_status require(bool cond, const char* msg) {
    if (cond) return EF_OK;
    store_error(msg);
    return EF_ERR_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* ef_last_error(void) { return t_last_error.c_str(); }

ef_status ef_graph_tanner155(ef_graph** out) {
    if (ef_status s = require(out != nullptr, "out is NULL")) return s;
    return guarded([&] { *out = new ef_graph{construct_tanner_155()}; });
}

ef_status ef_graph_margulis(int p, ef_graph** out) {
    if (ef_status s = require(out != nullptr, "out is NULL")) return s;
    return guarded([&] { *out = new ef_graph{construct_margulis(p)}; });
}

ef_status ef_graph_parse_alist(const char* text, ef_graph** out) {
    if (ef_status s = require(text && out, "text or out is NULL")) return s;
    return guarded([&] { *out = new ef_graph{parse_alist(std::string(text))}; });
}

ef_status ef_graph_load_alist(const char* path, ef_graph** out) {
    if (ef_status s = require(path && out, "path or out is NULL")) return s;
    return guarded([&] {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::ios_base::failure(std::string("cannot open ") + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        *out = new ef_graph{parse_alist(ss.str())};
    });
}

void ef_graph_free(ef_graph* g) { delete g; }

int ef_graph_n_bits(const ef_graph* g) { return g ? g->g.n_bits() : 0; }
int ef_graph_n_checks(const ef_graph* g) { return g ? g->g.n_checks() : 0; }

ef_status ef_graph_rank(const ef_graph* g, int* rank_out) {
    if (ef_status s = require(g && rank_out, "graph or rank_out is NULL")) return s;
    return guarded([&] { *rank_out = gf2_rank(g->g); });
}

ef_status ef_graph_write_alist(const ef_graph* g, char** text_out) {
    if (ef_status s = require(g && text_out, "graph or text_out is NULL")) return s;
    return guarded([&] { *text_out = dup_string(write_alist(g->g)); });
}

void ef_string_free(char* s) { delete[] s; }

ef_status ef_decode(const ef_graph* g, const double* llr, int n, int n_iterations,
                    int tie_is_error, int8_t* hard_out, int* failed_out) {
    if (ef_status s = require(g && llr, "graph or llr is NULL")) return s;
    return guarded([&] {
        if (n != g->g.n_bits()) throw ShapeMismatch("llr length does not match n_bits");
        DecoderConfig cfg;
        cfg.n_iterations = n_iterations;
        cfg.tie_is_error = tie_is_error != 0;
        const auto out = decode(g->g, std::span<const double>(llr, static_cast<std::size_t>(n)), cfg);
        if (hard_out)
            std::memcpy(hard_out, out.hard.data(), out.hard.size() * sizeof(int8_t));
        if (failed_out) *failed_out = out.failed ? 1 : 0;
    });
}

ef_status ef_instanton_length_sq(const double* x, int n, double* out) {
    if (ef_status s = require(x && out && n >= 1, "bad arguments")) return s;
    return guarded([&] {
        *out = instanton_length_sq(std::span<const double>(x, static_cast<std::size_t>(n)));
    });
}

ef_status ef_fer_asymptote(double l_sq, double s, double* out) {
    if (ef_status st = require(out != nullptr, "out is NULL")) return st;
    return guarded([&] { *out = fer_asymptote(l_sq, SnrPoint::from_s(s)); });
}

ef_status ef_run_manifest(const char* manifest_json, char** summary_out) {
    if (ef_status s = require(manifest_json != nullptr, "manifest_json is NULL")) return s;
    return guarded([&] {
        const std::string summary = run_manifest(manifest_json);
        if (summary_out) *summary_out = dup_string(summary);
    });
}

ef_status ef_run_manifest_file(const char* path, char** summary_out) {
    if (ef_status s = require(path != nullptr, "path is NULL")) return s;
    std::string text;
    {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            store_error(std::string("cannot open ") + path);
            return EF_ERR_IO;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    return ef_run_manifest(text.c_str(), summary_out);
}

}  // extern "C"
