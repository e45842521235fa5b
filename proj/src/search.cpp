#include "errorfloor/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "errorfloor/channel.hpp"
#include "errorfloor/comptree.hpp"
#include "errorfloor/rng.hpp"

namespace efloor {

double soft_objective(MinSumDecoder& dec, std::span<const double> x, int n_it, double penalty) {
    const double l_sq = instanton_length_sq(x);
    DecoderConfig cfg;
    cfg.n_iterations = n_it;
    return dec.decode_fails(x, cfg) ? l_sq : penalty + l_sq;
}

std::optional<HardPoint> hard_objective(MinSumDecoder& dec, std::span<const double> u, int n_it,
                                        double tol_bisect) {
    const int n = dec.graph().n_bits();
    if (static_cast<int>(u.size()) != n) throw ShapeMismatch("direction length does not match n_bits");

    std::vector<double> dir(u.begin(), u.end());
    double norm = std::sqrt(std::inner_product(dir.begin(), dir.end(), dir.begin(), 0.0));
    if (!(norm > 0.0)) return std::nullopt;
    for (double& v : dir) v /= norm;

    DecoderConfig cfg;
    cfg.n_iterations = n_it;
    std::vector<double> x(n);
    auto fails_at = [&](double r) {
        for (int i = 0; i < n; ++i) x[i] = 1.0 - r * dir[i];
        return dec.decode_fails(x, cfg);
    };

    // Geometric bracketing from r=0.5, then bisection. r=0 is the clean
    // channel and always succeeds.
    const double r_max = 2.0 * std::sqrt(static_cast<double>(n));
    double lo = 0.0, hi = -1.0;
    for (double r = 0.5; r <= r_max; r *= 1.5) {
        if (fails_at(r)) {
            hi = r;
            break;
        }
        lo = r;
    }
    if (hi < 0.0) return std::nullopt;

    while (hi - lo > tol_bisect * hi) {
        const double mid = 0.5 * (lo + hi);
        if (fails_at(mid))
            hi = mid;
        else
            lo = mid;
    }
    // Enforce the sandwich explicitly: the radius shrunk by (1 - 10*tol)
    // must decode successfully (failure is not radially monotone in
    // general, so this is checked, not assumed).
    for (int guard = 0; guard < 200; ++guard) {
        const double r_in = hi * (1.0 - 10.0 * tol_bisect);
        if (!fails_at(r_in)) break;
        hi = r_in;
    }

    HardPoint out;
    out.r = hi;
    fails_at(hi);  // leaves x at the surface point
    out.x = x;
    return out;
}

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, double delta, double tol,
                             long max_evals) {
    const std::size_t dim = start.size();
    std::vector<std::vector<double>> pts(dim + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t j = 0; j < dim; ++j) pts[j + 1][j] += delta;

    std::vector<double> val(dim + 1);
    long evals = 0;
    for (std::size_t k = 0; k <= dim; ++k) {
        val[k] = objective(pts[k]);
        ++evals;
    }
    std::vector<std::size_t> order(dim + 1);
    std::iota(order.begin(), order.end(), 0);
    auto sort_simplex = [&] {
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return val[a] < val[b]; });
    };
    sort_simplex();

    std::vector<double> centroid(dim), candidate(dim);
    while (evals < max_evals) {
        const std::size_t best = order[0], worst = order[dim];
        if (val[worst] - val[best] < tol) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t k = 0; k <= dim; ++k)
            if (order[k] != worst)
                for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[order[k]][j];
        for (double& v : centroid) v /= static_cast<double>(dim);

        auto blend = [&](double coef) {
            for (std::size_t j = 0; j < dim; ++j)
                candidate[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
        };

        blend(-1.0);  // reflection
        const double f_refl = objective(candidate);
        ++evals;
        if (f_refl < val[best]) {
            std::vector<double> reflected = candidate;
            blend(-2.0);  // expansion
            const double f_exp = objective(candidate);
            ++evals;
            if (f_exp < f_refl) {
                pts[worst] = candidate;
                val[worst] = f_exp;
            } else {
                pts[worst] = std::move(reflected);
                val[worst] = f_refl;
            }
        } else if (f_refl < val[order[dim - 1]]) {
            pts[worst] = candidate;
            val[worst] = f_refl;
        } else {
            const bool outside = f_refl < val[worst];
            blend(outside ? -0.5 : 0.5);  // contraction
            const double f_con = objective(candidate);
            ++evals;
            if (f_con < std::min(f_refl, val[worst])) {
                pts[worst] = candidate;
                val[worst] = f_con;
            } else {
                // shrink toward the best vertex
                for (std::size_t k = 0; k <= dim; ++k) {
                    if (order[k] == best) continue;
                    auto& p = pts[order[k]];
                    for (std::size_t j = 0; j < dim; ++j)
                        p[j] = pts[best][j] + 0.5 * (p[j] - pts[best][j]);
                    val[order[k]] = objective(p);
                    ++evals;
                }
            }
        }
        sort_simplex();
    }
    sort_simplex();
    return {pts[order[0]], val[order[0]], evals};
}

namespace {

std::vector<int> resolve_mask(const TannerGraph& g, const SearchConfig& cfg) {
    std::vector<int> mask;
    if (cfg.mask) {
        mask = *cfg.mask;
        std::sort(mask.begin(), mask.end());
        mask.erase(std::unique(mask.begin(), mask.end()), mask.end());
        if (mask.empty()) throw std::invalid_argument("search mask is empty");
        if (mask.front() < 0 || mask.back() >= g.n_bits())
            throw std::invalid_argument("search mask index out of range");
    } else {
        mask.resize(g.n_bits());
        std::iota(mask.begin(), mask.end(), 0);
    }
    return mask;
}

std::vector<double> expand_noise(const TannerGraph& g, const std::vector<int>& mask,
                                 std::span<const double> params) {
    std::vector<double> x(g.n_bits(), 1.0);
    for (std::size_t j = 0; j < mask.size(); ++j) x[mask[j]] = 1.0 - params[j];
    return x;
}

// Hyperplane refinement: read the computational-tree coefficients just
// inside the failure region and jump to the closest point of the error
// surface's local linearization. Accepted only when the projection still
// fails and strictly shortens the record. This is what makes converged
// searches land on exact rational lengths like 46^2/210.
void polish_with_tree(const TannerGraph& g, MinSumDecoder& dec, const DecoderConfig& dcfg,
                      InstantonRecord& rec) {
    if (rec.n_iterations > ComputationalTree::kDefaultDepthCap) return;
    for (int round = 0; round < 6; ++round) {
        std::vector<double> probe(rec.x.size());
        for (std::size_t i = 0; i < probe.size(); ++i)
            probe[i] = 1.0 - (1.0 + 1e-4) * (1.0 - rec.x[i]);
        const auto roots = dec.decode(probe, dcfg).erroneous_bits;
        bool improved = false;
        for (int root : roots) {
            try {
                const auto coeffs =
                    extract_coefficients(build_tree(g, root, rec.n_iterations), probe);
                if (coeffs.sum() <= 0) continue;
                const double l_p = ct_length_sq(coeffs);
                if (l_p >= rec.l_sq - 1e-12) continue;
                auto x_p = projected_instanton(coeffs, g.n_bits());
                // nudge just across the (closed) boundary so failure is robust
                for (auto& v : x_p) v = 1.0 - (1.0 + 1e-9) * (1.0 - v);
                if (!dec.decode_fails(x_p, dcfg)) continue;
                rec.x = std::move(x_p);
                rec.l_sq = instanton_length_sq(rec.x);
                rec.erroneous_bits = dec.decode(rec.x, dcfg).erroneous_bits;
                improved = true;
                break;
            } catch (const DegenerateTie&) {
            } catch (const DepthCapExceeded&) {
                return;
            }
        }
        if (!improved) return;
    }
}

}  // namespace

InstantonRecord search(const TannerGraph& g, const SearchConfig& cfg) {
    if (!(cfg.penalty > 4.0 * g.n_bits()))
        throw std::invalid_argument("soft penalty must exceed 4*n_bits");
    if (cfg.restarts < 1 || !(cfg.anneal_factor > 0.0 && cfg.anneal_factor < 1.0))
        throw std::invalid_argument("invalid annealing schedule");

    const std::vector<int> mask = resolve_mask(g, cfg);
    const std::size_t dim = mask.size();
    MinSumDecoder dec(g);
    Rng rng(cfg.rng_seed);

    DecoderConfig dcfg;
    dcfg.n_iterations = cfg.n_iterations;

    // Start: seeded noise, or channel noise sampled at start_snr until the
    // decoder actually fails (the optimization needs an erroneous pattern to
    // descend from; symmetric blanket noise gets corrected).
    std::vector<double> params(dim);
    if (cfg.seed_point) {
        if (static_cast<int>(cfg.seed_point->size()) != g.n_bits())
            throw ShapeMismatch("seed point length does not match n_bits");
        for (std::size_t j = 0; j < dim; ++j) params[j] = 1.0 - (*cfg.seed_point)[mask[j]];
    } else {
        const double sigma = 1.0 / cfg.start_snr;
        bool found = false;
        std::vector<double> x(g.n_bits(), 1.0);
        for (int t = 0; t < cfg.start_tries && !found; ++t) {
            for (std::size_t j = 0; j < dim; ++j) {
                params[j] = sigma * rng.next_gaussian();
                x[mask[j]] = 1.0 - params[j];
            }
            found = dec.decode_fails(x, dcfg);
        }
        if (!found)
            throw NoFailureFound("no failing start configuration sampled at the start SNR");
    }

    double best_fail_l_sq = std::numeric_limits<double>::infinity();
    std::vector<double> best_fail_noise;

    std::vector<double> xbuf(g.n_bits(), 1.0);  // reused across evaluations
    std::function<double(std::span<const double>)> objective;
    if (cfg.mode == SearchMode::Soft) {
        objective = [&](std::span<const double> p) {
            for (std::size_t j = 0; j < dim; ++j) xbuf[mask[j]] = 1.0 - p[j];
            const double f = soft_objective(dec, xbuf, cfg.n_iterations, cfg.penalty);
            if (f < cfg.penalty && f < best_fail_l_sq) {
                best_fail_l_sq = f;
                best_fail_noise.assign(p.begin(), p.end());
            }
            return f;
        };
    } else {
        objective = [&](std::span<const double> p) {
            std::vector<double> u(g.n_bits(), 0.0);
            for (std::size_t j = 0; j < dim; ++j) u[mask[j]] = p[j];
            const auto hp = hard_objective(dec, u, cfg.n_iterations, cfg.tol_bisect);
            if (!hp) return std::numeric_limits<double>::infinity();
            const double r_sq = hp->r * hp->r;
            if (r_sq < best_fail_l_sq) {
                best_fail_l_sq = r_sq;
                // store the *surface* noise so the landing step starts there
                best_fail_noise.resize(dim);
                for (std::size_t j = 0; j < dim; ++j) best_fail_noise[j] = 1.0 - hp->x[mask[j]];
            }
            return r_sq;
        };
    }

    double delta = cfg.simplex_scale;
    std::vector<double> center = params;
    for (int r = 0; r < cfg.restarts; ++r) {
        const auto res = nelder_mead(objective, center, delta, cfg.tol, cfg.max_evals);
        center = res.point;
        delta *= cfg.anneal_factor;
    }

    if (best_fail_noise.empty())
        throw NoFailureFound("no failing configuration encountered in the whole run");

    // Land exactly on the error surface along the best failing direction.
    std::vector<double> u(g.n_bits(), 0.0);
    for (std::size_t j = 0; j < dim; ++j) u[mask[j]] = best_fail_noise[j];
    const auto hp = hard_objective(dec, u, cfg.n_iterations, cfg.tol_bisect);

    InstantonRecord rec;
    rec.mode = cfg.mode;
    rec.n_iterations = cfg.n_iterations;
    rec.rng_seed = cfg.rng_seed;
    if (hp) {
        rec.x = hp->x;
        rec.on_surface = true;
    } else {
        rec.x = expand_noise(g, mask, best_fail_noise);
        rec.on_surface = false;
    }
    rec.l_sq = instanton_length_sq(rec.x);
    rec.erroneous_bits = dec.decode(rec.x, dcfg).erroneous_bits;
    // unmasked searches may jump onto the exact local hyperplane optimum
    if (dim == static_cast<std::size_t>(g.n_bits())) polish_with_tree(g, dec, dcfg, rec);
    return rec;
}

std::vector<double> codeword_seed(const TannerGraph& g, const std::vector<int>& flip_support,
                                  double eps) {
    std::vector<std::int8_t> hard(g.n_bits(), 1);
    for (int i : flip_support) {
        if (i < 0 || i >= g.n_bits()) throw NotACodeword("support index out of range");
        hard[i] = -1;
    }
    if (!syndrome_ok(g, hard))
        throw NotACodeword("flip support does not satisfy the parity checks");
    std::vector<double> x(g.n_bits(), 1.0);
    for (int i : flip_support) x[i] = -eps;
    return x;
}

InstantonRecord biased_search(const TannerGraph& g, const SearchConfig& cfg) {
    if (!cfg.mask || cfg.mask->empty())
        throw std::invalid_argument("biased_search requires a nonempty mask");
    const InstantonRecord masked = search(g, cfg);

    SearchConfig full = cfg;
    full.mask.reset();
    full.seed_point = masked.x;
    full.rng_seed = mix_seed(cfg.rng_seed, 1);
    InstantonRecord rec = search(g, full);
    rec.phase1_l_sq = masked.l_sq;
    if (masked.l_sq < rec.l_sq) {
        // full-space continuation drifted upward; keep the better phase
        const double phase1 = masked.l_sq;
        rec = masked;
        rec.phase1_l_sq = phase1;
    }
    return rec;
}

Spectrum collect_spectrum(const TannerGraph& g, const SearchConfig& cfg, int n_attempts,
                          int workers, const std::function<void(const InstantonRecord&)>& on_record) {
    if (n_attempts < 1) throw std::invalid_argument("n_attempts must be >= 1");
    workers = std::max(1, workers);

    Spectrum spec;
    spec.n_attempts = n_attempts;
    std::mutex mtx;
    std::atomic<int> next{0};
    std::atomic<int> failed{0};

    auto worker = [&] {
        for (;;) {
            const int attempt = next.fetch_add(1);
            if (attempt >= n_attempts) return;
            SearchConfig acfg = cfg;
            acfg.rng_seed = mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(attempt));
            try {
                InstantonRecord rec = search(g, acfg);
                rec.attempt_id = static_cast<std::uint64_t>(attempt);
                std::lock_guard lock(mtx);
                if (on_record) on_record(rec);
                spec.records.push_back(std::move(rec));
            } catch (const NoFailureFound&) {
                failed.fetch_add(1);
            }
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    spec.n_failed_attempts = failed.load();
    // merge order-independently: canonical order is by attempt id
    std::sort(spec.records.begin(), spec.records.end(),
              [](const InstantonRecord& a, const InstantonRecord& b) { return a.attempt_id < b.attempt_id; });
    return spec;
}

void ct_verify(const TannerGraph& g, InstantonRecord& rec, int depth_cap) {
    if (rec.n_iterations > depth_cap)
        throw DepthCapExceeded("record iteration count exceeds the computational-tree depth cap");

    // Probe just inside the failure region: noise scaled by (1 + 1e-4).
    std::vector<double> probe(rec.x.size());
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = 1.0 - (1.0 + 1e-4) * (1.0 - rec.x[i]);

    DecoderConfig dcfg;
    dcfg.n_iterations = rec.n_iterations;
    const auto outcome = decode(g, probe, dcfg);
    const auto& roots = outcome.erroneous_bits.empty() ? rec.erroneous_bits : outcome.erroneous_bits;
    if (roots.empty()) {
        rec.ct_verified = false;
        rec.ct_note = "no erroneous bit to root the tree at";
        return;
    }

    double best = std::numeric_limits<double>::quiet_NaN();
    std::string note;
    for (int root : roots) {
        try {
            const auto tree = build_tree(g, root, rec.n_iterations, depth_cap);
            const auto coeffs = extract_coefficients(tree, probe);
            const double l = ct_length_sq(coeffs);
            if (std::isnan(best) || std::fabs(l - rec.l_sq) < std::fabs(best - rec.l_sq)) best = l;
        } catch (const DegenerateTie& e) {
            note = e.what();
        }
    }
    if (std::isnan(best)) {
        rec.ct_verified = false;
        rec.ct_note = note.empty() ? "coefficient extraction failed at every root" : note;
        return;
    }
    rec.ct_l_sq = best;
    rec.ct_verified = std::fabs(best - rec.l_sq) <= 1e-3 * std::max(1.0, rec.l_sq);
    if (!rec.ct_verified && rec.ct_note.empty()) rec.ct_note = note.empty() ? "ct length mismatch" : note;
}

std::map<long, long> Spectrum::histogram() const {
    std::map<long, long> h;
    for (const auto& r : records) ++h[static_cast<long>(std::floor(r.l_sq / bin_width))];
    return h;
}

std::optional<double> Spectrum::min_l_sq() const {
    if (records.empty()) return std::nullopt;
    double m = records.front().l_sq;
    for (const auto& r : records) m = std::min(m, r.l_sq);
    return m;
}

std::string Spectrum::histogram_text() const {
    std::ostringstream out;
    out << "# l_sq_bin_center count\n";
    for (const auto& [idx, count] : histogram())
        out << (static_cast<double>(idx) + 0.5) * bin_width << ' ' << count << '\n';
    return out.str();
}

namespace {

const char* mode_name(SearchMode m) { return m == SearchMode::Soft ? "soft" : "hard"; }

SearchMode mode_from_name(const std::string& s) {
    if (s == "soft") return SearchMode::Soft;
    if (s == "hard") return SearchMode::Hard;
    throw std::invalid_argument("unknown search mode: " + s);
}

}  // namespace

std::string InstantonRecord::to_json() const {
    nlohmann::json j;
    j["x"] = x;
    j["l_sq"] = l_sq;
    j["mode"] = mode_name(mode);
    j["n_iterations"] = n_iterations;
    j["erroneous_bits"] = erroneous_bits;
    j["on_surface"] = on_surface;
    if (ct_l_sq) j["ct_l_sq"] = *ct_l_sq;
    j["ct_verified"] = ct_verified;
    if (!ct_note.empty()) j["ct_note"] = ct_note;
    if (phase1_l_sq) j["phase1_l_sq"] = *phase1_l_sq;
    j["attempt_id"] = attempt_id;
    j["rng_seed"] = rng_seed;
    return j.dump();
}

InstantonRecord InstantonRecord::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    InstantonRecord r;
    r.x = j.at("x").get<std::vector<double>>();
    r.l_sq = j.at("l_sq").get<double>();
    r.mode = mode_from_name(j.at("mode").get<std::string>());
    r.n_iterations = j.at("n_iterations").get<int>();
    r.erroneous_bits = j.at("erroneous_bits").get<std::vector<int>>();
    r.on_surface = j.at("on_surface").get<bool>();
    if (j.contains("ct_l_sq")) r.ct_l_sq = j["ct_l_sq"].get<double>();
    r.ct_verified = j.value("ct_verified", false);
    r.ct_note = j.value("ct_note", std::string{});
    if (j.contains("phase1_l_sq")) r.phase1_l_sq = j["phase1_l_sq"].get<double>();
    r.attempt_id = j.value("attempt_id", 0ULL);
    r.rng_seed = j.value("rng_seed", 0ULL);
    return r;
}

}  // namespace efloor
