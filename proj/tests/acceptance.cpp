// Acceptance gate. Usage: efloor_acceptance <criterion 1..11>.
// Prints exactly one PASS/FAIL/SKIP line per criterion; exit 0 on PASS/SKIP.
// Long-running criteria (full 3, 4, 10) need EF_ACCEPT_SLOW=1; without it
// criterion 3 runs its mandatory smoke variant and 4/10 report SKIP.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "errorfloor/channel.hpp"
#include "errorfloor/comptree.hpp"
#include "errorfloor/decoder.hpp"
#include "errorfloor/graph.hpp"
#include "errorfloor/mc.hpp"
#include "errorfloor/rng.hpp"
#include "errorfloor/search.hpp"

using namespace efloor;

namespace {

bool slow_enabled() {
    const char* v = std::getenv("EF_ACCEPT_SLOW");
    return v && std::strcmp(v, "0") != 0 && *v != '\0';
}

int n_workers() {
    if (const char* env = std::getenv("ERRORFLOOR_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 4;
}

// Known weight-16 codeword flip support of the p=7 Margulis code under this
// library's bit indexing (configuration data, mirrored in
// data/codeword_supports.json).
const std::vector<int> kMargulisW16 = {18,  61,  65,  94,  161, 172, 201, 252,
                                       383, 387, 447, 451, 583, 616, 631, 647};

constexpr double kTannerMinL2 = 46.0 * 46.0 / 210.0;   // ~10.0762
constexpr double kMargulisMinL2 = 46.0 * 46.0 / 162.0; // ~13.0617

struct Line {
    std::ostringstream os;
    ~Line() { std::cout << os.str() << "\n"; }
};

// d_v = 17 bit-regular 4-cycle-free graph (girth >= 6): 17x3 array of 53x53
// circulant permutations with shifts l*j mod 53; shift-difference products
// (l1-l2)(j1-j2) never vanish mod the prime, so no 4-cycles arise.
TannerGraph synthetic_dv17() {
    constexpr int q = 53, rows = 17, cols = 3;
    std::vector<std::vector<int>> check_neighbors(rows * q);
    for (int l = 0; l < rows; ++l)
        for (int j = 0; j < cols; ++j) {
            const int e = l * j % q;
            for (int r = 0; r < q; ++r)
                check_neighbors[l * q + r].push_back(j * q + (r + e) % q);
        }
    std::vector<std::vector<int>> bit_neighbors(cols * q);
    for (int c = 0; c < rows * q; ++c)
        for (int i : check_neighbors[c]) bit_neighbors[i].push_back(c);
    return TannerGraph(std::move(bit_neighbors), std::move(check_neighbors));
}

// --- criteria -------------------------------------------------------------

bool criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const TannerGraph t = construct_tanner_155();
    bool ok = t.n_bits() == 155 && t.n_checks() == 93 && t.uniform_bit_degree() == 3;
    for (int c = 0; ok && c < t.n_checks(); ++c) ok = t.check_degree(c) == 5;
    ok = ok && (t.n_bits() - gf2_rank(t) == 64);

    const TannerGraph m = construct_margulis(7);
    ok = ok && m.n_bits() == 672 && m.n_checks() == 336 && m.uniform_bit_degree() == 3;
    for (int c = 0; ok && c < m.n_checks(); ++c) ok = ok && m.check_degree(c) == 6;
    ok = ok && (m.n_bits() - gf2_rank(m) == 336);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && secs < 1.0;
    Line() .os << "criterion 1 (code construction): " << (ok ? "PASS" : "FAIL")
               << " [" << secs << " s]";
    return ok;
}

bool criterion_2() {
    const TannerGraph g = construct_tanner_155();
    MinSumDecoder dec(g);
    Rng rng(0x2222);
    std::map<std::pair<int, int>, ComputationalTree> trees;
    long checked = 0, exact = 0;
    double worst_rel = 0.0;
    for (int t = 0; t < 500; ++t) {
        std::vector<double> h(g.n_bits());
        for (auto& v : h) v = 1.0 + 0.8 * rng.next_gaussian();
        const int root = static_cast<int>(rng.next_u64() % g.n_bits());
        for (int k = 1; k <= 4; ++k) {
            auto it = trees.find({root, k});
            if (it == trees.end())
                it = trees.emplace(std::make_pair(root, k), ComputationalTree(g, root, k)).first;
            DecoderConfig cfg;
            cfg.n_iterations = k;
            const double dv = dec.decode(h, cfg).soft[root];
            const double tv = it->second.evaluate(h);
            ++checked;
            if (tv == dv) {
                ++exact;
            } else {
                const double rel = std::fabs(tv - dv) / std::max(1.0, std::fabs(dv));
                worst_rel = std::max(worst_rel, rel);
            }
        }
    }
    const bool ok = exact == checked || worst_rel <= 1e-12;
    Line().os << "criterion 2 (decoder/CT identity): " << (ok ? "PASS" : "FAIL") << " ["
              << exact << "/" << checked << " bit-exact, worst rel err " << worst_rel << "]";
    return ok;
}

// Best record over n_attempts unbiased soft searches at 4 iterations.
InstantonRecord best_tanner_record(int n_attempts, std::uint64_t seed) {
    const TannerGraph g = construct_tanner_155();
    SearchConfig cfg;
    cfg.rng_seed = seed;
    const Spectrum spec = collect_spectrum(g, cfg, n_attempts, n_workers());
    if (spec.records.empty()) throw NoFailureFound("no attempt produced a record");
    return *std::min_element(
        spec.records.begin(), spec.records.end(),
        [](const InstantonRecord& a, const InstantonRecord& b) { return a.l_sq < b.l_sq; });
}

bool criterion_3() {
    if (!slow_enabled()) {
        const InstantonRecord best = best_tanner_record(100, 0x333);
        const bool ok = best.l_sq <= 11.0;
        Line().os << "criterion 3 (minimal Tanner instanton, 100-attempt smoke): "
                  << (ok ? "PASS" : "FAIL") << " [min l^2 = " << best.l_sq
                  << ", require <= 11; EF_ACCEPT_SLOW=1 for the full 1000-attempt run]";
        return ok;
    }
    const TannerGraph g = construct_tanner_155();
    InstantonRecord best = best_tanner_record(1000, 0x333);
    const bool close = std::fabs(best.l_sq - kTannerMinL2) <= 0.05;
    ct_verify(g, best);
    // re-extract to read the integer sums of the minimal record
    std::vector<double> probe(best.x.size());
    for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] = 1.0 - (1.0 + 1e-4) * (1.0 - best.x[i]);
    long long sum = 0, sum_sq = 0;
    bool sums_ok = false;
    const auto roots = decode(g, probe, {4, true}).erroneous_bits;
    for (int root : roots) {
        try {
            const auto c = extract_coefficients(build_tree(g, root, 4), probe);
            if (std::fabs(ct_length_sq(c) - best.l_sq) <= 1e-3 * best.l_sq) {
                sum = c.sum();
                sum_sq = c.sum_sq();
                sums_ok = sum == 46 && sum_sq == 210;
                if (sums_ok) break;
            }
        } catch (const DegenerateTie&) {
        }
    }
    const bool ok = close && sums_ok;
    Line().os << "criterion 3 (minimal Tanner instanton, full): " << (ok ? "PASS" : "FAIL")
              << " [min l^2 = " << best.l_sq << " vs " << kTannerMinL2 << " +-0.05; sum n = "
              << sum << ", sum n^2 = " << sum_sq << "]";
    return ok;
}

bool criterion_4() {
    if (!slow_enabled()) {
        Line().os << "criterion 4 (minimal Margulis instanton via seeding): SKIP "
                     "[slow; set EF_ACCEPT_SLOW=1]";
        return true;
    }
    const TannerGraph g = construct_margulis(7);
    double best = 1e30;
    for (std::uint64_t seed = 0; seed < 6 && std::fabs(best - kMargulisMinL2) > 0.1; ++seed) {
        SearchConfig cfg;
        cfg.rng_seed = 0x4440 + seed;
        cfg.mask = kMargulisW16;
        cfg.seed_point = codeword_seed(g, kMargulisW16);
        const InstantonRecord rec = biased_search(g, cfg);
        best = std::min(best, rec.l_sq);
    }
    const bool ok = std::fabs(best - kMargulisMinL2) <= 0.1;
    Line().os << "criterion 4 (minimal Margulis instanton via seeding): "
              << (ok ? "PASS" : "FAIL") << " [best l^2 = " << best << " vs " << kMargulisMinL2
              << " +-0.1]";
    return ok;
}

bool criterion_5() {
    const TannerGraph g = construct_margulis(7);
    SearchConfig cfg;
    cfg.n_iterations = 8;
    cfg.restarts = 4;
    cfg.max_evals = 8000;
    cfg.rng_seed = 0x555;
    const Spectrum spec = collect_spectrum(g, cfg, 100, n_workers());
    double mn = 1e30;
    for (const auto& r : spec.records) mn = std::min(mn, r.l_sq);
    const bool ok = !spec.records.empty() && mn >= 18.0;
    Line().os << "criterion 5 (Margulis spectrum gap at 8 iterations): "
              << (ok ? "PASS" : "FAIL") << " [" << spec.records.size()
              << " records, min l^2 = " << mn << ", require >= 18]";
    return ok;
}

bool criterion_6() {
    bool ok = true;
    std::ostringstream detail;
    for (const auto& [name, graph] :
         std::vector<std::pair<std::string, TannerGraph>>{{"tanner155", construct_tanner_155()},
                                                          {"dv17", synthetic_dv17()}}) {
        const int dv = graph.uniform_bit_degree();
        Rng rng(0x666);
        std::vector<double> h(graph.n_bits());
        for (auto& v : h) v = 1.0 + 1e-3 * rng.next_double();  // generic, strictly positive
        const ComputationalTree tree(graph, 0, 1);
        const CoefficientVector c = extract_coefficients(tree, h);
        const double l2 = ct_length_sq(c);
        bool this_ok = l2 == static_cast<double>(dv + 1);
        // the projected configuration must sit on the decision surface:
        // scaled outward it fails, scaled inward it decodes
        const auto x = projected_instanton(c, graph.n_bits());
        auto scaled = [&](double f) {
            std::vector<double> y(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1.0 - f * (1.0 - x[i]);
            return y;
        };
        MinSumDecoder dec(graph);
        DecoderConfig dcfg;
        dcfg.n_iterations = 1;
        this_ok = this_ok && dec.decode_fails(scaled(1.001), dcfg) &&
                  !dec.decode_fails(scaled(0.999), dcfg);
        detail << " " << name << ": l^2 = " << l2 << " (d_v+1 = " << dv + 1 << ")";
        ok = ok && this_ok;
    }
    Line().os << "criterion 6 (one-iteration degree law): " << (ok ? "PASS" : "FAIL") << " ["
              << detail.str() << "]";
    return ok;
}

bool criterion_7() {
    bool ok = true;
    std::ostringstream detail;
    const std::vector<std::pair<std::string, TannerGraph>> codes{
        {"tanner155", construct_tanner_155()}, {"margulis:7", construct_margulis(7)}};
    const std::vector<std::vector<double>> s_values{{2.5, 3.0, 3.5}, {3.0, 3.5, 4.0}};
    for (std::size_t ci = 0; ci < codes.size(); ++ci) {
        for (double s : s_values[ci]) {
            const SnrPoint snr = SnrPoint::from_s(s);
            const double analytic = zero_iteration_fer(codes[ci].second.n_bits(), snr);
            const FERPoint est = estimate_fer(codes[ci].second, snr, 0, 200, 200000,
                                              mix_seed(0x777, static_cast<std::uint64_t>(ci * 10 + s * 2)),
                                              n_workers());
            const bool inside = est.ci_low <= analytic && analytic <= est.ci_high;
            detail << " " << codes[ci].first << "@s=" << s << ": fer " << est.fer << " ci ["
                   << est.ci_low << "," << est.ci_high << "] analytic " << analytic
                   << (inside ? " in" : " OUT");
            ok = ok && inside;
        }
    }
    Line().os << "criterion 7 (zero-iteration analytic anchor): " << (ok ? "PASS" : "FAIL")
              << " [" << detail.str() << "]";
    return ok;
}

bool criterion_8() {
    const TannerGraph g = construct_tanner_155();
    const std::vector<double> dbs{1.0, 2.0, 3.0};
    const std::vector<int> iters{1, 2, 4, 8};
    std::map<std::pair<int, int>, FERPoint> cell;  // (db index, iter index)
    for (std::size_t si = 0; si < dbs.size(); ++si)
        for (std::size_t ii = 0; ii < iters.size(); ++ii)
            cell[{static_cast<int>(si), static_cast<int>(ii)}] =
                estimate_fer(g, SnrPoint::from_db(dbs[si]), iters[ii], 150, 2'000'000,
                             mix_seed(0x888, si * 16 + ii), n_workers());

    bool ok = true;
    std::ostringstream detail;
    auto mono = [&](const FERPoint& hi, const FERPoint& lo, const char* axis) {
        if (hi.fer < 1e-4 || lo.fer < 1e-4) return;  // below the measurable grid
        const bool fine = lo.fer <= hi.fer || lo.ci_low <= hi.ci_high;  // ordered or CI overlap
        if (!fine)
            detail << " violation(" << axis << "): " << hi.fer << " -> " << lo.fer;
        ok = ok && fine;
    };
    for (std::size_t ii = 0; ii < iters.size(); ++ii)
        for (std::size_t si = 0; si + 1 < dbs.size(); ++si)
            mono(cell[{(int)si, (int)ii}], cell[{(int)(si + 1), (int)ii}], "snr");
    for (std::size_t si = 0; si < dbs.size(); ++si)
        for (std::size_t ii = 0; ii + 1 < iters.size(); ++ii)
            mono(cell[{(int)si, (int)ii}], cell[{(int)si, (int)(ii + 1)}], "iters");
    Line().os << "criterion 8 (monotonicity suite): " << (ok ? "PASS" : "FAIL") << " [grid "
              << dbs.size() << "x" << iters.size() << detail.str() << "]";
    return ok;
}

bool criterion_9() {
    const TannerGraph g = construct_tanner_155();
    const std::vector<double> s2{2.1, 2.5, 2.9};
    std::vector<double> xs, ys;
    std::ostringstream detail;
    for (std::size_t i = 0; i < s2.size(); ++i) {
        const FERPoint pt = estimate_fer(g, SnrPoint::from_s_squared(s2[i]), 4, 40, 50'000'000,
                                         mix_seed(0x999, i), n_workers());
        if (pt.errors < 5) continue;  // not measurable at desk scale
        xs.push_back(s2[i]);
        ys.push_back(std::log(pt.fer));
        detail << " (" << s2[i] << ", " << pt.fer << ")";
    }
    if (xs.size() < 2) {
        Line().os << "criterion 9 (slope convergence): FAIL [fewer than 2 measurable points]";
        return false;
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = num / den;
    const double target = -kTannerMinL2 / 2.0;
    const bool ok = std::fabs(slope - target) <= 0.25 * std::fabs(target);
    Line().os << "criterion 9 (slope convergence): " << (ok ? "PASS" : "FAIL") << " [slope "
              << slope << " vs " << target << " +-25%;" << detail.str() << "]";
    return ok;
}

bool criterion_10() {
    if (!slow_enabled()) {
        Line().os << "criterion 10 (deep-iteration instantons): SKIP "
                     "[slow; set EF_ACCEPT_SLOW=1]";
        return true;
    }
    // (a) Tanner: restrict the search to the 12 strongest-noise bits of the
    // best 4-iteration record, then push the iteration count to 400.
    const TannerGraph tg = construct_tanner_155();
    const InstantonRecord base = best_tanner_record(60, 0xaaa0);
    std::vector<int> idx(tg.n_bits());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return base.x[a] < base.x[b]; });
    SearchConfig tcfg;
    tcfg.n_iterations = 400;
    tcfg.rng_seed = 0xaaa1;
    tcfg.mask = std::vector<int>(idx.begin(), idx.begin() + 12);
    tcfg.seed_point = base.x;
    double tanner_l2 = 1e30;
    for (std::uint64_t s = 0; s < 3 && tanner_l2 > 12.55; ++s) {
        tcfg.rng_seed = 0xaaa1 + s;
        try {
            tanner_l2 = std::min(tanner_l2, search(tg, tcfg).l_sq);
        } catch (const NoFailureFound&) {
        }
    }
    const bool tanner_ok = tanner_l2 <= 12.55;

    // (b) Margulis: 16-bit codeword mask at 100 iterations.
    const TannerGraph mg = construct_margulis(7);
    SearchConfig mcfg;
    mcfg.n_iterations = 100;
    mcfg.mask = kMargulisW16;
    mcfg.seed_point = codeword_seed(mg, kMargulisW16);
    double marg_l2 = 1e30;
    for (std::uint64_t s = 0; s < 4 && std::fabs(marg_l2 - 14.48) > 0.15; ++s) {
        mcfg.rng_seed = 0xbbb0 + s;
        try {
            const double l = search(mg, mcfg).l_sq;
            if (std::fabs(l - 14.48) < std::fabs(marg_l2 - 14.48)) marg_l2 = l;
        } catch (const NoFailureFound&) {
        }
    }
    const bool marg_ok = std::fabs(marg_l2 - 14.48) <= 0.15;
    const bool ok = tanner_ok && marg_ok;
    Line().os << "criterion 10 (deep-iteration instantons): " << (ok ? "PASS" : "FAIL")
              << " [tanner 400-iter l^2 = " << tanner_l2 << " (<= 12.55); margulis 100-iter l^2 = "
              << marg_l2 << " (14.48 +-0.15)]";
    return ok;
}

bool criterion_11() {
    bool ok = true;
    std::ostringstream detail;

    {  // alist round trip over random sparse graphs
        Rng rng(0xb11);
        bool rt = true;
        for (int t = 0; t < 50; ++t) {
            const int n_bits = 3 + static_cast<int>(rng.next_u64() % 30);
            const int n_checks = 1 + static_cast<int>(rng.next_u64() % 15);
            std::vector<std::vector<int>> bits(n_bits), checks(n_checks);
            for (int i = 0; i < n_bits; ++i) {
                const int deg = 1 + static_cast<int>(rng.next_u64() % std::min(3, n_checks));
                while (static_cast<int>(bits[i].size()) < deg) {
                    const int c = static_cast<int>(rng.next_u64() % n_checks);
                    if (std::find(bits[i].begin(), bits[i].end(), c) == bits[i].end())
                        bits[i].push_back(c);
                }
                for (int c : bits[i]) checks[c].push_back(i);
            }
            const TannerGraph g(std::move(bits), std::move(checks));
            rt = rt && parse_alist(write_alist(g)) == g;
        }
        detail << " alist-roundtrip:" << (rt ? "ok" : "FAIL");
        ok = ok && rt;
    }
    {  // projection identity over 1000 random integer coefficient vectors
        Rng rng(0xb12);
        bool pi = true;
        for (int t = 0; t < 1000; ++t) {
            CoefficientVector c;
            for (int e = 0; e < 1 + static_cast<int>(rng.next_u64() % 10); ++e) {
                const long long v = static_cast<long long>(rng.next_u64() % 11) - 5;
                if (v != 0) c.entries.emplace_back(e, v);
            }
            if (c.entries.empty() || c.sum() == 0) continue;
            const double expect = ct_length_sq(c);
            const double got = instanton_length_sq(projected_instanton(c, 16));
            pi = pi && std::fabs(got - expect) <= 1e-12 * std::max(1.0, expect);
        }
        detail << " projection-identity:" << (pi ? "ok" : "FAIL");
        ok = ok && pi;
    }
    {  // bisection sandwich along a sampled failing direction
        const TannerGraph g = construct_tanner_155();
        MinSumDecoder dec(g);
        DecoderConfig cfg;
        cfg.n_iterations = 4;
        Rng rng(0xb15);
        std::vector<double> u(g.n_bits()), x(g.n_bits());
        for (int t = 0; t < 500; ++t) {
            for (int i = 0; i < g.n_bits(); ++i) {
                u[i] = rng.next_gaussian();
                x[i] = 1.0 - u[i];
            }
            if (dec.decode_fails(x, cfg)) break;
        }
        const auto hp = hard_objective(dec, u, 4, 1e-6);
        bool bs = hp.has_value();
        if (bs) {
            double norm = 0.0;
            for (double v : u) norm += v * v;
            norm = std::sqrt(norm);
            for (int i = 0; i < g.n_bits(); ++i) x[i] = 1.0 - hp->r * u[i] / norm;
            bs = dec.decode_fails(x, cfg);
            for (int i = 0; i < g.n_bits(); ++i)
                x[i] = 1.0 - hp->r * (1.0 - 1e-5) * u[i] / norm;
            bs = bs && !dec.decode_fails(x, cfg);
        }
        detail << " bisection-sandwich:" << (bs ? "ok" : "FAIL");
        ok = ok && bs;
    }
    {  // mask purity on a mask guaranteed to contain failures (codeword support)
        const TannerGraph g = construct_margulis(7);
        SearchConfig cfg;
        cfg.rng_seed = 0xb13;
        cfg.restarts = 2;
        cfg.max_evals = 1500;
        cfg.mask = kMargulisW16;
        cfg.seed_point = codeword_seed(g, kMargulisW16);
        bool mp = true;
        const InstantonRecord rec = search(g, cfg);
        std::vector<bool> on(g.n_bits(), false);
        for (int i : *cfg.mask) on[i] = true;
        for (int i = 0; i < g.n_bits(); ++i)
            if (!on[i]) mp = mp && rec.x[i] == 1.0;
        detail << " mask-purity:" << (mp ? "ok" : "FAIL");
        ok = ok && mp;
    }
    {  // MC partition invariance
        const TannerGraph g = construct_tanner_155();
        const SnrPoint snr = SnrPoint::from_db(2.0);
        const FERPoint a = estimate_fer(g, snr, 1, 20, 3000, 0xb14, 1);
        const FERPoint b = estimate_fer(g, snr, 1, 20, 3000, 0xb14, 5);
        const bool mc = a.frames == b.frames && a.errors == b.errors && a.fer == b.fer;
        detail << " mc-partition-invariance:" << (mc ? "ok" : "FAIL");
        ok = ok && mc;
    }
    Line().os << "criterion 11 (property suites): " << (ok ? "PASS" : "FAIL") << " ["
              << detail.str() << "]";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: efloor_acceptance <criterion 1..11>\n";
        return 2;
    }
    const int n = std::atoi(argv[1]);
    bool ok = false;
    switch (n) {
        case 1: ok = criterion_1(); break;
        case 2: ok = criterion_2(); break;
        case 3: ok = criterion_3(); break;
        case 4: ok = criterion_4(); break;
        case 5: ok = criterion_5(); break;
        case 6: ok = criterion_6(); break;
        case 7: ok = criterion_7(); break;
        case 8: ok = criterion_8(); break;
        case 9: ok = criterion_9(); break;
        case 10: ok = criterion_10(); break;
        case 11: ok = criterion_11(); break;
        default: std::cerr << "unknown criterion " << n << "\n"; return 2;
    }
    return ok ? 0 : 1;
}
