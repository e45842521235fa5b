#include "errorfloor/mc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "errorfloor/decoder.hpp"
#include "errorfloor/rng.hpp"

namespace efloor {

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425, p_high = 1.0 - p_low;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= p_high) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against erfc, good to full double precision.
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
    x -= u / (1.0 + x * u / 2.0);
    return x;
}

double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double zero_iteration_fer(int n_bits, const SnrPoint& snr) {
    // Without message passing a bit is erroneous iff x_i <= 0, i.e. its
    // Gaussian falls below -s; the frame fails unless every bit is clean.
    return 1.0 - std::pow(1.0 - gaussian_tail(snr.s), n_bits);
}

void wilson_interval(long errors, long frames, double ci_level, double& lo, double& hi) {
    if (frames <= 0) {
        lo = 0.0;
        hi = 1.0;
        return;
    }
    const double z = inverse_normal_cdf(0.5 + ci_level / 2.0);
    const double n = static_cast<double>(frames);
    const double phat = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
}

namespace {

bool frame_fails(MinSumDecoder& dec, const SnrPoint& snr, const DecoderConfig& dcfg,
                 std::uint64_t seed, long frame, std::vector<double>& x) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(frame)));
    const int n = dec.graph().n_bits();
    const double sigma = 1.0 / snr.s;
    x.resize(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 + sigma * rng.next_gaussian();
    return dec.decode_fails(x, dcfg);
}

}  // namespace

FERPoint estimate_fer(const TannerGraph& g, const SnrPoint& snr, int n_it, int target_errors,
                      long max_frames, std::uint64_t seed, int workers, double ci_level) {
    FERPoint out;
    out.snr = snr;
    out.n_iterations = n_it;
    out.seed = seed;

    DecoderConfig dcfg;
    dcfg.n_iterations = n_it;
    workers = std::max(1, workers);

    // Deterministic stopping rule: the result is defined by the first frame
    // index F at which the cumulative error count reaches target_errors
    // (frames = F+1), or frames = max_frames. Frames are seeded individually,
    // so we scan fixed-size chunks: each chunk's per-frame outcomes are
    // computed (possibly in parallel), then folded in index order. That makes
    // the estimate invariant to the worker count.
    const long chunk = std::max<long>(1024, 256L * workers);
    long frames_done = 0;
    long errors = 0;
    std::vector<std::uint8_t> fail_flags;
    while (frames_done < max_frames && errors < target_errors) {
        const long this_chunk = std::min(chunk, max_frames - frames_done);
        fail_flags.assign(this_chunk, 0);
        if (workers == 1) {
            MinSumDecoder dec(g);
            std::vector<double> x;
            for (long k = 0; k < this_chunk; ++k)
                fail_flags[k] = frame_fails(dec, snr, dcfg, seed, frames_done + k, x);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) {
                pool.emplace_back([&, w] {
                    MinSumDecoder dec(g);
                    std::vector<double> x;
                    for (long k = w; k < this_chunk; k += workers)
                        fail_flags[k] = frame_fails(dec, snr, dcfg, seed, frames_done + k, x);
                });
            }
            for (auto& t : pool) t.join();
        }
        for (long k = 0; k < this_chunk; ++k) {
            ++frames_done;
            if (fail_flags[k]) {
                ++errors;
                if (errors >= target_errors) break;
            }
        }
    }

    out.frames = frames_done;
    out.errors = errors;
    out.fer = frames_done ? static_cast<double>(errors) / static_cast<double>(frames_done) : 0.0;
    wilson_interval(errors, frames_done, ci_level, out.ci_low, out.ci_high);
    return out;
}

std::vector<FERPoint> sweep(const TannerGraph& g, const MCConfig& cfg,
                            const std::function<bool(const SnrPoint&, int)>& skip_cell,
                            const std::function<void(const FERPoint&)>& on_cell) {
    std::vector<FERPoint> out;
    std::uint64_t cell = 0;
    for (const SnrPoint& snr : cfg.snr_points) {
        for (int n_it : cfg.iteration_counts) {
            const std::uint64_t seed = mix_seed(cfg.master_seed, cell++);
            if (skip_cell && skip_cell(snr, n_it)) continue;
            FERPoint pt;
            const bool guard = !cfg.force && cfg.best_known_l_sq && n_it > 0 &&
                               fer_asymptote(*cfg.best_known_l_sq, snr) < cfg.skip_below_fer;
            if (guard) {
                pt.snr = snr;
                pt.n_iterations = n_it;
                pt.seed = seed;
                pt.skipped = true;
            } else {
                pt = estimate_fer(g, snr, n_it, cfg.target_errors, cfg.max_frames, seed,
                                  cfg.workers, cfg.ci_level);
            }
            if (on_cell) on_cell(pt);
            out.push_back(std::move(pt));
        }
    }
    return out;
}

const char* FERPoint::csv_header() {
    return "code,snr_db,s_squared,n_iterations,frames,errors,fer,ci_low,ci_high,seed";
}

std::string FERPoint::csv_row(const std::string& code_name) const {
    std::ostringstream os;
    os.precision(12);
    os << code_name << ',' << snr.snr_db << ',' << snr.s_squared << ',' << n_iterations << ','
       << frames << ',' << errors << ',' << fer << ',' << ci_low << ',' << ci_high << ',' << seed;
    return os.str();
}

std::vector<AsymptoteCurve> overlay_asymptotes(
    const std::vector<FERPoint>& points,
    const std::vector<std::pair<double, std::string>>& l_sq_values) {
    std::vector<double> grid;
    for (const auto& p : points) grid.push_back(p.snr.s_squared);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<AsymptoteCurve> curves;
    for (const auto& [l_sq, label] : l_sq_values) {
        AsymptoteCurve c;
        c.l_sq = l_sq;
        c.label = label;
        for (double s2 : grid) c.points.emplace_back(s2, std::exp(-l_sq * s2 / 2.0));
        curves.push_back(std::move(c));
    }
    return curves;
}

}  // namespace efloor
