#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "errorfloor/channel.hpp"
#include "errorfloor/graph.hpp"

namespace efloor {

struct MCConfig {
    std::vector<SnrPoint> snr_points;
    std::vector<int> iteration_counts = {0, 1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
    long max_frames = 1'000'000;
    int target_errors = 100;
    std::uint64_t master_seed = 0;
    double ci_level = 0.95;
    int workers = 1;
    // Desk-scale guard: skip cells whose projected FER (from the best known
    // instanton asymptote) falls below this, unless force is set.
    std::optional<double> best_known_l_sq;
    double skip_below_fer = 1e-7;
    bool force = false;
};

struct FERPoint {
    SnrPoint snr{1.0, 1.0, 0.0};
    int n_iterations = 0;
    long frames = 0;
    long errors = 0;
    double fer = 0.0;
    double ci_low = 0.0;
    double ci_high = 1.0;
    std::uint64_t seed = 0;
    bool skipped = false;

    std::string csv_row(const std::string& code_name) const;
    static const char* csv_header();
};

// Wilson score interval (not Wald: deep-floor cells have tiny error counts).
void wilson_interval(long errors, long frames, double ci_level, double& lo, double& hi);

// Inverse standard normal CDF (Acklam's rational approximation, refined by
// one Halley step).
double inverse_normal_cdf(double p);
// Standard Gaussian upper tail Q(x).
double gaussian_tail(double x);
// Closed-form FER at n_it = 0: 1 - (1 - Q(s))^n_bits.
double zero_iteration_fer(int n_bits, const SnrPoint& snr);

// Frame f uses rng state hash(seed, f), so the estimate is identical under
// any parallel partition of the frame range. Stops at the first frame index
// reaching target_errors, or at max_frames.
FERPoint estimate_fer(const TannerGraph& g, const SnrPoint& snr, int n_it, int target_errors,
                      long max_frames, std::uint64_t seed, int workers = 1,
                      double ci_level = 0.95);

// One FERPoint per (snr, iteration-count) cell; cell seeds derived from the
// master seed. on_cell, when set, is called after each finished cell
// (checkpointing hook).
std::vector<FERPoint> sweep(const TannerGraph& g, const MCConfig& cfg,
                            const std::function<bool(const SnrPoint&, int)>& skip_cell = {},
                            const std::function<void(const FERPoint&)>& on_cell = {});

struct AsymptoteCurve {
    double l_sq = 0.0;
    std::string label;
    std::vector<std::pair<double, double>> points;  // (s^2, fer)
};

// Straight lines log(FER) = -l^2 s^2 / 2 sampled on the sweep's s^2 grid.
std::vector<AsymptoteCurve> overlay_asymptotes(const std::vector<FERPoint>& points,
                                               const std::vector<std::pair<double, std::string>>& l_sq_values);

}  // namespace efloor
