#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errorfloor/decoder.hpp"
#include "errorfloor/graph.hpp"

namespace efloor {

struct NoFailureFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NoFailureInRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotACodeword : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SearchMode { Soft, Hard };

struct SearchConfig {
    SearchMode mode = SearchMode::Soft;
    int n_iterations = 4;
    int restarts = 6;
    int max_evals = 8000;         // per restart
    double simplex_scale = 0.1;   // initial vertex offset delta
    double anneal_factor = 0.5;   // delta shrink per restart
    double tol = 1e-8;            // objective-spread convergence tolerance
    double penalty = 1e4;         // soft-mode success-region constant, must exceed 4*n_bits
    double tol_bisect = 1e-6;
    double start_snr = 1.0;       // channel amplitude for sampling failing starts
    int start_tries = 200;        // failing-start samples before giving up
    std::optional<std::vector<int>> mask;          // bits allowed to carry noise
    std::optional<std::vector<double>> seed_point; // channel output to start from
    std::uint64_t rng_seed = 0;
};

struct InstantonRecord {
    std::vector<double> x;
    double l_sq = 0.0;
    SearchMode mode = SearchMode::Soft;
    int n_iterations = 0;
    std::vector<int> erroneous_bits;
    bool on_surface = false;
    std::optional<double> ct_l_sq;   // set by verification
    bool ct_verified = false;
    std::string ct_note;
    std::optional<double> phase1_l_sq;  // masked-phase result of a biased search
    std::uint64_t attempt_id = 0;
    std::uint64_t rng_seed = 0;

    std::string to_json() const;
    static InstantonRecord from_json(const std::string& text);
};

struct Spectrum {
    std::vector<InstantonRecord> records;
    double bin_width = 0.25;
    int n_attempts = 0;
    int n_failed_attempts = 0;  // attempts that found no failing configuration

    std::map<long, long> histogram() const;  // bin index -> count
    std::optional<double> min_l_sq() const;
    std::string histogram_text() const;      // two columns: bin center, count
};

// l^2 in the erroneous region, penalty + l^2 in the success region. The
// additive constant keeps relative ordering among failing points untouched
// while any failing vertex beats any succeeding one.
double soft_objective(MinSumDecoder& dec, std::span<const double> x, int n_it, double penalty);

struct HardPoint {
    double r = 0.0;               // surface radius along the direction
    std::vector<double> x;        // failing point at radius r
};

// Minimal failing radius along unit direction u (zero outside mask), found
// by geometric bracketing then bisection. Returns nothing when the direction
// never causes failure up to r_max = 2*sqrt(n_bits).
std::optional<HardPoint> hard_objective(MinSumDecoder& dec, std::span<const double> u, int n_it,
                                        double tol_bisect = 1e-6);

struct NelderMeadResult {
    std::vector<double> point;
    double value = 0.0;
    long evals = 0;
};

// Standard downhill simplex: reflection 1, expansion 2, contraction 0.5,
// shrink 0.5. Initial simplex is start plus delta*e_j per coordinate.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::span<const double> start, double delta, double tol,
                             long max_evals);

// One annealed instanton-amoeba run: random (or seeded) start, Nelder-Mead
// with recenter + delta-shrink restarts, then a radial bisection landing the
// record exactly on the error surface. Throws NoFailureFound when no failing
// configuration is ever encountered.
InstantonRecord search(const TannerGraph& g, const SearchConfig& cfg);

// Near-midpoint between the all-ones codeword and the codeword obtained by
// flipping flip_support: x = -eps on the support, 1 elsewhere.
std::vector<double> codeword_seed(const TannerGraph& g, const std::vector<int>& flip_support,
                                  double eps = 1e-3);

// Two-phase search: masked run, then full-space run seeded at the masked
// optimum.
InstantonRecord biased_search(const TannerGraph& g, const SearchConfig& cfg);

// Independent attempts with per-attempt derived seeds; reproducible given
// the master seed and order-independent under parallel execution.
Spectrum collect_spectrum(const TannerGraph& g, const SearchConfig& cfg, int n_attempts,
                          int workers = 1,
                          const std::function<void(const InstantonRecord&)>& on_record = {});

// CT agreement check for records with small iteration counts: extracts
// coefficients at every erroneous bit (probed just inside the failure
// region) and stores the best-matching CT length in the record.
void ct_verify(const TannerGraph& g, InstantonRecord& rec,
               int depth_cap = 6);

}  // namespace efloor
