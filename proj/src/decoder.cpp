#include "errorfloor/decoder.hpp"

#include <cmath>

namespace efloor {

namespace {

void check_shapes(const TannerGraph& g, std::span<const double> h, const DecoderConfig& cfg) {
    if (static_cast<int>(h.size()) != g.n_bits())
        throw ShapeMismatch("llr length does not match n_bits");
    if (cfg.n_iterations < 0 || cfg.n_iterations > DecoderConfig::kMaxIterations)
        throw ShapeMismatch("n_iterations outside [0, max]");
}

}  // namespace

MinSumDecoder::MinSumDecoder(const TannerGraph& g) : g_(&g) {
    check_offset_.reserve(g.n_checks() + 1);
    bit_edges_.resize(g.n_bits());
    int e = 0;
    for (int c = 0; c < g.n_checks(); ++c) {
        check_offset_.push_back(e);
        for (int i : g.check_neighbors(c)) {
            edge_bit_.push_back(i);
            ++e;
        }
    }
    check_offset_.push_back(e);
    // Bit-side edge ids in the bit's own neighbor order, so message sums run
    // in the same order as the computational-tree evaluation.
    std::vector<int> cursor(g.n_checks());
    std::vector<std::vector<int>> edges_at(g.n_checks());
    for (int c = 0; c < g.n_checks(); ++c) {
        edges_at[c].resize(g.check_degree(c));
        for (int k = 0; k < g.check_degree(c); ++k) edges_at[c][k] = check_offset_[c] + k;
    }
    for (int i = 0; i < g.n_bits(); ++i) {
        for (int c : g.bit_neighbors(i)) {
            const auto& nbr = g.check_neighbors(c);
            int k = 0;
            while (nbr[k] != i) ++k;
            bit_edges_[i].push_back(check_offset_[c] + k);
        }
    }
    mu_.resize(edge_bit_.size());
    nu_.resize(edge_bit_.size());
}

void MinSumDecoder::run_iterations(std::span<const double> h, int n_iterations,
                                   std::vector<std::vector<std::int8_t>>* trace) {
    const TannerGraph& g = *g_;
    std::fill(nu_.begin(), nu_.end(), 0.0);
    for (int it = 0; it < n_iterations; ++it) {
        // bit -> check: mu = h_i + sum of other incoming check messages, in
        // neighbor order (exact exclusion sum, not total-minus-one, to keep
        // floating-point identity with the computational tree).
        for (int i = 0; i < g.n_bits(); ++i) {
            const auto& edges = bit_edges_[i];
            const int d = static_cast<int>(edges.size());
            for (int a = 0; a < d; ++a) {
                double m = h[i];
                for (int b = 0; b < d; ++b)
                    if (b != a) m += nu_[edges[b]];
                mu_[edges[a]] = m;
            }
        }
        // check -> bit: sign product and min magnitude over the other edges.
        // sign(0) propagates as +.
        for (int c = 0; c < g.n_checks(); ++c) {
            const int lo = check_offset_[c], hi = check_offset_[c + 1];
            for (int a = lo; a < hi; ++a) {
                double mn = HUGE_VAL;
                bool neg = false;
                for (int b = lo; b < hi; ++b) {
                    if (b == a) continue;
                    const double m = mu_[b];
                    if (m < 0.0) neg = !neg;
                    const double mag = std::fabs(m);
                    if (mag < mn) mn = mag;
                }
                nu_[a] = neg ? -mn : mn;
            }
        }
        if (trace) {
            std::vector<std::int8_t> hard(g.n_bits());
            for (int i = 0; i < g.n_bits(); ++i) hard[i] = decision_value(h, i) > 0.0 ? 1 : -1;
            trace->push_back(std::move(hard));
        }
    }
}

double MinSumDecoder::decision_value(std::span<const double> h, int bit) const {
    double v = h[bit];
    for (int e : bit_edges_[bit]) v += nu_[e];
    return v;
}

DecodeOutcome MinSumDecoder::decode(std::span<const double> h, const DecoderConfig& cfg) {
    check_shapes(*g_, h, cfg);
    run_iterations(h, cfg.n_iterations, nullptr);
    const int n = g_->n_bits();
    DecodeOutcome out;
    out.hard.resize(n);
    out.soft.resize(n);
    for (int i = 0; i < n; ++i) {
        const double v = cfg.n_iterations == 0 ? h[i] : decision_value(h, i);
        out.soft[i] = v;
        const bool err = cfg.tie_is_error ? !(v > 0.0) : v < 0.0;
        out.hard[i] = err ? -1 : 1;
        if (err) out.erroneous_bits.push_back(i);
    }
    out.failed = !out.erroneous_bits.empty();
    out.syndrome_ok = efloor::syndrome_ok(*g_, out.hard);
    return out;
}

bool MinSumDecoder::decode_fails(std::span<const double> h, const DecoderConfig& cfg) {
    check_shapes(*g_, h, cfg);
    run_iterations(h, cfg.n_iterations, nullptr);
    for (int i = 0; i < g_->n_bits(); ++i) {
        const double v = cfg.n_iterations == 0 ? h[i] : decision_value(h, i);
        if (cfg.tie_is_error ? !(v > 0.0) : v < 0.0) return true;
    }
    return false;
}

std::vector<std::vector<std::int8_t>> MinSumDecoder::decode_trace(std::span<const double> h,
                                                                  const DecoderConfig& cfg) {
    check_shapes(*g_, h, cfg);
    std::vector<std::vector<std::int8_t>> trace;
    trace.reserve(cfg.n_iterations);
    run_iterations(h, cfg.n_iterations, &trace);
    return trace;
}

DecodeOutcome decode(const TannerGraph& g, std::span<const double> h, const DecoderConfig& cfg) {
    MinSumDecoder dec(g);
    return dec.decode(h, cfg);
}

std::vector<std::vector<std::int8_t>> decode_trace(const TannerGraph& g, std::span<const double> h,
                                                   const DecoderConfig& cfg) {
    MinSumDecoder dec(g);
    return dec.decode_trace(h, cfg);
}

bool syndrome_ok(const TannerGraph& g, std::span<const std::int8_t> hard) {
    if (static_cast<int>(hard.size()) != g.n_bits())
        throw ShapeMismatch("hard-decision length does not match n_bits");
    for (int c = 0; c < g.n_checks(); ++c) {
        int flips = 0;
        for (int i : g.check_neighbors(c))
            if (hard[i] < 0) ++flips;
        if (flips % 2) return false;
    }
    return true;
}

}  // namespace efloor
