#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "errorfloor/graph.hpp"

namespace efloor {

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DecoderConfig {
    int n_iterations = 4;
    bool tie_is_error = true;  // a decision value of exactly 0 counts as erroneous
    static constexpr int kMaxIterations = 2048;
};

struct DecodeOutcome {
    std::vector<std::int8_t> hard;   // +-1 per bit
    std::vector<double> soft;        // decision values (h + sum of check messages)
    bool failed = false;             // hard != all-(+1)
    std::vector<int> erroneous_bits;
    bool syndrome_ok = false;        // diagnostic only, never alters control flow
};

// Plain min-sum, flooding schedule, exactly cfg.n_iterations rounds, no
// early exit. sign(0) propagates as + inside message updates; only the final
// hard decision treats 0 as erroneous (keeps the error region closed so the
// hard-amoeba bisection is well defined).
//
// Holds preallocated edge buffers; reuse one instance per thread when
// decoding many frames.
class MinSumDecoder {
public:
    explicit MinSumDecoder(const TannerGraph& g);

    DecodeOutcome decode(std::span<const double> h, const DecoderConfig& cfg);

    // Hard-decision history after every iteration (trace.size() == n_iterations).
    std::vector<std::vector<std::int8_t>> decode_trace(std::span<const double> h,
                                                       const DecoderConfig& cfg);

    // Cheap failure probe for tight search loops (no outcome vectors built).
    bool decode_fails(std::span<const double> h, const DecoderConfig& cfg);

    const TannerGraph& graph() const { return *g_; }

private:
    void run_iterations(std::span<const double> h, int n_iterations,
                        std::vector<std::vector<std::int8_t>>* trace);
    double decision_value(std::span<const double> h, int bit) const;

    const TannerGraph* g_;
    // CSR edge layout: edges grouped by check; bit_edges_ lists edge ids per bit.
    std::vector<int> edge_bit_;                // edge -> bit index
    std::vector<std::vector<int>> bit_edges_;  // bit -> edge ids (neighbor order)
    std::vector<int> check_offset_;            // check -> first edge id
    std::vector<double> mu_;                   // bit-to-check messages
    std::vector<double> nu_;                   // check-to-bit messages
};

DecodeOutcome decode(const TannerGraph& g, std::span<const double> h, const DecoderConfig& cfg);
std::vector<std::vector<std::int8_t>> decode_trace(const TannerGraph& g, std::span<const double> h,
                                                   const DecoderConfig& cfg);

// True iff every check has an even number of -1 neighbors.
bool syndrome_ok(const TannerGraph& g, std::span<const std::int8_t> hard);

}  // namespace efloor
