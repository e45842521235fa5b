#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "errorfloor/graph.hpp"

namespace efloor {

struct DepthCapExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateTie : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ZeroCoefficients : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wiberg computational tree: the Tanner graph unwrapped from a root bit to
// depth k. Evaluating min-sum on the tree equals the graph decoder's decision
// value at the root after k iterations, exactly (same summation order).
class ComputationalTree {
public:
    static constexpr int kDefaultDepthCap = 6;
    static constexpr std::size_t kNodeCap = 8'000'000;

    ComputationalTree(const TannerGraph& g, int root_bit, int depth,
                      int depth_cap = kDefaultDepthCap);

    int root_bit() const { return root_bit_; }
    int depth() const { return depth_; }
    std::size_t bit_node_count() const { return bit_orig_.size(); }

    double evaluate(std::span<const double> h) const;

    // Distinct original bit indices appearing in the tree, ascending.
    std::vector<int> support() const;

private:
    friend struct TreeEval;
    int root_bit_;
    int depth_;
    // Bit nodes in construction (BFS) order; node 0 is the root. Each bit
    // node owns a contiguous list of check children; each check child owns a
    // contiguous list of bit-node children.
    std::vector<int> bit_orig_;                         // bit node -> original bit
    std::vector<std::vector<std::vector<int>>> kids_;   // bit node -> per-check list of child bit nodes
};

ComputationalTree build_tree(const TannerGraph& g, int root, int k,
                             int depth_cap = ComputationalTree::kDefaultDepthCap);

// Integer multiplicities with which the log-likelihoods combine into the
// tree-root output; defines the error-surface hyperplane sum n_i h_i = 0.
struct CoefficientVector {
    int root_bit = 0;
    int depth = 0;
    std::vector<std::pair<int, long long>> entries;  // (bit, n_i), ascending bit

    long long sum() const;
    long long sum_sq() const;
    std::string to_json() const;
    static CoefficientVector from_json(const std::string& text);
};

// n_i = finite-difference derivative of the root output wrt h_i (step 1e-6),
// rounded to nearest integer. Throws DegenerateTie when a rounding residual
// exceeds 1e-3 (min-selection tie at the probed point).
CoefficientVector extract_coefficients(const ComputationalTree& t, std::span<const double> h);

// l^2 = (sum n_i)^2 / (sum n_i^2)
double ct_length_sq(const CoefficientVector& c);

// Closest point to all-ones on the hyperplane sum n_i x_i = 0:
// x_i = 1 - n_i * (sum n) / (sum n^2). Its length equals ct_length_sq.
std::vector<double> projected_instanton(const CoefficientVector& c, int n_bits);

}  // namespace efloor
