#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace efloor {

struct GraphError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedHeader : GraphError {
    using GraphError::GraphError;
};
struct DegreeMismatch : GraphError {
    using GraphError::GraphError;
};
struct IndexOutOfRange : GraphError {
    using GraphError::GraphError;
};
struct InconsistentAdjacency : GraphError {
    using GraphError::GraphError;
};
struct NonPrimeParameter : GraphError {
    using GraphError::GraphError;
};

// Bipartite bit/check adjacency of an LDPC code. Immutable after
// construction; safe to share across threads.
class TannerGraph {
public:
    // Validates mutual consistency, index ranges and absence of duplicate
    // edges (duplicates would corrupt min-sum extrinsics).
    TannerGraph(std::vector<std::vector<int>> bit_neighbors,
                std::vector<std::vector<int>> check_neighbors);

    int n_bits() const { return static_cast<int>(bit_neighbors_.size()); }
    int n_checks() const { return static_cast<int>(check_neighbors_.size()); }
    std::size_t n_edges() const { return n_edges_; }

    const std::vector<int>& bit_neighbors(int bit) const { return bit_neighbors_[bit]; }
    const std::vector<int>& check_neighbors(int check) const { return check_neighbors_[check]; }

    int bit_degree(int bit) const { return static_cast<int>(bit_neighbors_[bit].size()); }
    int check_degree(int check) const { return static_cast<int>(check_neighbors_[check].size()); }

    // Uniform bit degree if the code is bit-regular, -1 otherwise.
    int uniform_bit_degree() const;

    bool operator==(const TannerGraph& other) const {
        return bit_neighbors_ == other.bit_neighbors_ && check_neighbors_ == other.check_neighbors_;
    }

private:
    std::vector<std::vector<int>> bit_neighbors_;
    std::vector<std::vector<int>> check_neighbors_;
    std::size_t n_edges_ = 0;
};

// (155,64,20) Tanner code: 3x5 array of 31x31 circulant permutations with
// shift exponents 5^l * 2^j mod 31.
TannerGraph construct_tanner_155();

// (3,6)-regular Margulis-type code over SL2(Z_p): checks indexed by group
// elements, bits by two copies of the group, edges generated by the two
// Margulis generators A=[[1,2],[0,1]] and B=[[1,0],[2,1]].
// For p=7 this gives the (672,336,16) parameters.
TannerGraph construct_margulis(int p);

TannerGraph parse_alist(std::istream& in);
TannerGraph parse_alist(const std::string& text);
std::string write_alist(const TannerGraph& g);

// Rank of the induced parity-check matrix under GF(2) elimination.
int gf2_rank(const TannerGraph& g);

}  // namespace efloor
