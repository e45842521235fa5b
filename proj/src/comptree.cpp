#include "errorfloor/comptree.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace efloor {

ComputationalTree::ComputationalTree(const TannerGraph& g, int root_bit, int depth, int depth_cap)
    : root_bit_(root_bit), depth_(depth) {
    if (root_bit < 0 || root_bit >= g.n_bits())
        throw std::out_of_range("computational tree root out of range");
    if (depth < 0 || depth > depth_cap)
        throw DepthCapExceeded("computational-tree depth " + std::to_string(depth) +
                               " exceeds cap " + std::to_string(depth_cap));

    // BFS layer by layer; each non-root node excludes the parent edge when
    // branching. A bit node at layer t spawns check children iff t < depth.
    bit_orig_.push_back(root_bit);
    kids_.emplace_back();
    struct Pending {
        int node;        // bit node id
        int parent_check;  // original check to exclude (-1 for root)
    };
    std::vector<Pending> frontier{{0, -1}};
    for (int layer = 0; layer < depth; ++layer) {
        std::vector<Pending> next;
        for (const Pending& pn : frontier) {
            const int orig = bit_orig_[pn.node];
            for (int c : g.bit_neighbors(orig)) {
                if (c == pn.parent_check) continue;
                auto& child_bits = kids_[pn.node].emplace_back();
                for (int j : g.check_neighbors(c)) {
                    if (j == orig) continue;
                    const int id = static_cast<int>(bit_orig_.size());
                    if (bit_orig_.size() >= kNodeCap)
                        throw DepthCapExceeded("computational tree exceeds node cap");
                    bit_orig_.push_back(j);
                    kids_.emplace_back();
                    child_bits.push_back(id);
                    next.push_back({id, c});
                }
            }
        }
        frontier = std::move(next);
    }
}

double ComputationalTree::evaluate(std::span<const double> h) const {
    // Bit nodes are in BFS order, so a reverse sweep sees children first.
    std::vector<double> value(bit_orig_.size());
    for (int bn = static_cast<int>(bit_orig_.size()) - 1; bn >= 0; --bn) {
        double v = h[bit_orig_[bn]];
        for (const auto& check_kids : kids_[bn]) {
            double mn = HUGE_VAL;
            bool neg = false;
            for (int child : check_kids) {
                const double m = value[child];
                if (m < 0.0) neg = !neg;
                const double mag = std::fabs(m);
                if (mag < mn) mn = mag;
            }
            v += neg ? -mn : mn;
        }
        value[bn] = v;
    }
    return value[0];
}

std::vector<int> ComputationalTree::support() const {
    std::set<int> bits(bit_orig_.begin(), bit_orig_.end());
    return {bits.begin(), bits.end()};
}

ComputationalTree build_tree(const TannerGraph& g, int root, int k, int depth_cap) {
    return ComputationalTree(g, root, k, depth_cap);
}

long long CoefficientVector::sum() const {
    long long s = 0;
    for (const auto& [bit, n] : entries) s += n;
    return s;
}

long long CoefficientVector::sum_sq() const {
    long long s = 0;
    for (const auto& [bit, n] : entries) s += n * n;
    return s;
}

std::string CoefficientVector::to_json() const {
    nlohmann::json j;
    j["root"] = root_bit;
    j["depth"] = depth;
    auto& e = j["entries"] = nlohmann::json::array();
    for (const auto& [bit, n] : entries) e.push_back({bit, n});
    return j.dump();
}

CoefficientVector CoefficientVector::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    CoefficientVector c;
    c.root_bit = j.at("root").get<int>();
    c.depth = j.at("depth").get<int>();
    for (const auto& e : j.at("entries"))
        c.entries.emplace_back(e.at(0).get<int>(), e.at(1).get<long long>());
    return c;
}

CoefficientVector extract_coefficients(const ComputationalTree& t, std::span<const double> h) {
    constexpr double kStep = 1e-6;
    constexpr double kMaxResidual = 1e-3;
    const double base = t.evaluate(h);
    std::vector<double> probe(h.begin(), h.end());
    CoefficientVector c;
    c.root_bit = t.root_bit();
    c.depth = t.depth();
    for (int bit : t.support()) {
        probe[bit] += kStep;
        const double slope = (t.evaluate(probe) - base) / kStep;
        probe[bit] = h[bit];
        const double rounded = std::round(slope);
        if (std::fabs(slope - rounded) > kMaxResidual)
            throw DegenerateTie("non-integer coefficient " + std::to_string(slope) + " at bit " +
                                std::to_string(bit) + " (min-selection tie at probed point)");
        if (rounded != 0.0) c.entries.emplace_back(bit, static_cast<long long>(rounded));
    }
    return c;
}

double ct_length_sq(const CoefficientVector& c) {
    const long long q = c.sum_sq();
    if (q == 0) throw ZeroCoefficients("coefficient vector is identically zero");
    const double s = static_cast<double>(c.sum());
    return s * s / static_cast<double>(q);
}

std::vector<double> projected_instanton(const CoefficientVector& c, int n_bits) {
    const long long q = c.sum_sq();
    if (q == 0) throw ZeroCoefficients("coefficient vector is identically zero");
    const double scale = static_cast<double>(c.sum()) / static_cast<double>(q);
    std::vector<double> x(n_bits, 1.0);
    for (const auto& [bit, n] : c.entries) x[bit] = 1.0 - static_cast<double>(n) * scale;
    return x;
}

}  // namespace efloor
