#include "errorfloor/graph.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_set>

namespace efloor {

TannerGraph::TannerGraph(std::vector<std::vector<int>> bit_neighbors,
                         std::vector<std::vector<int>> check_neighbors)
    : bit_neighbors_(std::move(bit_neighbors)), check_neighbors_(std::move(check_neighbors)) {
    const int n = n_bits();
    const int m = n_checks();
    if (n <= 0 || m <= 0) throw GraphError("graph must have at least one bit and one check");

    std::size_t bit_edges = 0, check_edges = 0;
    for (int i = 0; i < n; ++i) {
        std::unordered_set<int> seen;
        for (int c : bit_neighbors_[i]) {
            if (c < 0 || c >= m) throw IndexOutOfRange("check index out of range at bit " + std::to_string(i));
            if (!seen.insert(c).second) throw InconsistentAdjacency("duplicate edge at bit " + std::to_string(i));
        }
        bit_edges += bit_neighbors_[i].size();
    }
    for (int c = 0; c < m; ++c) {
        std::unordered_set<int> seen;
        for (int i : check_neighbors_[c]) {
            if (i < 0 || i >= n) throw IndexOutOfRange("bit index out of range at check " + std::to_string(c));
            if (!seen.insert(i).second) throw InconsistentAdjacency("duplicate edge at check " + std::to_string(c));
        }
        check_edges += check_neighbors_[c].size();
    }
    if (bit_edges != check_edges)
        throw InconsistentAdjacency("edge count mismatch between bit and check sides");

    // Mutual consistency: bit i lists c iff check c lists i.
    for (int c = 0; c < m; ++c) {
        for (int i : check_neighbors_[c]) {
            const auto& nb = bit_neighbors_[i];
            if (std::find(nb.begin(), nb.end(), c) == nb.end())
                throw InconsistentAdjacency("check " + std::to_string(c) + " lists bit " +
                                            std::to_string(i) + " but not vice versa");
        }
    }
    n_edges_ = bit_edges;
}

int TannerGraph::uniform_bit_degree() const {
    int d = bit_degree(0);
    for (int i = 1; i < n_bits(); ++i)
        if (bit_degree(i) != d) return -1;
    return d;
}

namespace {

TannerGraph from_check_lists(int n_bits, std::vector<std::vector<int>> check_neighbors) {
    std::vector<std::vector<int>> bit_neighbors(n_bits);
    for (int c = 0; c < static_cast<int>(check_neighbors.size()); ++c)
        for (int i : check_neighbors[c]) bit_neighbors[i].push_back(c);
    return TannerGraph(std::move(bit_neighbors), std::move(check_neighbors));
}

}  // namespace

TannerGraph construct_tanner_155() {
    constexpr int kP = 31;
    // Shift exponents e(l,j) = 5^l * 2^j mod 31; 2 has order 5 and 5 has
    // order 3 modulo 31.
    std::vector<std::vector<int>> check_neighbors(3 * kP);
    for (int l = 0; l < 3; ++l) {
        int pow5 = 1;
        for (int q = 0; q < l; ++q) pow5 = pow5 * 5 % kP;
        for (int j = 0; j < 5; ++j) {
            int e = pow5;
            for (int q = 0; q < j; ++q) e = e * 2 % kP;
            for (int r = 0; r < kP; ++r)
                check_neighbors[l * kP + r].push_back(j * kP + (r + e) % kP);
        }
    }
    for (auto& row : check_neighbors) std::sort(row.begin(), row.end());
    return from_check_lists(5 * kP, std::move(check_neighbors));
}

namespace {

using Mat2 = std::array<int, 4>;  // row-major 2x2 over Z_p

Mat2 mat_mul(const Mat2& a, const Mat2& b, int p) {
    return {(a[0] * b[0] + a[1] * b[2]) % p, (a[0] * b[1] + a[1] * b[3]) % p,
            (a[2] * b[0] + a[3] * b[2]) % p, (a[2] * b[1] + a[3] * b[3]) % p};
}

Mat2 mat_inv(const Mat2& a, int p) {  // det == 1
    auto m = [p](int v) { return ((v % p) + p) % p; };
    return {m(a[3]), m(-a[1]), m(-a[2]), m(a[0])};
}

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

}  // namespace

TannerGraph construct_margulis(int p) {
    if (!is_prime(p) || p < 5) throw NonPrimeParameter("margulis parameter must be a prime >= 5");

    // Enumerate SL2(Z_p) in lexicographic (a,b,c,d) order. This order is
    // load-bearing: the codeword-support sidecar data indexes bits by it.
    std::vector<Mat2> group;
    group.reserve(static_cast<std::size_t>(p) * (p * p - 1));
    std::map<Mat2, int> index;
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int c = 0; c < p; ++c)
                for (int d = 0; d < p; ++d)
                    if ((a * d - b * c) % p == 1 || (a * d - b * c) % p == 1 - p) {
                        index[{a, b, c, d}] = static_cast<int>(group.size());
                        group.push_back({a, b, c, d});
                    }
    const int n_checks = static_cast<int>(group.size());

    const Mat2 kA{1, 2, 0, 1}, kB{1, 0, 2, 1};
    const Mat2 kI{1, 0, 0, 1};
    // Connection words: copy 1 via {I, A, B^-1 A B}, copy 2 via {I, B, A^-1 B A}.
    // This is the generator-word rule that reproduces the (672,336,16)
    // invariants for p = 7 (girth 8, full GF(2) rank, minimum weight 16).
    const Mat2 conjA = mat_mul(mat_mul(mat_inv(kB, p), kA, p), kB, p);
    const Mat2 conjB = mat_mul(mat_mul(mat_inv(kA, p), kB, p), kA, p);
    const std::array<Mat2, 3> words1{kI, kA, conjA};
    const std::array<Mat2, 3> words2{kI, kB, conjB};

    std::vector<std::vector<int>> check_neighbors(n_checks);
    for (int gi = 0; gi < n_checks; ++gi) {
        for (const Mat2& w : words1) check_neighbors[gi].push_back(index.at(mat_mul(group[gi], w, p)));
        for (const Mat2& w : words2)
            check_neighbors[gi].push_back(n_checks + index.at(mat_mul(group[gi], w, p)));
        std::sort(check_neighbors[gi].begin(), check_neighbors[gi].end());
    }
    return from_check_lists(2 * n_checks, std::move(check_neighbors));
}

TannerGraph parse_alist(std::istream& in) {
    int n = 0, m = 0;
    if (!(in >> n >> m)) throw MalformedHeader("alist: missing N M header");
    if (n <= 0 || m <= 0) throw MalformedHeader("alist: non-positive dimensions");
    int max_bd = 0, max_cd = 0;
    if (!(in >> max_bd >> max_cd)) throw MalformedHeader("alist: missing max-degree line");

    // Whitespace-tolerant: adjacency rows may or may not be zero-padded to
    // the max degree, so tokenise the remainder and walk it row by row.
    std::vector<long> tokens;
    long v;
    while (in >> v) tokens.push_back(v);
    std::size_t pos = 0;
    auto take = [&](const char* what) {
        if (pos >= tokens.size())
            throw MalformedHeader(std::string("alist: unexpected end of input reading ") + what);
        return tokens[pos++];
    };

    std::vector<int> bit_deg(n), check_deg(m);
    for (int i = 0; i < n; ++i) bit_deg[i] = static_cast<int>(take("bit degrees"));
    for (int c = 0; c < m; ++c) check_deg[c] = static_cast<int>(take("check degrees"));
    for (int d : bit_deg)
        if (d < 0 || d > max_bd) throw DegreeMismatch("alist: bit degree outside [0, max_bit_degree]");
    for (int d : check_deg)
        if (d < 0 || d > max_cd) throw DegreeMismatch("alist: check degree outside [0, max_check_degree]");

    auto parse_rows = [&](int rows, const std::vector<int>& degs, int range, const char* what) {
        std::vector<std::vector<int>> out(rows);
        for (int r = 0; r < rows; ++r) {
            for (int taken = 0; taken < degs[r]; ++taken) {
                long t = take(what);
                if (t == 0)
                    throw DegreeMismatch(std::string("alist: row lists fewer entries than its declared degree in ") + what);
                if (t < 1 || t > range)
                    throw IndexOutOfRange(std::string("alist: index out of range in ") + what);
                out[r].push_back(static_cast<int>(t - 1));  // 1-indexed file -> 0-indexed internal
            }
            while (pos < tokens.size() && tokens[pos] == 0) ++pos;  // zero padding
        }
        return out;
    };

    auto bit_neighbors = parse_rows(n, bit_deg, m, "per-bit check lists");
    auto check_neighbors = parse_rows(m, check_deg, n, "per-check bit lists");
    if (pos != tokens.size()) throw MalformedHeader("alist: trailing non-padding data");

    try {
        return TannerGraph(std::move(bit_neighbors), std::move(check_neighbors));
    } catch (const IndexOutOfRange&) {
        throw;
    } catch (const GraphError& e) {
        throw InconsistentAdjacency(e.what());
    }
}

TannerGraph parse_alist(const std::string& text) {
    std::istringstream in(text);
    return parse_alist(in);
}

std::string write_alist(const TannerGraph& g) {
    std::ostringstream out;
    int max_bd = 0, max_cd = 0;
    for (int i = 0; i < g.n_bits(); ++i) max_bd = std::max(max_bd, g.bit_degree(i));
    for (int c = 0; c < g.n_checks(); ++c) max_cd = std::max(max_cd, g.check_degree(c));
    out << g.n_bits() << ' ' << g.n_checks() << '\n';
    out << max_bd << ' ' << max_cd << '\n';
    for (int i = 0; i < g.n_bits(); ++i) out << g.bit_degree(i) << (i + 1 < g.n_bits() ? ' ' : '\n');
    for (int c = 0; c < g.n_checks(); ++c) out << g.check_degree(c) << (c + 1 < g.n_checks() ? ' ' : '\n');
    auto emit = [&out](const std::vector<int>& row, int pad_to) {
        for (std::size_t k = 0; k < static_cast<std::size_t>(pad_to); ++k) {
            if (k) out << ' ';
            out << (k < row.size() ? row[k] + 1 : 0);
        }
        out << '\n';
    };
    for (int i = 0; i < g.n_bits(); ++i) emit(g.bit_neighbors(i), max_bd);
    for (int c = 0; c < g.n_checks(); ++c) emit(g.check_neighbors(c), max_cd);
    return out.str();
}

int gf2_rank(const TannerGraph& g) {
    const int n = g.n_bits();
    const int words = (n + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(g.n_checks(), std::vector<std::uint64_t>(words, 0));
    for (int c = 0; c < g.n_checks(); ++c)
        for (int i : g.check_neighbors(c)) rows[c][i >> 6] ^= 1ULL << (i & 63);

    int rank = 0;
    for (int col = 0; col < n && rank < g.n_checks(); ++col) {
        const int w = col >> 6;
        const std::uint64_t bit = 1ULL << (col & 63);
        int pivot = -1;
        for (int r = rank; r < g.n_checks(); ++r)
            if (rows[r][w] & bit) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = 0; r < g.n_checks(); ++r)
            if (r != rank && (rows[r][w] & bit))
                for (int k = 0; k < words; ++k) rows[r][k] ^= rows[rank][k];
        ++rank;
    }
    return rank;
}

}  // namespace efloor
