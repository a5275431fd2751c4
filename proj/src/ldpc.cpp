#include "semturbo/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "semturbo/rng.hpp"

namespace semturbo::ldpc {

namespace {

void fisher_yates(std::vector<int>& v, rng::Stream& rs) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rs.next_below(i)]);
}

ParityMatrix assemble(const CodeSpec& spec, rng::Stream& rs) {
    const int m = spec.check_count();
    const int rows_per_block = spec.n / spec.dc;
    ParityMatrix h(m, spec.n);
    std::vector<int> perm(spec.n);
    for (int block = 0; block < spec.dv; ++block) {
        std::iota(perm.begin(), perm.end(), 0);
        if (block > 0) fisher_yates(perm, rs);
        for (int r = 0; r < rows_per_block; ++r)
            for (int t = 0; t < spec.dc; ++t)
                h.add_edge(block * rows_per_block + r, perm[r * spec.dc + t]);
    }
    return h;
}

}  // namespace

void ParityMatrix::sort_adjacency() {
    for (auto& cols : row_cols_) std::sort(cols.begin(), cols.end());
    for (auto& rows : col_rows_) std::sort(rows.begin(), rows.end());
}

bool has_four_cycle(const ParityMatrix& h) {
    // two rows sharing a column pair == a length-4 cycle in the graph
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(static_cast<std::size_t>(h.rows()) * 4);
    for (int r = 0; r < h.rows(); ++r) {
        const auto& cols = h.row_cols(r);
        for (std::size_t a = 0; a < cols.size(); ++a)
            for (std::size_t b = a + 1; b < cols.size(); ++b) {
                const int u = std::min(cols[a], cols[b]);
                const int v = std::max(cols[a], cols[b]);
                const std::uint64_t key =
                    (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint32_t>(v);
                if (!seen.insert(key).second) return true;
            }
    }
    return false;
}

ParityMatrix construct_regular_code(const CodeSpec& spec) {
    if (spec.n < 1 || spec.dv < 1 || spec.dc < 1)
        throw std::invalid_argument("construct_regular_code: n, dv, dc must be positive");
    if ((static_cast<long long>(spec.n) * spec.dv) % spec.dc != 0)
        throw std::invalid_argument("construct_regular_code: n*dv=" +
                                    std::to_string(static_cast<long long>(spec.n) * spec.dv) +
                                    " not divisible by dc=" + std::to_string(spec.dc));
    auto rs = rng::derive(spec.seed, rng::StreamTag::code_construction, spec.n,
                          static_cast<std::uint64_t>(spec.dv) << 16 | spec.dc);
    ParityMatrix h = assemble(spec, rs);
    for (int attempt = 0; attempt < 100 && has_four_cycle(h); ++attempt) h = assemble(spec, rs);
    h.sort_adjacency();
    return h;
}

bool syndrome_check(const ParityMatrix& h, std::span<const std::uint8_t> bits) {
    if (static_cast<int>(bits.size()) != h.cols())
        throw std::invalid_argument("syndrome_check: got " + std::to_string(bits.size()) +
                                    " bits for n=" + std::to_string(h.cols()));
    for (int r = 0; r < h.rows(); ++r) {
        std::uint8_t parity = 0;
        for (int c : h.row_cols(r)) parity ^= (bits[c] & 1);
        if (parity) return false;
    }
    return true;
}

void write_alist(const ParityMatrix& h, std::ostream& os) {
    const int n = h.cols(), m = h.rows();
    std::size_t max_col = 0, max_row = 0;
    for (int c = 0; c < n; ++c) max_col = std::max(max_col, h.col_rows(c).size());
    for (int r = 0; r < m; ++r) max_row = std::max(max_row, h.row_cols(r).size());
    os << n << ' ' << m << '\n' << max_col << ' ' << max_row << '\n';
    for (int c = 0; c < n; ++c) os << h.col_rows(c).size() << (c + 1 < n ? ' ' : '\n');
    for (int r = 0; r < m; ++r) os << h.row_cols(r).size() << (r + 1 < m ? ' ' : '\n');
    for (int c = 0; c < n; ++c) {
        const auto& rows = h.col_rows(c);
        for (std::size_t i = 0; i < rows.size(); ++i)
            os << rows[i] + 1 << (i + 1 < rows.size() ? ' ' : '\n');
    }
    for (int r = 0; r < m; ++r) {
        const auto& cols = h.row_cols(r);
        for (std::size_t i = 0; i < cols.size(); ++i)
            os << cols[i] + 1 << (i + 1 < cols.size() ? ' ' : '\n');
    }
}

SystematicCode::SystematicCode(ParityMatrix h) : h_(std::move(h)) {
    const int n = h_.cols(), m = h_.rows();
    const int words = (n + 63) / 64;

    // dense GF(2) copy of H for Gauss-Jordan elimination
    std::vector<std::vector<std::uint64_t>> rows(m, std::vector<std::uint64_t>(words, 0));
    for (int r = 0; r < m; ++r)
        for (int c : h_.row_cols(r)) rows[r][c >> 6] ^= (1ULL << (c & 63));

    auto test_bit = [&](int r, int c) { return (rows[r][c >> 6] >> (c & 63)) & 1ULL; };
    auto xor_rows = [&](int dst, int src) {
        for (int w = 0; w < words; ++w) rows[dst][w] ^= rows[src][w];
    };

    int pivot_row = 0;
    std::vector<int> pivot_row_of_col;  // parallel to pivot_cols_
    for (int c = 0; c < n && pivot_row < m; ++c) {
        int found = -1;
        for (int r = pivot_row; r < m; ++r)
            if (test_bit(r, c)) {
                found = r;
                break;
            }
        if (found < 0) continue;
        std::swap(rows[pivot_row], rows[found]);
        for (int r = 0; r < m; ++r)
            if (r != pivot_row && test_bit(r, c)) xor_rows(r, pivot_row);
        pivot_cols_.push_back(c);
        pivot_row_of_col.push_back(pivot_row);
        ++pivot_row;
    }

    std::vector<char> is_pivot(n, 0);
    for (int c : pivot_cols_) is_pivot[c] = 1;
    std::vector<int> msg_index_of_col(n, -1);
    for (int c = 0; c < n; ++c)
        if (!is_pivot[c]) {
            msg_index_of_col[c] = static_cast<int>(systematic_cols_.size());
            systematic_cols_.push_back(c);
        }

    // in RREF each pivot row touches its pivot column plus free columns only
    parity_deps_.resize(pivot_cols_.size());
    for (std::size_t p = 0; p < pivot_cols_.size(); ++p) {
        const int r = pivot_row_of_col[p];
        for (int c = 0; c < n; ++c)
            if (c != pivot_cols_[p] && test_bit(r, c)) parity_deps_[p].push_back(msg_index_of_col[c]);
    }

    column_permutation_ = systematic_cols_;
    column_permutation_.insert(column_permutation_.end(), pivot_cols_.begin(), pivot_cols_.end());
}

std::vector<std::uint8_t> SystematicCode::encode(std::span<const std::uint8_t> message) const {
    if (static_cast<int>(message.size()) != k())
        throw std::invalid_argument("encode: got " + std::to_string(message.size()) +
                                    " message bits, expected k=" + std::to_string(k()));
    std::vector<std::uint8_t> cw(n(), 0);
    for (int j = 0; j < k(); ++j) cw[systematic_cols_[j]] = message[j] & 1;
    for (std::size_t p = 0; p < pivot_cols_.size(); ++p) {
        std::uint8_t v = 0;
        for (int j : parity_deps_[p]) v ^= message[j] & 1;
        cw[pivot_cols_[p]] = v;
    }
    return cw;
}

BpResult bp_decode(const ParityMatrix& h, std::span<const double> channel_llr,
                   std::span<const double> apriori_llr, int max_iters) {
    const int n = h.cols(), m = h.rows();
    if (static_cast<int>(channel_llr.size()) != n || static_cast<int>(apriori_llr.size()) != n)
        throw std::invalid_argument("bp_decode: LLR length " + std::to_string(channel_llr.size()) +
                                    "/" + std::to_string(apriori_llr.size()) +
                                    " vs n=" + std::to_string(n));
    if (max_iters < 1) throw std::invalid_argument("bp_decode: max_iters must be >= 1");

    auto clip = [](double v) { return v > kLlrClip ? kLlrClip : (v < -kLlrClip ? -kLlrClip : v); };

    std::vector<double> intrinsic(n);
    for (int i = 0; i < n; ++i) {
        const double sum = channel_llr[i] + apriori_llr[i];
        if (!std::isfinite(sum))
            throw std::domain_error("bp_decode: non-finite LLR at position " + std::to_string(i));
        intrinsic[i] = clip(sum);
    }

    // flat edge storage: edges grouped by check row
    std::vector<int> edge_col, check_offset(m + 1, 0);
    for (int r = 0; r < m; ++r) check_offset[r + 1] = check_offset[r] + static_cast<int>(h.row_cols(r).size());
    edge_col.reserve(check_offset[m]);
    for (int r = 0; r < m; ++r)
        for (int c : h.row_cols(r)) edge_col.push_back(c);
    std::vector<std::vector<int>> var_edges(n);
    for (int e = 0; e < static_cast<int>(edge_col.size()); ++e) var_edges[edge_col[e]].push_back(e);

    std::vector<double> msg_vc(edge_col.size());
    std::vector<double> msg_cv(edge_col.size(), 0.0);
    for (int e = 0; e < static_cast<int>(edge_col.size()); ++e) msg_vc[e] = intrinsic[edge_col[e]];

    BpResult res;
    res.posterior_llr.assign(intrinsic.begin(), intrinsic.end());
    res.hard_bits.assign(n, 0);

    std::vector<double> tv, suf;  // per-check tanh(m/2) values and suffix products
    constexpr double kTanhCap = 1.0 - 1e-15;
    for (int iter = 1; iter <= max_iters; ++iter) {
        // check update: tanh rule via prefix/suffix products (no division)
        for (int r = 0; r < m; ++r) {
            const int begin = check_offset[r], end = check_offset[r + 1];
            const int deg = end - begin;
            tv.resize(deg);
            suf.resize(deg + 1);
            for (int i = 0; i < deg; ++i) tv[i] = std::tanh(0.5 * msg_vc[begin + i]);
            suf[deg] = 1.0;
            for (int i = deg - 1; i >= 0; --i) suf[i] = suf[i + 1] * tv[i];
            double prefix = 1.0;
            for (int i = 0; i < deg; ++i) {
                double p = prefix * suf[i + 1];
                p = p > kTanhCap ? kTanhCap : (p < -kTanhCap ? -kTanhCap : p);
                msg_cv[begin + i] = clip(2.0 * std::atanh(p));
                prefix *= tv[i];
            }
        }
        // variable update and posterior
        for (int i = 0; i < n; ++i) {
            double sum = intrinsic[i];
            for (int e : var_edges[i]) sum += msg_cv[e];
            res.posterior_llr[i] = sum;
            res.hard_bits[i] = sum < 0.0 ? 1 : 0;
            for (int e : var_edges[i]) msg_vc[e] = clip(sum - msg_cv[e]);
        }
        res.iters_used = iter;
        if (syndrome_check(h, res.hard_bits)) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace semturbo::ldpc
