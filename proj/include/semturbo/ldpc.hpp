#ifndef SEMTURBO_LDPC_HPP
#define SEMTURBO_LDPC_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace semturbo::ldpc {

// (dv,dc)-regular code parameters; check count m = n*dv/dc is derived.
struct CodeSpec {
    int n = 900;
    int dv = 2;
    int dc = 3;
    std::uint64_t seed = 4;

    int check_count() const { return n * dv / dc; }
};

// Sparse GF(2) parity-check matrix stored as row and column adjacency.
class ParityMatrix {
  public:
    ParityMatrix(int m, int n) : m_(m), n_(n), row_cols_(m), col_rows_(n) {}

    int rows() const { return m_; }
    int cols() const { return n_; }

    void add_edge(int row, int col) {
        row_cols_[row].push_back(col);
        col_rows_[col].push_back(row);
    }

    const std::vector<int>& row_cols(int r) const { return row_cols_[r]; }
    const std::vector<int>& col_rows(int c) const { return col_rows_[c]; }

    void sort_adjacency();

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& r : row_cols_) e += r.size();
        return e;
    }

  private:
    int m_, n_;
    std::vector<std::vector<int>> row_cols_;
    std::vector<std::vector<int>> col_rows_;
};

// Gallager ensemble: dv stacked permuted partitions of the columns into
// rows of weight dc. Deterministic given spec.seed; resamples the
// permutations up to 100 times to avoid 4-cycles, then accepts.
ParityMatrix construct_regular_code(const CodeSpec& spec);

bool syndrome_check(const ParityMatrix& h, std::span<const std::uint8_t> bits);

// True iff no two rows share more than one column.
bool has_four_cycle(const ParityMatrix& h);

// Standard alist text dump (n m, max weights, per-node weights, adjacency).
void write_alist(const ParityMatrix& h, std::ostream& os);

// Systematic encoder derived by GF(2) Gaussian elimination. Message bits
// occupy the non-pivot columns verbatim; pivot columns carry parity.
// Handles rank deficiency: k = n - rank(H).
class SystematicCode {
  public:
    explicit SystematicCode(ParityMatrix h);

    const ParityMatrix& parity() const { return h_; }
    int n() const { return h_.cols(); }
    int k() const { return static_cast<int>(systematic_cols_.size()); }
    int rank() const { return static_cast<int>(pivot_cols_.size()); }

    // message index -> codeword position
    const std::vector<int>& systematic_cols() const { return systematic_cols_; }
    // column permutation [systematic..., pivot...] as a bijection on [0,n)
    const std::vector<int>& column_permutation() const { return column_permutation_; }

    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;

  private:
    ParityMatrix h_;
    std::vector<int> systematic_cols_;
    std::vector<int> pivot_cols_;
    std::vector<std::vector<int>> parity_deps_;  // per pivot: message indices to XOR
    std::vector<int> column_permutation_;
};

// LLR sign convention: positive favors bit 0. Messages and intrinsic
// LLRs are clipped to +-kLlrClip inside the decoder.
inline constexpr double kLlrClip = 50.0;

struct BpResult {
    std::vector<double> posterior_llr;
    std::vector<std::uint8_t> hard_bits;
    bool converged = false;
    int iters_used = 0;
};

// Flooding sum-product decode with tanh-rule check updates. The variable
// intrinsic is channel_llr + apriori_llr; stops early once the hard
// decision satisfies every check.
BpResult bp_decode(const ParityMatrix& h, std::span<const double> channel_llr,
                   std::span<const double> apriori_llr, int max_iters);

}  // namespace semturbo::ldpc

#endif
