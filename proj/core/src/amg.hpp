// Aggregation-based algebraic multigrid, used as the SPD preconditioner for
// the illumination solver's conjugate gradient. The smoothness weights span
// many orders of magnitude (flat regions get w_flat on top of the RTV
// weights), which plain Jacobi/IC preconditioning cannot absorb; strength-
// based pairwise aggregation collapses the stiff clusters within a few
// levels. Entirely deterministic: fixed visit orders, no hashing.

#ifndef RELIGHT_AMG_HPP
#define RELIGHT_AMG_HPP

#include <vector>

namespace relight::amg {

// Symmetric sparse matrix, CSR with both triangles stored.
struct Csr {
    int n = 0;
    std::vector<int> ptr;
    std::vector<int> col;
    std::vector<double> val;
};

class Preconditioner {
public:
    explicit Preconditioner(Csr A);

    // z = M^-1 r via one symmetric V(1,1)-cycle.
    void apply(const std::vector<double>& r, std::vector<double>& z) const;

private:
    struct Level {
        Csr A;
        std::vector<double> diag;
        std::vector<int> agg; // fine index -> coarse aggregate
        int n_coarse = 0;
    };

    void cycle(size_t level, const std::vector<double>& b, std::vector<double>& x) const;

    std::vector<Level> levels_;
    std::vector<double> chol_;       // dense lower-triangular factor, coarsest level
    int nc_ = 0;
    mutable std::vector<std::vector<double>> work_b_, work_x_, work_r_;
};

} // namespace relight::amg

#endif
