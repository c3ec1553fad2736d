#include "amg.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace relight::amg {

namespace {

constexpr int kCoarsestSize = 64;
constexpr int kMaxLevels = 40;
constexpr int kPairingPasses = 2;  // aggregates of up to 4 per level
constexpr int kCycleGamma = 2;     // W-cycle
constexpr double kStrength = 0.25; // relative coupling threshold for pairing

std::vector<double> extract_diag(const Csr& A) {
    std::vector<double> d(A.n, 0.0);
    for (int i = 0; i < A.n; ++i)
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
            if (A.col[k] == i) d[i] = A.val[k];
    return d;
}

// Greedy pairwise matching along the strongest (most negative) off-diagonal.
// Couplings below kStrength times the node's strongest coupling do not form
// pairs; nodes with no eligible unmatched neighbor stay singletons.
std::vector<int> pairwise_aggregate(const Csr& A, int& n_coarse) {
    std::vector<double> strongest(A.n, 0.0);
    for (int i = 0; i < A.n; ++i)
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
            if (A.col[k] != i) strongest[i] = std::max(strongest[i], -A.val[k]);

    std::vector<int> agg(A.n, -1);
    int next = 0;
    for (int i = 0; i < A.n; ++i) {
        if (agg[i] >= 0) continue;
        int best = -1;
        double best_w = 0.0;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) {
            const int j = A.col[k];
            if (j == i || agg[j] >= 0) continue;
            const double w = -A.val[k];
            if (w < kStrength * strongest[i]) continue;
            if (w > best_w) {
                best_w = w;
                best = j;
            }
        }
        agg[i] = next;
        if (best >= 0) agg[best] = next;
        ++next;
    }
    n_coarse = next;
    return agg;
}

// Galerkin coarse matrix with piecewise-constant transfer: A_c(I,J) sums all
// fine entries between aggregates I and J.
Csr coarse_matrix(const Csr& A, const std::vector<int>& agg, int n_coarse) {
    std::vector<std::map<int, double>> rows(n_coarse);
    for (int i = 0; i < A.n; ++i) {
        const int I = agg[i];
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
            rows[I][agg[A.col[k]]] += A.val[k];
    }
    Csr C;
    C.n = n_coarse;
    C.ptr.resize(n_coarse + 1, 0);
    for (int I = 0; I < n_coarse; ++I) C.ptr[I + 1] = C.ptr[I] + static_cast<int>(rows[I].size());
    C.col.reserve(C.ptr[n_coarse]);
    C.val.reserve(C.ptr[n_coarse]);
    for (int I = 0; I < n_coarse; ++I) {
        for (const auto& [J, v] : rows[I]) {
            C.col.push_back(J);
            C.val.push_back(v);
        }
    }
    return C;
}

void spmv(const Csr& A, const std::vector<double>& x, std::vector<double>& y) {
    for (int i = 0; i < A.n; ++i) {
        double acc = 0.0;
        for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k) acc += A.val[k] * x[A.col[k]];
        y[i] = acc;
    }
}

void gauss_seidel(const Csr& A, const std::vector<double>& diag, const std::vector<double>& b,
                  std::vector<double>& x, bool forward) {
    if (forward) {
        for (int i = 0; i < A.n; ++i) {
            double acc = b[i];
            for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
                if (A.col[k] != i) acc -= A.val[k] * x[A.col[k]];
            x[i] = acc / diag[i];
        }
    } else {
        for (int i = A.n; i-- > 0;) {
            double acc = b[i];
            for (int k = A.ptr[i]; k < A.ptr[i + 1]; ++k)
                if (A.col[k] != i) acc -= A.val[k] * x[A.col[k]];
            x[i] = acc / diag[i];
        }
    }
}

} // namespace

Preconditioner::Preconditioner(Csr A) {
    levels_.push_back({std::move(A), {}, {}, 0});
    levels_.back().diag = extract_diag(levels_.back().A);

    while (levels_.back().A.n > kCoarsestSize &&
           static_cast<int>(levels_.size()) < kMaxLevels) {
        Level& fine = levels_.back();
        // Compose kPairingPasses pairwise matchings into one level transfer.
        std::vector<int> agg(fine.A.n);
        for (int i = 0; i < fine.A.n; ++i) agg[i] = i;
        Csr cur = fine.A;
        int n_coarse = fine.A.n;
        for (int pass = 0; pass < kPairingPasses; ++pass) {
            int nc = 0;
            const std::vector<int> pair_agg = pairwise_aggregate(cur, nc);
            if (nc >= cur.n) break;
            for (int i = 0; i < fine.A.n; ++i) agg[i] = pair_agg[agg[i]];
            cur = coarse_matrix(cur, pair_agg, nc);
            n_coarse = nc;
        }
        if (n_coarse >= fine.A.n) break; // no progress; stop coarsening
        fine.agg = std::move(agg);
        fine.n_coarse = n_coarse;
        Level next;
        next.A = std::move(cur);
        next.diag = extract_diag(next.A);
        levels_.push_back(std::move(next));
    }

    // Dense Cholesky of the coarsest level. If coarsening stalled early (a
    // near-diagonal matrix pairs nothing), symmetric GS sweeps stand in for
    // the exact solve instead.
    const Csr& C = levels_.back().A;
    if (C.n <= 4096) {
        nc_ = C.n;
        std::vector<double> dense(static_cast<size_t>(nc_) * nc_, 0.0);
        for (int i = 0; i < nc_; ++i)
            for (int k = C.ptr[i]; k < C.ptr[i + 1]; ++k)
                dense[static_cast<size_t>(i) * nc_ + C.col[k]] = C.val[k];
        chol_.assign(dense.begin(), dense.end());
        for (int j = 0; j < nc_; ++j) {
            double d = chol_[static_cast<size_t>(j) * nc_ + j];
            for (int k = 0; k < j; ++k) {
                const double l = chol_[static_cast<size_t>(j) * nc_ + k];
                d -= l * l;
            }
            d = std::sqrt(std::max(d, 1e-300));
            chol_[static_cast<size_t>(j) * nc_ + j] = d;
            for (int i = j + 1; i < nc_; ++i) {
                double s = chol_[static_cast<size_t>(i) * nc_ + j];
                for (int k = 0; k < j; ++k)
                    s -= chol_[static_cast<size_t>(i) * nc_ + k] *
                         chol_[static_cast<size_t>(j) * nc_ + k];
                chol_[static_cast<size_t>(i) * nc_ + j] = s / d;
            }
        }
    }

    work_b_.resize(levels_.size());
    work_x_.resize(levels_.size());
    work_r_.resize(levels_.size());
    for (size_t l = 0; l < levels_.size(); ++l) {
        work_b_[l].resize(levels_[l].A.n);
        work_x_[l].resize(levels_[l].A.n);
        work_r_[l].resize(levels_[l].A.n);
    }
}

void Preconditioner::cycle(size_t level, const std::vector<double>& b,
                           std::vector<double>& x) const {
    const Level& lv = levels_[level];
    if (level + 1 == levels_.size()) {
        if (nc_ == 0) { // stalled coarsening: symmetric GS sweeps
            std::fill(x.begin(), x.end(), 0.0);
            for (int sweep = 0; sweep < 2; ++sweep) {
                gauss_seidel(lv.A, lv.diag, b, x, /*forward=*/true);
                gauss_seidel(lv.A, lv.diag, b, x, /*forward=*/false);
            }
            return;
        }
        // forward/backward substitution with the dense factor
        std::vector<double>& y = work_r_[level];
        for (int i = 0; i < nc_; ++i) {
            double s = b[i];
            for (int k = 0; k < i; ++k) s -= chol_[static_cast<size_t>(i) * nc_ + k] * y[k];
            y[i] = s / chol_[static_cast<size_t>(i) * nc_ + i];
        }
        for (int i = nc_; i-- > 0;) {
            double s = y[i];
            for (int k = i + 1; k < nc_; ++k) s -= chol_[static_cast<size_t>(k) * nc_ + i] * x[k];
            x[i] = s / chol_[static_cast<size_t>(i) * nc_ + i];
        }
        return;
    }

    std::fill(x.begin(), x.end(), 0.0);
    gauss_seidel(lv.A, lv.diag, b, x, /*forward=*/true);

    std::vector<double>& r = work_r_[level];
    spmv(lv.A, x, r);
    for (int i = 0; i < lv.A.n; ++i) r[i] = b[i] - r[i];

    std::vector<double>& bc = work_b_[level + 1];
    std::vector<double>& xc = work_x_[level + 1];
    std::vector<double> xc_acc(lv.n_coarse, 0.0);
    std::vector<double> rc(lv.n_coarse);
    std::fill(bc.begin(), bc.end(), 0.0);
    for (int i = 0; i < lv.A.n; ++i) bc[lv.agg[i]] += r[i];
    for (int g = 0; g < kCycleGamma; ++g) {
        cycle(level + 1, bc, xc);
        for (int i = 0; i < lv.n_coarse; ++i) xc_acc[i] += xc[i];
        if (g + 1 < kCycleGamma) {
            // residual update for the next coarse sweep
            spmv(levels_[level + 1].A, xc_acc, rc);
            std::vector<double>& bc0 = work_r_[level + 1];
            std::fill(bc0.begin(), bc0.end(), 0.0);
            for (int i = 0; i < lv.A.n; ++i) bc0[lv.agg[i]] += r[i];
            for (int i = 0; i < lv.n_coarse; ++i) bc[i] = bc0[i] - rc[i];
        }
    }
    for (int i = 0; i < lv.A.n; ++i) x[i] += xc_acc[lv.agg[i]];

    gauss_seidel(lv.A, lv.diag, b, x, /*forward=*/false);
}

void Preconditioner::apply(const std::vector<double>& r, std::vector<double>& z) const {
    z.assign(levels_[0].A.n, 0.0);
    cycle(0, r, z);
}

} // namespace relight::amg
