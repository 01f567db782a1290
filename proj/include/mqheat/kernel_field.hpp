#pragma once
// Grid-sampled kernel: a degree-diagonal fiber block per (i, j) pair within
// the Gaussian cutoff, held as six structure-of-arrays planes
// {s, m11, m12, m21, m22, tau}. Two storage modes share the planes:
// CSR (row_ptr/col_idx) after assembly, dense row-major (implicit columns)
// for composition chains.

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "mqheat/fiber_kernel.hpp"
#include "mqheat/form_field.hpp"
#include "mqheat/grid.hpp"

namespace mqheat {

class KernelField {
public:
    std::shared_ptr<const QuadratureGrid> grid;
    double t = 0.0;               // accumulated time
    double support_radius = 0.0;  // blocks vanish beyond this distance
    bool under_resolved = false;  // grid spacing too coarse for sqrt(t)

    bool dense = false;
    std::vector<int> row_ptr;   // CSR mode only
    std::vector<int> col_idx;   // CSR mode only
    std::array<std::vector<double>, 6> plane;  // s,m11,m12,m21,m22,tau

    int points() const { return grid ? grid->size() : 0; }
    std::size_t stored_blocks() const { return plane[0].size(); }

    // Block lookup (zero when not stored); linear scan in CSR rows, O(1)
    // dense. Intended for tests and diagnostics, not hot paths.
    DegreeBlocks block_at(int i, int j) const;
    double supertrace_at(int i) const {
        DegreeBlocks b = block_at(i, i);
        return b.s - b.m.a00 - b.m.a11 + b.tau;
    }
};

// Per-segment kernel on the grid: blocks for all pairs with
// d < min(cutoff * sqrt(t), injectivity radius).
KernelField assemble_kernel_field(std::shared_ptr<const QuadratureGrid> grid,
                                  double t, const KernelOptions& opts = {},
                                  int workers = 0);

// Copy into dense storage (no-op when already dense).
KernelField densify(const KernelField& k);

// ops3[i][k] = sum_j w_j ops1[i][j] ops2[j][k]; t3 = t1 + t2. The right
// factor is densified internally; output is dense.
KernelField compose(const KernelField& k1, const KernelField& k2,
                    int workers = 0);

// out[i] = sum_j w_j ops[i][j] alpha[j].
FormField apply(const KernelField& k, const FormField& alpha, int workers = 0);

// Adjoint action sum_i w_i ops[i][j]^T alpha[i], used by the
// delta-convergence check (integration over the first argument).
FormField apply_transpose(const KernelField& k, const FormField& alpha,
                          int workers = 0);

// Simple binary container (magic, grid hash, t, storage mode, planes) for
// checkpointing long compositions.
void save_kernel_field(const KernelField& k, const std::string& path);
KernelField load_kernel_field(std::shared_ptr<const QuadratureGrid> grid,
                              const std::string& path);

}  // namespace mqheat
