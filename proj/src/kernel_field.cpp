#include "mqheat/kernel_field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <stdexcept>

#include "mqheat/parallel.hpp"
#include "mqheat/simd_kernels.hpp"

namespace mqheat {

DegreeBlocks KernelField::block_at(int i, int j) const {
    DegreeBlocks b;
    std::size_t idx;
    if (dense) {
        idx = std::size_t(i) * points() + j;
    } else {
        int lo = row_ptr[i], hi = row_ptr[i + 1];
        int found = -1;
        for (int p = lo; p < hi; ++p)
            if (col_idx[p] == j) {
                found = p;
                break;
            }
        if (found < 0) return b;
        idx = std::size_t(found);
    }
    b.s = plane[0][idx];
    b.m = Mat2{plane[1][idx], plane[2][idx], plane[3][idx], plane[4][idx]};
    b.tau = plane[5][idx];
    return b;
}

KernelField assemble_kernel_field(std::shared_ptr<const QuadratureGrid> grid,
                                  double t, const KernelOptions& opts,
                                  int workers) {
    if (t <= 0.0) throw std::invalid_argument("assemble_kernel_field: t <= 0");
    opts.validate();
    if (workers <= 0) workers = default_workers();

    const int n = grid->size();
    const double inj = grid->model->injectivity_radius();
    const double radius = std::min(opts.gaussian_cutoff * std::sqrt(t), inj);

    KernelField out;
    out.grid = grid;
    out.t = t;
    out.support_radius = radius;
    out.under_resolved =
        grid->max_spacing() > std::sqrt(t) * opts.gaussian_cutoff / 4.0;
    out.row_ptr.assign(n + 1, 0);

    // Pass 1: count neighbors per row.
    std::vector<int> counts(n, 0);
    parallel_ranges(n, workers, [&](int b, int e) {
        for (int i = b; i < e; ++i) {
            int c = 0;
            for (int j = 0; j < n; ++j)
                if (grid_pair_distance(*grid, i, j) < radius) ++c;
            counts[i] = c;
        }
    });
    for (int i = 0; i < n; ++i) out.row_ptr[i + 1] = out.row_ptr[i] + counts[i];
    const std::size_t nnz = out.row_ptr[n];
    out.col_idx.resize(nnz);
    for (auto& p : out.plane) p.assign(nnz, 0.0);

    // Pass 2: fill blocks.
    parallel_ranges(n, workers, [&](int b, int e) {
        PairGeometry pg;
        for (int i = b; i < e; ++i) {
            std::size_t pos = out.row_ptr[i];
            for (int j = 0; j < n; ++j) {
                if (grid_pair_distance(*grid, i, j) >= radius) continue;
                DegreeBlocks blk;
                if (grid_pair_geometry(*grid, i, j, &pg))
                    blk = mq_block_2d(pg, grid->gauss_k[i], t, opts, inj);
                out.col_idx[pos] = j;
                out.plane[0][pos] = blk.s;
                out.plane[1][pos] = blk.m.a00;
                out.plane[2][pos] = blk.m.a01;
                out.plane[3][pos] = blk.m.a10;
                out.plane[4][pos] = blk.m.a11;
                out.plane[5][pos] = blk.tau;
                ++pos;
            }
        }
    });
    return out;
}

KernelField densify(const KernelField& k) {
    if (k.dense) return k;
    const int n = k.points();
    KernelField out;
    out.grid = k.grid;
    out.t = k.t;
    out.support_radius = k.support_radius;
    out.under_resolved = k.under_resolved;
    out.dense = true;
    for (auto& p : out.plane) p.assign(std::size_t(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int p = k.row_ptr[i]; p < k.row_ptr[i + 1]; ++p) {
            std::size_t idx = std::size_t(i) * n + k.col_idx[p];
            for (int d = 0; d < 6; ++d) out.plane[d][idx] = k.plane[d][p];
        }
    return out;
}

namespace {

void require_same_grid(const KernelField& a, const KernelField& b) {
    if (a.grid.get() != b.grid.get() &&
        (!a.grid || !b.grid || a.grid->hash() != b.grid->hash()))
        throw std::invalid_argument("kernel fields live on different grids");
}

}  // namespace

KernelField compose(const KernelField& k1, const KernelField& k2, int workers) {
    require_same_grid(k1, k2);
    if (workers <= 0) workers = default_workers();
    const int n = k1.points();
    const KernelField b = densify(k2);

    KernelField out;
    out.grid = k1.grid;
    out.t = k1.t + k2.t;
    out.support_radius = k1.support_radius + k2.support_radius;
    out.under_resolved = k1.under_resolved || k2.under_resolved;
    out.dense = true;
    for (auto& p : out.plane) p.assign(std::size_t(n) * n, 0.0);

    const auto step = kernels::compose_row_step();
    const std::vector<double>& w = k1.grid->weights;

    parallel_ranges(n, workers, [&](int rb, int re) {
        for (int i = rb; i < re; ++i) {
            kernels::MutPlaneRefs acc{
                out.plane[0].data() + std::size_t(i) * n,
                out.plane[1].data() + std::size_t(i) * n,
                out.plane[2].data() + std::size_t(i) * n,
                out.plane[3].data() + std::size_t(i) * n,
                out.plane[4].data() + std::size_t(i) * n,
                out.plane[5].data() + std::size_t(i) * n};
            auto feed = [&](int j, std::size_t idx) {
                double wj = w[j];
                kernels::BlockCoeffs a{k1.plane[0][idx] * wj, k1.plane[1][idx] * wj,
                                       k1.plane[2][idx] * wj, k1.plane[3][idx] * wj,
                                       k1.plane[4][idx] * wj, k1.plane[5][idx] * wj};
                if (a.s == 0.0 && a.m11 == 0.0 && a.m12 == 0.0 && a.m21 == 0.0 &&
                    a.m22 == 0.0 && a.tau == 0.0)
                    return;
                kernels::PlaneRefs brow{
                    b.plane[0].data() + std::size_t(j) * n,
                    b.plane[1].data() + std::size_t(j) * n,
                    b.plane[2].data() + std::size_t(j) * n,
                    b.plane[3].data() + std::size_t(j) * n,
                    b.plane[4].data() + std::size_t(j) * n,
                    b.plane[5].data() + std::size_t(j) * n};
                step(a, brow, acc, n);
            };
            if (k1.dense) {
                for (int j = 0; j < n; ++j) feed(j, std::size_t(i) * n + j);
            } else {
                for (int p = k1.row_ptr[i]; p < k1.row_ptr[i + 1]; ++p)
                    feed(k1.col_idx[p], std::size_t(p));
            }
        }
    });
    return out;
}

FormField apply(const KernelField& k, const FormField& alpha, int workers) {
    if (k.grid.get() != alpha.grid.get() &&
        (!k.grid || !alpha.grid || k.grid->hash() != alpha.grid->hash()))
        throw std::invalid_argument("apply: grid mismatch");
    if (workers <= 0) workers = default_workers();
    const int n = k.points();
    FormField out(k.grid);
    const std::vector<double>& w = k.grid->weights;
    const auto dot = kernels::apply_row();

    if (k.dense) {
        parallel_ranges(n, workers, [&](int rb, int re) {
            for (int i = rb; i < re; ++i) {
                double o[4] = {0, 0, 0, 0};
                std::size_t off = std::size_t(i) * n;
                kernels::PlaneRefs brow{
                    k.plane[0].data() + off, k.plane[1].data() + off,
                    k.plane[2].data() + off, k.plane[3].data() + off,
                    k.plane[4].data() + off, k.plane[5].data() + off};
                dot(brow, w.data(), alpha.comp[0].data(), alpha.comp[1].data(),
                    alpha.comp[2].data(), alpha.comp[3].data(), n, o);
                for (int d = 0; d < 4; ++d) out.comp[d][i] = o[d];
            }
        });
        return out;
    }
    parallel_ranges(n, workers, [&](int rb, int re) {
        for (int i = rb; i < re; ++i) {
            double o0 = 0, o1 = 0, o2 = 0, o3 = 0;
            for (int p = k.row_ptr[i]; p < k.row_ptr[i + 1]; ++p) {
                int j = k.col_idx[p];
                double wj = w[j];
                double x0 = alpha.comp[0][j], x1 = alpha.comp[1][j];
                double x2 = alpha.comp[2][j], x3 = alpha.comp[3][j];
                o0 += wj * k.plane[0][p] * x0;
                o1 += wj * (k.plane[1][p] * x1 + k.plane[2][p] * x2);
                o2 += wj * (k.plane[3][p] * x1 + k.plane[4][p] * x2);
                o3 += wj * k.plane[5][p] * x3;
            }
            out.comp[0][i] = o0;
            out.comp[1][i] = o1;
            out.comp[2][i] = o2;
            out.comp[3][i] = o3;
        }
    });
    return out;
}

FormField apply_transpose(const KernelField& k, const FormField& alpha,
                          int workers) {
    if (k.grid.get() != alpha.grid.get())
        throw std::invalid_argument("apply_transpose: grid mismatch");
    (void)workers;  // accumulation over rows is inherently serial per column
    const int n = k.points();
    FormField out(k.grid);
    const std::vector<double>& w = k.grid->weights;
    auto accum = [&](int i, int j, std::size_t idx) {
        double wi = w[i];
        double x0 = alpha.comp[0][i], x1 = alpha.comp[1][i];
        double x2 = alpha.comp[2][i], x3 = alpha.comp[3][i];
        // transpose of the degree-diagonal block
        out.comp[0][j] += wi * k.plane[0][idx] * x0;
        out.comp[1][j] += wi * (k.plane[1][idx] * x1 + k.plane[3][idx] * x2);
        out.comp[2][j] += wi * (k.plane[2][idx] * x1 + k.plane[4][idx] * x2);
        out.comp[3][j] += wi * k.plane[5][idx] * x3;
    };
    if (k.dense) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) accum(i, j, std::size_t(i) * n + j);
    } else {
        for (int i = 0; i < n; ++i)
            for (int p = k.row_ptr[i]; p < k.row_ptr[i + 1]; ++p)
                accum(i, k.col_idx[p], std::size_t(p));
    }
    return out;
}

// --- serialization -----------------------------------------------------------

namespace {
constexpr char kMagic[8] = {'M', 'Q', 'K', 'F', '0', '1', '\n', '\0'};

template <typename T>
void write_raw(std::FILE* f, const T& v) {
    if (std::fwrite(&v, sizeof(T), 1, f) != 1)
        throw std::runtime_error("kernel field write failed");
}
template <typename T>
void read_raw(std::FILE* f, T* v) {
    if (std::fread(v, sizeof(T), 1, f) != 1)
        throw std::runtime_error("kernel field read failed");
}
}  // namespace

void save_kernel_field(const KernelField& k, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::fwrite(kMagic, sizeof(kMagic), 1, f);
    write_raw(f, k.grid->hash());
    write_raw(f, k.t);
    write_raw(f, k.support_radius);
    std::uint8_t flags = (k.dense ? 1 : 0) | (k.under_resolved ? 2 : 0);
    write_raw(f, flags);
    std::int64_t n = k.points(), nnz = std::int64_t(k.stored_blocks());
    write_raw(f, n);
    write_raw(f, nnz);
    if (!k.dense) {
        std::fwrite(k.row_ptr.data(), sizeof(int), k.row_ptr.size(), f);
        std::fwrite(k.col_idx.data(), sizeof(int), k.col_idx.size(), f);
    }
    for (const auto& p : k.plane)
        std::fwrite(p.data(), sizeof(double), p.size(), f);
    std::fclose(f);
}

KernelField load_kernel_field(std::shared_ptr<const QuadratureGrid> grid,
                              const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open " + path);
    char magic[8];
    if (std::fread(magic, sizeof(magic), 1, f) != 1 ||
        std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
        std::fclose(f);
        throw std::runtime_error("not a kernel field file: " + path);
    }
    KernelField k;
    k.grid = grid;
    std::uint64_t h;
    read_raw(f, &h);
    if (h != grid->hash()) {
        std::fclose(f);
        throw std::runtime_error("kernel field grid hash mismatch");
    }
    read_raw(f, &k.t);
    read_raw(f, &k.support_radius);
    std::uint8_t flags;
    read_raw(f, &flags);
    k.dense = flags & 1;
    k.under_resolved = flags & 2;
    std::int64_t n, nnz;
    read_raw(f, &n);
    read_raw(f, &nnz);
    if (n != grid->size()) {
        std::fclose(f);
        throw std::runtime_error("kernel field size mismatch");
    }
    if (!k.dense) {
        k.row_ptr.resize(n + 1);
        k.col_idx.resize(nnz);
        if (std::fread(k.row_ptr.data(), sizeof(int), k.row_ptr.size(), f) !=
                k.row_ptr.size() ||
            std::fread(k.col_idx.data(), sizeof(int), k.col_idx.size(), f) !=
                k.col_idx.size()) {
            std::fclose(f);
            throw std::runtime_error("kernel field read failed");
        }
    }
    for (auto& p : k.plane) {
        p.resize(nnz);
        if (std::fread(p.data(), sizeof(double), p.size(), f) != p.size()) {
            std::fclose(f);
            throw std::runtime_error("kernel field read failed");
        }
    }
    std::fclose(f);
    return k;
}

}  // namespace mqheat
