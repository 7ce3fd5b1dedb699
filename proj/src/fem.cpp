#include "geomflow/fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace gf {

ElementConnectivity curve_connectivity(const PolygonalCurve& c) {
    ElementConnectivity conn;
    const int n = c.size();
    conn.num_nodes = n;
    conn.nodes_per_element = 2;
    conn.element_nodes.reserve(2 * n);
    for (int j = 0; j < n; ++j) {
        conn.element_nodes.push_back(j);
        conn.element_nodes.push_back((j + 1) % n);
    }
    return conn;
}

ElementConnectivity surface_connectivity(const TriSurface& s) {
    ElementConnectivity conn;
    conn.num_nodes = s.vertex_count();
    conn.nodes_per_element = 3;
    conn.element_nodes.reserve(3 * s.triangles.size());
    for (const auto& t : s.triangles) {
        conn.element_nodes.push_back(t[0]);
        conn.element_nodes.push_back(t[1]);
        conn.element_nodes.push_back(t[2]);
    }
    return conn;
}

SparsityPattern::SparsityPattern(const ElementConnectivity& conn) {
    num_nodes_ = conn.num_nodes;
    std::vector<std::vector<int>> adj(num_nodes_);
    const int k = conn.nodes_per_element;
    for (int e = 0; e < conn.num_elements(); ++e) {
        const int* nodes = conn.element(e);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) adj[nodes[a]].push_back(nodes[b]);
    }
    row_ptr_.resize(num_nodes_ + 1, 0);
    for (int i = 0; i < num_nodes_; ++i) {
        auto& row = adj[i];
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        row_ptr_[i + 1] = row_ptr_[i] + static_cast<int>(row.size());
    }
    col_.reserve(row_ptr_.back());
    for (auto& row : adj) col_.insert(col_.end(), row.begin(), row.end());
}

int SparsityPattern::find(int i, int j) const {
    const auto begin = col_.begin() + row_ptr_[i];
    const auto end = col_.begin() + row_ptr_[i + 1];
    const auto it = std::lower_bound(begin, end, j);
    if (it == end || *it != j) return -1;
    return static_cast<int>(it - col_.begin());
}

BlockSparseMatrix::BlockSparseMatrix(std::shared_ptr<const SparsityPattern> pattern, int block_dim)
    : pattern_(std::move(pattern)), d_(block_dim) {
    val_.assign(static_cast<std::size_t>(pattern_->num_blocks()) * d_ * d_, 0.0);
}

void BlockSparseMatrix::set_zero() { std::fill(val_.begin(), val_.end(), 0.0); }

double* BlockSparseMatrix::block(int i, int j) {
    const int slot = pattern_->find(i, j);
    return slot < 0 ? nullptr : val_.data() + static_cast<std::size_t>(slot) * d_ * d_;
}

const double* BlockSparseMatrix::block(int i, int j) const {
    const int slot = pattern_->find(i, j);
    return slot < 0 ? nullptr : val_.data() + static_cast<std::size_t>(slot) * d_ * d_;
}

void BlockSparseMatrix::add_to_block(int i, int j, const double* values, double scale) {
    double* dst = block(i, j);
    if (!dst) fail(ErrorCode::assembly, "block (" + std::to_string(i) + "," + std::to_string(j) + ") outside pattern");
    for (int k = 0; k < d_ * d_; ++k) dst[k] += scale * values[k];
}

void BlockSparseMatrix::matvec(std::span<const double> x, std::span<double> y) const {
    const auto& rp = pattern_->row_ptr();
    const auto& col = pattern_->col();
    const int n = num_nodes();
    std::fill(y.begin(), y.end(), 0.0);
    if (d_ == 3) {
        for (int i = 0; i < n; ++i) {
            double y0 = 0, y1 = 0, y2 = 0;
            for (int s = rp[i]; s < rp[i + 1]; ++s) {
                const double* b = val_.data() + static_cast<std::size_t>(s) * 9;
                const double* xj = x.data() + 3 * col[s];
                y0 += b[0] * xj[0] + b[1] * xj[1] + b[2] * xj[2];
                y1 += b[3] * xj[0] + b[4] * xj[1] + b[5] * xj[2];
                y2 += b[6] * xj[0] + b[7] * xj[1] + b[8] * xj[2];
            }
            y[3 * i] = y0;
            y[3 * i + 1] = y1;
            y[3 * i + 2] = y2;
        }
    } else if (d_ == 2) {
        for (int i = 0; i < n; ++i) {
            double y0 = 0, y1 = 0;
            for (int s = rp[i]; s < rp[i + 1]; ++s) {
                const double* b = val_.data() + static_cast<std::size_t>(s) * 4;
                const double* xj = x.data() + 2 * col[s];
                y0 += b[0] * xj[0] + b[1] * xj[1];
                y1 += b[2] * xj[0] + b[3] * xj[1];
            }
            y[2 * i] = y0;
            y[2 * i + 1] = y1;
        }
    } else {
        for (int i = 0; i < n; ++i) {
            double acc = 0;
            for (int s = rp[i]; s < rp[i + 1]; ++s)
                acc += val_[static_cast<std::size_t>(s)] * x[col[s]];
            y[i] = acc;
        }
    }
}

void BlockSparseMatrix::add_scaled(const BlockSparseMatrix& other, double scale) {
    if (other.pattern_.get() != pattern_.get() || other.d_ != d_)
        fail(ErrorCode::invalid_argument, "add_scaled requires matrices sharing a pattern");
    for (std::size_t k = 0; k < val_.size(); ++k) val_[k] += scale * other.val_[k];
}

void BlockSparseMatrix::scale(double s) {
    for (auto& v : val_) v *= s;
}

double BlockSparseMatrix::max_abs() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
}

double BlockSparseMatrix::max_asymmetry() const {
    const auto& rp = pattern_->row_ptr();
    const auto& col = pattern_->col();
    double m = 0.0;
    for (int i = 0; i < num_nodes(); ++i)
        for (int s = rp[i]; s < rp[i + 1]; ++s) {
            const int j = col[s];
            const double* a = val_.data() + static_cast<std::size_t>(s) * d_ * d_;
            const double* b = block(j, i);
            for (int p = 0; p < d_; ++p)
                for (int q = 0; q < d_; ++q) {
                    const double other = b ? b[q * d_ + p] : 0.0;
                    m = std::max(m, std::abs(a[p * d_ + q] - other));
                }
        }
    return m;
}

DenseMatrix BlockSparseMatrix::to_dense() const {
    DenseMatrix m(dim(), dim());
    const auto& rp = pattern_->row_ptr();
    const auto& col = pattern_->col();
    for (int i = 0; i < num_nodes(); ++i)
        for (int s = rp[i]; s < rp[i + 1]; ++s) {
            const double* b = val_.data() + static_cast<std::size_t>(s) * d_ * d_;
            for (int p = 0; p < d_; ++p)
                for (int q = 0; q < d_; ++q) m(i * d_ + p, col[s] * d_ + q) = b[p * d_ + q];
        }
    return m;
}

void BlockSparseMatrix::export_matrix_market(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot open '" + path + "' for writing");
    const auto& rp = pattern_->row_ptr();
    const auto& col = pattern_->col();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << dim() << " " << dim() << " " << static_cast<long>(pattern_->num_blocks()) * d_ * d_ << "\n";
    char buf[64];
    for (int i = 0; i < num_nodes(); ++i)
        for (int s = rp[i]; s < rp[i + 1]; ++s) {
            const double* b = val_.data() + static_cast<std::size_t>(s) * d_ * d_;
            for (int p = 0; p < d_; ++p)
                for (int q = 0; q < d_; ++q) {
                    std::snprintf(buf, sizeof(buf), "%d %d %.17g\n", i * d_ + p + 1, col[s] * d_ + q + 1,
                                  b[p * d_ + q]);
                    out << buf;
                }
        }
}

void assemble_into(BlockSparseMatrix& matrix, const ElementConnectivity& conn, const ElementKernel& kernel) {
    const int k = conn.nodes_per_element;
    const int d = matrix.block_dim();
    matrix.set_zero();
    DenseMatrix local(k * d, k * d);
    std::vector<double> blockbuf(static_cast<std::size_t>(d) * d);
    for (int e = 0; e < conn.num_elements(); ++e) {
        for (int i = 0; i < k * d; ++i)
            for (int j = 0; j < k * d; ++j) local(i, j) = 0.0;
        kernel(e, local);
        for (int i = 0; i < k * d; ++i)
            for (int j = 0; j < k * d; ++j)
                if (!std::isfinite(local(i, j)))
                    fail(ErrorCode::assembly, "element " + std::to_string(e) + " produced a non-finite entry");
        const int* nodes = conn.element(e);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q) blockbuf[p * d + q] = local(a * d + p, b * d + q);
                matrix.add_to_block(nodes[a], nodes[b], blockbuf.data());
            }
    }
}

BlockSparseMatrix assemble(const ElementConnectivity& conn, int block_dim, const ElementKernel& kernel,
                           std::shared_ptr<const SparsityPattern> pattern) {
    if (!pattern) pattern = std::make_shared<SparsityPattern>(conn);
    BlockSparseMatrix m(std::move(pattern), block_dim);
    assemble_into(m, conn, kernel);
    return m;
}

std::vector<double> lumped_mass_integrals(const PolygonalCurve& c) {
    const int n = c.size();
    std::vector<double> w(n, 0.0);
    for (int j = 0; j < n; ++j) {
        const double half = 0.5 * c.segment_length(j);
        w[j] += half;
        w[(j + 1) % n] += half;
    }
    return w;
}

std::vector<double> lumped_mass_integrals(const TriSurface& s) {
    std::vector<double> w(s.vertex_count(), 0.0);
    for (int t = 0; t < s.triangle_count(); ++t) {
        const double third = triangle_geometry(s, t).area / 3.0;
        for (int k = 0; k < 3; ++k) w[s.triangles[t][k]] += third;
    }
    return w;
}

// ---- solvers ----

namespace {

double dot_v(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm_v(std::span<const double> a) { return std::sqrt(dot_v(a, a)); }

SolveResult solve_cg(const BlockSparseMatrix& A, std::span<const double> b, std::vector<double>& x,
                     const SolverConfig& cfg, int max_it) {
    const int n = A.dim();
    std::vector<double> r(n), p(n), Ap(n);
    A.matvec(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = norm_v(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {true, 0, 0.0};
    }
    double rnorm = norm_v(r);
    if (rnorm <= cfg.rel_tol * bnorm) return {true, 0, rnorm / bnorm};
    p = r;
    double rs = rnorm * rnorm;
    for (int it = 1; it <= max_it; ++it) {
        A.matvec(p, Ap);
        const double pAp = dot_v(p, Ap);
        if (!(pAp > 0.0) || !std::isfinite(pAp)) return {false, it, rnorm / bnorm};
        const double alpha = rs / pAp;
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
        for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
        if (cfg.iterate_observer) cfg.iterate_observer(x);
        const double rs_new = dot_v(r, r);
        rnorm = std::sqrt(rs_new);
        if (rnorm <= cfg.rel_tol * bnorm) return {true, it, rnorm / bnorm};
        const double beta = rs_new / rs;
        rs = rs_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    return {false, max_it, rnorm / bnorm};
}

SolveResult solve_bicgstab(const BlockSparseMatrix& A, std::span<const double> b, std::vector<double>& x,
                           const SolverConfig& cfg, int max_it) {
    const int n = A.dim();
    std::vector<double> r(n), r0(n), p(n), v(n), s(n), t(n);
    A.matvec(x, r);
    for (int i = 0; i < n; ++i) r[i] = b[i] - r[i];
    const double bnorm = norm_v(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return {true, 0, 0.0};
    }
    double rnorm = norm_v(r);
    if (rnorm <= cfg.rel_tol * bnorm) return {true, 0, rnorm / bnorm};
    r0 = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    std::fill(p.begin(), p.end(), 0.0);
    std::fill(v.begin(), v.end(), 0.0);
    for (int it = 1; it <= max_it; ++it) {
        const double rho_new = dot_v(r0, r);
        if (rho_new == 0.0 || !std::isfinite(rho_new)) return {false, it, rnorm / bnorm};
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (int i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        A.matvec(p, v);
        const double r0v = dot_v(r0, v);
        if (r0v == 0.0 || !std::isfinite(r0v)) return {false, it, rnorm / bnorm};
        alpha = rho / r0v;
        for (int i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        const double snorm = norm_v(s);
        if (snorm <= cfg.rel_tol * bnorm) {
            for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
            if (cfg.iterate_observer) cfg.iterate_observer(x);
            return {true, it, snorm / bnorm};
        }
        A.matvec(s, t);
        const double tt = dot_v(t, t);
        if (tt == 0.0 || !std::isfinite(tt)) return {false, it, snorm / bnorm};
        omega = dot_v(t, s) / tt;
        if (omega == 0.0 || !std::isfinite(omega)) return {false, it, snorm / bnorm};
        for (int i = 0; i < n; ++i) x[i] += alpha * p[i] + omega * s[i];
        for (int i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
        if (cfg.iterate_observer) cfg.iterate_observer(x);
        rnorm = norm_v(r);
        if (rnorm <= cfg.rel_tol * bnorm) return {true, it, rnorm / bnorm};
    }
    return {false, max_it, rnorm / bnorm};
}

}  // namespace

std::vector<double> dense_lu_solve(const DenseMatrix& A, std::span<const double> b) {
    const int n = A.rows();
    if (n != A.cols() || n != static_cast<int>(b.size()))
        fail(ErrorCode::invalid_argument, "dense_lu_solve dimension mismatch");
    if (n > 512) fail(ErrorCode::invalid_argument, "dense LU oracle capped at dimension 512");
    DenseMatrix lu = A;
    std::vector<int> piv(n);
    std::vector<double> x(b.begin(), b.end());
    for (int k = 0; k < n; ++k) {
        int pk = k;
        double best = std::abs(lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > best) {
                best = std::abs(lu(i, k));
                pk = i;
            }
        if (!(best > 0.0)) fail(ErrorCode::solver_failure, "dense LU: singular matrix");
        piv[k] = pk;
        if (pk != k) {
            for (int j = 0; j < n; ++j) std::swap(lu(k, j), lu(pk, j));
            std::swap(x[k], x[pk]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            lu(i, k) = f;
            for (int j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            x[i] -= f * x[k];
        }
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int j = i + 1; j < n; ++j) s -= lu(i, j) * x[j];
        x[i] = s / lu(i, i);
    }
    return x;
}

SolveResult solve(const BlockSparseMatrix& A, std::span<const double> b, std::vector<double>& x,
                  const SolverConfig& cfg) {
    const int n = A.dim();
    if (static_cast<int>(b.size()) != n)
        fail(ErrorCode::invalid_argument, "solve: rhs dimension mismatch");
    if (static_cast<int>(x.size()) != n) x.assign(n, 0.0);
    const int max_it = cfg.max_iterations > 0 ? cfg.max_iterations : 10 * n;
    switch (cfg.method) {
        case SolverMethod::cg:
            return solve_cg(A, b, x, cfg, max_it);
        case SolverMethod::bicgstab:
            return solve_bicgstab(A, b, x, cfg, max_it);
        case SolverMethod::dense_lu: {
            x = dense_lu_solve(A.to_dense(), b);
            return {true, 1, 0.0};
        }
    }
    fail(ErrorCode::invalid_argument, "unknown solver method");
}

}  // namespace gf
