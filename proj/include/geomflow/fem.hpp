#pragma once

// Block sparse matrix assembly from element kernels, iterative solvers and a
// dense direct-solve oracle.

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geomflow/error.hpp"
#include "geomflow/mesh.hpp"

namespace gf {

// Dense row-major matrix. Used for element matrices and the LU oracle.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), v_(static_cast<std::size_t>(rows) * cols, 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double operator()(int i, int j) const { return v_[static_cast<std::size_t>(i) * cols_ + j]; }
    double& operator()(int i, int j) { return v_[static_cast<std::size_t>(i) * cols_ + j]; }
    const double* data() const { return v_.data(); }
    double* data() { return v_.data(); }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> v_;
};

// Node connectivity of a mesh: elements as flat lists of node indices.
struct ElementConnectivity {
    int num_nodes = 0;
    int nodes_per_element = 0;
    std::vector<int> element_nodes;

    int num_elements() const {
        return nodes_per_element ? static_cast<int>(element_nodes.size()) / nodes_per_element : 0;
    }
    const int* element(int e) const { return element_nodes.data() + static_cast<std::size_t>(e) * nodes_per_element; }
};

ElementConnectivity curve_connectivity(const PolygonalCurve& c);
ElementConnectivity surface_connectivity(const TriSurface& s);

// Node-level CSR sparsity confined to mesh adjacency; shared across the
// matrices of one time step and across steps (connectivity never changes).
class SparsityPattern {
  public:
    SparsityPattern() = default;
    explicit SparsityPattern(const ElementConnectivity& conn);

    int num_nodes() const { return num_nodes_; }
    int num_blocks() const { return static_cast<int>(col_.size()); }
    const std::vector<int>& row_ptr() const { return row_ptr_; }
    const std::vector<int>& col() const { return col_; }
    // Index of block (i,j) in the value array; -1 if outside the pattern.
    int find(int i, int j) const;

  private:
    int num_nodes_ = 0;
    std::vector<int> row_ptr_, col_;
};

// (d*N) x (d*N) sparse operator stored as d x d blocks over a node-level CSR
// pattern.
class BlockSparseMatrix {
  public:
    BlockSparseMatrix() = default;
    BlockSparseMatrix(std::shared_ptr<const SparsityPattern> pattern, int block_dim);

    int block_dim() const { return d_; }
    int num_nodes() const { return pattern_ ? pattern_->num_nodes() : 0; }
    int dim() const { return d_ * num_nodes(); }
    const SparsityPattern& pattern() const { return *pattern_; }
    std::shared_ptr<const SparsityPattern> pattern_ptr() const { return pattern_; }

    void set_zero();
    // Pointer to the d*d block (i,j), row-major; nullptr outside the pattern.
    double* block(int i, int j);
    const double* block(int i, int j) const;
    void add_to_block(int i, int j, const double* values, double scale = 1.0);

    void matvec(std::span<const double> x, std::span<double> y) const;
    void add_scaled(const BlockSparseMatrix& other, double scale);  // same pattern required
    void scale(double s);

    double max_abs() const;
    double max_asymmetry() const;  // max |A - A^T| entry
    DenseMatrix to_dense() const;
    void export_matrix_market(const std::string& path) const;

  private:
    std::shared_ptr<const SparsityPattern> pattern_;
    int d_ = 0;
    std::vector<double> val_;  // num_blocks * d * d
};

// Per-element kernel: fills a (k*d) x (k*d) matrix for element e; entry
// ((a,beta),(b,gamma)) sits at (a*d+beta, b*d+gamma).
using ElementKernel = std::function<void(int element, DenseMatrix& out)>;

// Sum of scattered element matrices, elements visited in index order.
// Throws Error(assembly) if a kernel produces a non-finite entry.
BlockSparseMatrix assemble(const ElementConnectivity& conn, int block_dim, const ElementKernel& kernel,
                           std::shared_ptr<const SparsityPattern> pattern = nullptr);
// Re-assembles into an existing matrix (pattern reuse across time steps).
void assemble_into(BlockSparseMatrix& matrix, const ElementConnectivity& conn, const ElementKernel& kernel);

// weight(p_j) = sum over incident elements of |T| / (nodes per element),
// where |T| is the segment length (curves) or triangle area (surfaces).
std::vector<double> lumped_mass_integrals(const PolygonalCurve& c);
std::vector<double> lumped_mass_integrals(const TriSurface& s);

// ---- solvers ----

enum class SolverMethod { cg, bicgstab, dense_lu };

struct SolverConfig {
    SolverMethod method = SolverMethod::cg;
    double rel_tol = 1e-10;
    int max_iterations = 0;  // 0 selects 10 * dim
    // Test hook: observes the iterate after every update.
    std::function<void(std::span<const double>)> iterate_observer;

    SolverConfig() = default;
    explicit SolverConfig(SolverMethod m, double tol = 1e-10) : method(m), rel_tol(tol) {}
};

struct SolveResult {
    bool converged = false;
    int iterations = 0;
    double rel_residual = 0.0;
};

// Solves A x = b; x carries the initial guess on input. Returns convergence
// info instead of throwing: non-convergence is an expected outcome.
SolveResult solve(const BlockSparseMatrix& A, std::span<const double> b, std::vector<double>& x,
                  const SolverConfig& cfg);

// Dense LU with partial pivoting. Throws Error(solver_failure) on a
// vanishing pivot. Oracle only; dimension capped at 512.
std::vector<double> dense_lu_solve(const DenseMatrix& A, std::span<const double> b);

}  // namespace gf
