#pragma once

#include <utility>
#include <vector>

#include "geometry.hpp"
#include "matrix.hpp"
#include "mesh.hpp"

namespace mgcn {

/// Compressed-row sparse matrix. Column indices within a row are sorted, so
/// construction order never leaks into iteration order.
struct SparseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;  // rows+1 entries
    std::vector<int> col_idx;
    std::vector<double> values;

    int nnz() const { return static_cast<int>(values.size()); }
};

/// y = s * x. Each output entry accumulates its row's terms in descending
/// value order, so the result depends only on the multiset of terms and node
/// relabeling cannot perturb it.
Matrix spmm(const SparseMatrix& s, const Matrix& x);

/// x_grad += s^T * y_grad, accumulated by scatter.
void spmm_transpose_accumulate(const SparseMatrix& s, const Matrix& y_grad, Matrix& x_grad);

enum class AggregationKind {
    symmetric_normalized,  // D^{-1/2} (A + I) D^{-1/2}, the default
    neighbor_sum,          // literal unnormalized neighbor sum, no self loop
};

/// Aggregation weights for an undirected graph given as sorted unique (i,j)
/// pairs with i < j.
SparseMatrix aggregation_operator(int nodes, const std::vector<std::pair<int, int>>& edges,
                                  AggregationKind kind);

/// Face-adjacency graph of one mesh: one node per face, one undirected edge
/// per interior mesh edge, node features attached by face index.
struct FaceGraph {
    int nodes = 0;
    std::vector<std::pair<int, int>> edges;  // sorted, i < j
    Matrix features;                         // nodes x width
    SparseMatrix op;
    int label = -1;                // classification target, -1 when unused
    std::vector<int> node_labels;  // segmentation targets, empty when unused
};

FaceGraph mesh_to_graph(const Mesh& mesh, const EdgeTable& edges, const NodeFeatures& features,
                        AggregationKind kind = AggregationKind::symmetric_normalized);

/// Block-diagonal composition of graphs: concatenated features, combined
/// operator, and per-graph [begin, end) node ranges.
struct GraphBatch {
    Matrix features;
    SparseMatrix op;
    std::vector<std::pair<int, int>> ranges;
    std::vector<int> graph_labels;
    std::vector<int> node_labels;

    int graph_count() const { return static_cast<int>(ranges.size()); }
    int node_count() const { return features.rows(); }
};

GraphBatch batch_graphs(const std::vector<const FaceGraph*>& graphs);

/// Extracts one graph's feature rows back out of a batch.
Matrix unbatch_features(const GraphBatch& batch, int graph_index);

}  // namespace mgcn
