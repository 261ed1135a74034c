#include "graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "error.hpp"

namespace mgcn {

namespace {

// Sums a small term list largest-first. The order is a function of the
// values alone, which keeps aggregation bitwise stable under node
// relabeling. Non-finite terms poison the sum anyway, so they skip the
// sort (NaN comparisons would break the ordering contract).
double sorted_sum(double* terms, int n) {
    bool finite = true;
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(terms[i])) finite = false;
    if (finite) std::sort(terms, terms + n, [](double a, double b) { return a > b; });
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += terms[i];
    return s;
}

}  // namespace

Matrix spmm(const SparseMatrix& s, const Matrix& x) {
    if (s.cols != x.rows()) throw ShapeError("spmm: operator columns do not match feature rows");
    Matrix y(s.rows, x.cols());
    const int width = x.cols();
    std::vector<double> heap_terms;
    for (int i = 0; i < s.rows; ++i) {
        const int begin = s.row_ptr[i];
        const int end = s.row_ptr[i + 1];
        const int n = end - begin;
        if (n == 0) continue;
        double* yi = y.row(i);
        if (n == 1) {
            const double v = s.values[begin];
            const double* xj = x.row(s.col_idx[begin]);
            for (int c = 0; c < width; ++c) yi[c] = v * xj[c];
            continue;
        }
        std::array<double, 16> stack_terms;
        double* terms = stack_terms.data();
        if (n > 16) {
            heap_terms.resize(n);
            terms = heap_terms.data();
        }
        for (int c = 0; c < width; ++c) {
            for (int e = 0; e < n; ++e)
                terms[e] = s.values[begin + e] * x(s.col_idx[begin + e], c);
            yi[c] = sorted_sum(terms, n);
        }
    }
    return y;
}

void spmm_transpose_accumulate(const SparseMatrix& s, const Matrix& y_grad, Matrix& x_grad) {
    if (s.rows != y_grad.rows() || s.cols != x_grad.rows())
        throw ShapeError("spmm_transpose_accumulate: shape mismatch");
    const int width = y_grad.cols();
    for (int i = 0; i < s.rows; ++i) {
        const double* gi = y_grad.row(i);
        for (int e = s.row_ptr[i]; e < s.row_ptr[i + 1]; ++e) {
            double* xj = x_grad.row(s.col_idx[e]);
            const double v = s.values[e];
            for (int c = 0; c < width; ++c) xj[c] += v * gi[c];
        }
    }
}

SparseMatrix aggregation_operator(int nodes, const std::vector<std::pair<int, int>>& edges,
                                  AggregationKind kind) {
    std::vector<std::vector<int>> adj(nodes);
    for (const auto& [i, j] : edges) {
        if (i < 0 || j < 0 || i >= nodes || j >= nodes || i == j)
            throw ShapeError("aggregation_operator: bad edge");
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& nbrs : adj) {
        std::sort(nbrs.begin(), nbrs.end());
        if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end())
            throw ShapeError("aggregation_operator: duplicate edge");
    }

    SparseMatrix s;
    s.rows = nodes;
    s.cols = nodes;
    s.row_ptr.reserve(nodes + 1);
    s.row_ptr.push_back(0);

    if (kind == AggregationKind::symmetric_normalized) {
        // degree of A + I; weight 1/sqrt(d_i * d_j) including the diagonal
        std::vector<double> deg(nodes);
        for (int i = 0; i < nodes; ++i) deg[i] = 1.0 + static_cast<double>(adj[i].size());
        for (int i = 0; i < nodes; ++i) {
            bool self_emitted = false;
            auto emit_self = [&] {
                s.col_idx.push_back(i);
                s.values.push_back(1.0 / deg[i]);
                self_emitted = true;
            };
            for (int j : adj[i]) {
                if (!self_emitted && j > i) emit_self();
                s.col_idx.push_back(j);
                s.values.push_back(1.0 / std::sqrt(deg[i] * deg[j]));
            }
            if (!self_emitted) emit_self();
            s.row_ptr.push_back(static_cast<int>(s.col_idx.size()));
        }
    } else {
        for (int i = 0; i < nodes; ++i) {
            for (int j : adj[i]) {
                s.col_idx.push_back(j);
                s.values.push_back(1.0);
            }
            s.row_ptr.push_back(static_cast<int>(s.col_idx.size()));
        }
    }
    return s;
}

FaceGraph mesh_to_graph(const Mesh& mesh, const EdgeTable& edges, const NodeFeatures& features,
                        AggregationKind kind) {
    if (features.rows != mesh.face_count())
        throw ShapeError("mesh_to_graph: feature rows do not match face count");

    FaceGraph g;
    g.nodes = mesh.face_count();

    std::set<std::pair<int, int>> unique_edges;
    for (const auto& e : edges.edges) {
        if (e.boundary()) continue;
        unique_edges.emplace(std::min(e.f0, e.f1), std::max(e.f0, e.f1));
    }
    g.edges.assign(unique_edges.begin(), unique_edges.end());

    g.features = Matrix(features.rows, features.width);
    std::copy(features.data.begin(), features.data.end(), g.features.data());
    g.op = aggregation_operator(g.nodes, g.edges, kind);
    return g;
}

GraphBatch batch_graphs(const std::vector<const FaceGraph*>& graphs) {
    if (graphs.empty()) throw ShapeError("batch_graphs: empty batch");
    const int width = graphs.front()->features.cols();
    int total = 0;
    int total_nnz = 0;
    for (const auto* g : graphs) {
        if (g->features.cols() != width)
            throw ShapeError("batch_graphs: feature width mismatch (" +
                             std::to_string(g->features.cols()) + " vs " +
                             std::to_string(width) + ")");
        if (g->features.rows() != g->nodes)
            throw ShapeError("batch_graphs: graph feature rows do not match node count");
        total += g->nodes;
        total_nnz += g->op.nnz();
    }

    GraphBatch batch;
    batch.features = Matrix(total, width);
    batch.op.rows = total;
    batch.op.cols = total;
    batch.op.row_ptr.reserve(total + 1);
    batch.op.row_ptr.push_back(0);
    batch.op.col_idx.reserve(total_nnz);
    batch.op.values.reserve(total_nnz);

    int offset = 0;
    for (const auto* g : graphs) {
        batch.ranges.emplace_back(offset, offset + g->nodes);
        for (int r = 0; r < g->nodes; ++r) {
            std::copy(g->features.row(r), g->features.row(r) + width,
                      batch.features.row(offset + r));
            for (int e = g->op.row_ptr[r]; e < g->op.row_ptr[r + 1]; ++e) {
                batch.op.col_idx.push_back(g->op.col_idx[e] + offset);
                batch.op.values.push_back(g->op.values[e]);
            }
            batch.op.row_ptr.push_back(static_cast<int>(batch.op.col_idx.size()));
        }
        if (g->label >= 0) batch.graph_labels.push_back(g->label);
        batch.node_labels.insert(batch.node_labels.end(), g->node_labels.begin(),
                                 g->node_labels.end());
        offset += g->nodes;
    }
    return batch;
}

Matrix unbatch_features(const GraphBatch& batch, int graph_index) {
    const auto& [begin, end] = batch.ranges.at(graph_index);
    Matrix out(end - begin, batch.features.cols());
    for (int r = begin; r < end; ++r)
        std::copy(batch.features.row(r), batch.features.row(r) + batch.features.cols(),
                  out.row(r - begin));
    return out;
}

}  // namespace mgcn
