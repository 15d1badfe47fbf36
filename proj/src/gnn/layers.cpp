#include "flowguard/gnn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flowguard/errors.hpp"

namespace flowguard::gnn {

namespace {

void expect_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols)
    throw ShapeError(std::string(what) + " is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
}

void expect_nodes(const MessageGraph& g, const Matrix& h) {
  if (static_cast<std::size_t>(h.rows()) != g.num_nodes)
    throw ShapeError("feature matrix has " + std::to_string(h.rows()) + " rows for " + std::to_string(g.num_nodes) +
                     " nodes");
}

Matrix relu(const Matrix& z) { return z.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& d_out, const Matrix& pre) {
  return d_out.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
}

double gcn_coef(const MessageGraph& g, std::uint32_t u, std::uint32_t v) {
  return 1.0 / std::sqrt((g.out_degree[u] + 1.0) * (g.in_degree[v] + 1.0));
}

// out[v] = c_self(v) h[v] + sum_{k: u -> v} c_k h[u]
Matrix gcn_propagate(const MessageGraph& g, const Matrix& h) {
  Matrix out(h.rows(), h.cols());
  for (std::uint32_t v = 0; v < g.num_nodes; ++v) out.row(v) = gcn_coef(g, v, v) * h.row(v);
  for (std::size_t k = 0; k < g.num_messages(); ++k)
    out.row(g.dst[k]) += gcn_coef(g, g.src[k], g.dst[k]) * h.row(g.src[k]);
  return out;
}

Matrix gcn_propagate_transpose(const MessageGraph& g, const Matrix& d) {
  Matrix out(d.rows(), d.cols());
  for (std::uint32_t v = 0; v < g.num_nodes; ++v) out.row(v) = gcn_coef(g, v, v) * d.row(v);
  for (std::size_t k = 0; k < g.num_messages(); ++k)
    out.row(g.src[k]) += gcn_coef(g, g.src[k], g.dst[k]) * d.row(g.dst[k]);
  return out;
}

Matrix neighbour_sum(const MessageGraph& g, const Matrix& h) {
  Matrix out = Matrix::Zero(h.rows(), h.cols());
  for (std::size_t k = 0; k < g.num_messages(); ++k) out.row(g.dst[k]) += h.row(g.src[k]);
  return out;
}

Matrix neighbour_sum_transpose(const MessageGraph& g, const Matrix& d) {
  Matrix out = Matrix::Zero(d.rows(), d.cols());
  for (std::size_t k = 0; k < g.num_messages(); ++k) out.row(g.src[k]) += d.row(g.dst[k]);
  return out;
}

Matrix neighbour_mean(const MessageGraph& g, const Matrix& h) {
  Matrix out = neighbour_sum(g, h);
  for (std::uint32_t v = 0; v < g.num_nodes; ++v)
    if (g.in_degree[v] > 0) out.row(v) /= static_cast<double>(g.in_degree[v]);
  return out;
}

Matrix neighbour_mean_transpose(const MessageGraph& g, const Matrix& d) {
  Matrix scaled = d;
  for (std::uint32_t v = 0; v < g.num_nodes; ++v)
    if (g.in_degree[v] > 0) scaled.row(v) /= static_cast<double>(g.in_degree[v]);
  return neighbour_sum_transpose(g, scaled);
}

// Slots into v: CSR messages first, then the self loop.
std::size_t slot_begin(const MessageGraph& g, std::uint32_t v) { return g.in_offset[v] + v; }
std::size_t slot_end(const MessageGraph& g, std::uint32_t v) { return g.in_offset[v + 1] + v + 1; }

std::uint32_t slot_source(const MessageGraph& g, std::uint32_t v, std::size_t slot) {
  const std::size_t pos = slot - v;  // CSR position for message slots
  return slot + 1 == slot_end(g, v) ? v : g.src[g.in_index[pos]];
}

Matrix gat_forward(const MessageGraph& g, const Matrix& h, const Matrix& w, const Matrix& attn_src,
                   const Matrix& attn_dst, double slope, LayerCache& c) {
  c.projected = h * w;
  const Eigen::VectorXd s = c.projected * attn_src.transpose();
  const Eigen::VectorXd t = c.projected * attn_dst.transpose();
  const std::size_t slots = g.num_messages() + g.num_nodes;
  c.attn_pre.assign(slots, 0.0);
  c.attn.assign(slots, 0.0);

  Matrix out = Matrix::Zero(h.rows(), w.cols());
  for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
    const auto b = slot_begin(g, v), e = slot_end(g, v);
    double peak = -std::numeric_limits<double>::infinity();
    for (auto k = b; k < e; ++k) {
      const double pre = s(slot_source(g, v, k)) + t(v);
      c.attn_pre[k] = pre;
      peak = std::max(peak, pre > 0 ? pre : slope * pre);
    }
    double total = 0.0;
    for (auto k = b; k < e; ++k) {
      const double pre = c.attn_pre[k];
      c.attn[k] = std::exp((pre > 0 ? pre : slope * pre) - peak);
      total += c.attn[k];
    }
    for (auto k = b; k < e; ++k) {
      c.attn[k] /= total;
      out.row(v) += c.attn[k] * c.projected.row(slot_source(g, v, k));
    }
  }
  return out;
}

}  // namespace

std::vector<ParamShape> layer_param_shapes(LayerKind kind, Eigen::Index in, Eigen::Index out) {
  switch (kind) {
    case LayerKind::dense:
    case LayerKind::gcn:
      return {{"W", in, out, false}, {"b", 1, out, true}};
    case LayerKind::sage:
      return {{"W_self", in, out, false}, {"W_neigh", in, out, false}, {"b", 1, out, true}};
    case LayerKind::gin:
      return {{"W1", in, out, false}, {"b1", 1, out, true}, {"W2", out, out, false}, {"b2", 1, out, true}};
    case LayerKind::gat:
      return {{"W", in, out, false}, {"attn_src", 1, out, false}, {"attn_dst", 1, out, false}};
  }
  return {};
}

Matrix layer_forward(LayerKind kind, const MessageGraph& g, const Matrix& h, std::span<const Matrix> p,
                     bool activate, LayerCache* cache) {
  LayerCache local;
  LayerCache& c = cache ? *cache : local;
  c.input = h;
  c.activated = activate;

  switch (kind) {
    case LayerKind::dense:
      c.pre_activation = (h * p[0]).rowwise() + p[1].row(0);
      break;
    case LayerKind::gcn:
      c.aggregated = gcn_propagate(g, h);
      c.pre_activation = (c.aggregated * p[0]).rowwise() + p[1].row(0);
      break;
    case LayerKind::sage:
      c.aggregated = neighbour_mean(g, h);
      c.pre_activation = ((h * p[0]) + c.aggregated * p[1]).rowwise() + p[2].row(0);
      break;
    case LayerKind::gin:
      c.aggregated = h + neighbour_sum(g, h);
      c.inner_pre = (c.aggregated * p[0]).rowwise() + p[1].row(0);
      c.pre_activation = (relu(c.inner_pre) * p[2]).rowwise() + p[3].row(0);
      break;
    case LayerKind::gat:
      c.pre_activation = gat_forward(g, h, p[0], p[1], p[2], kGatLeakySlope, c);
      break;
  }
  return activate ? relu(c.pre_activation) : c.pre_activation;
}

Matrix layer_backward(LayerKind kind, const MessageGraph& g, const LayerCache& c, const Matrix& d_out,
                      std::span<const Matrix> p, std::span<Matrix> grads) {
  const Matrix dz = c.activated ? relu_backward(d_out, c.pre_activation) : d_out;

  switch (kind) {
    case LayerKind::dense:
      grads[0] += c.input.transpose() * dz;
      grads[1] += dz.colwise().sum();
      return dz * p[0].transpose();

    case LayerKind::gcn: {
      grads[0] += c.aggregated.transpose() * dz;
      grads[1] += dz.colwise().sum();
      return gcn_propagate_transpose(g, dz * p[0].transpose());
    }

    case LayerKind::sage: {
      grads[0] += c.input.transpose() * dz;
      grads[1] += c.aggregated.transpose() * dz;
      grads[2] += dz.colwise().sum();
      Matrix dh = dz * p[0].transpose();
      dh += neighbour_mean_transpose(g, dz * p[1].transpose());
      return dh;
    }

    case LayerKind::gin: {
      const Matrix inner = relu(c.inner_pre);
      grads[2] += inner.transpose() * dz;
      grads[3] += dz.colwise().sum();
      const Matrix d_inner = relu_backward(dz * p[2].transpose(), c.inner_pre);
      grads[0] += c.aggregated.transpose() * d_inner;
      grads[1] += d_inner.colwise().sum();
      const Matrix d_agg = d_inner * p[0].transpose();
      return d_agg + neighbour_sum_transpose(g, d_agg);
    }

    case LayerKind::gat: {
      const Matrix& z = c.projected;
      const Matrix& a_src = p[1];
      const Matrix& a_dst = p[2];
      Matrix dz_proj = Matrix::Zero(z.rows(), z.cols());
      Eigen::VectorXd ds = Eigen::VectorXd::Zero(z.rows());
      Eigen::VectorXd dt = Eigen::VectorXd::Zero(z.rows());
      std::vector<double> d_alpha;
      for (std::uint32_t v = 0; v < g.num_nodes; ++v) {
        const auto b = slot_begin(g, v), e = slot_end(g, v);
        d_alpha.assign(e - b, 0.0);
        double weighted = 0.0;
        for (auto k = b; k < e; ++k) {
          const auto u = slot_source(g, v, k);
          dz_proj.row(u) += c.attn[k] * dz.row(v);
          d_alpha[k - b] = dz.row(v).dot(z.row(u));
          weighted += c.attn[k] * d_alpha[k - b];
        }
        for (auto k = b; k < e; ++k) {
          const double d_score = c.attn[k] * (d_alpha[k - b] - weighted);
          const double d_pre = d_score * (c.attn_pre[k] > 0 ? 1.0 : kGatLeakySlope);
          ds(slot_source(g, v, k)) += d_pre;
          dt(v) += d_pre;
        }
      }
      // s = z a_src^T, t = z a_dst^T
      dz_proj += ds * a_src + dt * a_dst;
      grads[1] += ds.transpose() * z;
      grads[2] += dt.transpose() * z;
      grads[0] += c.input.transpose() * dz_proj;
      return dz_proj * p[0].transpose();
    }
  }
  return {};
}

Matrix dense_layer(const Matrix& h, const Matrix& w, const Matrix& b, bool activate) {
  expect_shape(w, h.cols(), w.cols(), "W");
  expect_shape(b, 1, w.cols(), "b");
  const Matrix params[] = {w, b};
  return layer_forward(LayerKind::dense, MessageGraph{}, h, params, activate, nullptr);
}

Matrix gcn_layer(const MessageGraph& g, const Matrix& h, const Matrix& w, const Matrix& b, bool activate) {
  expect_nodes(g, h);
  expect_shape(w, h.cols(), w.cols(), "W");
  expect_shape(b, 1, w.cols(), "b");
  const Matrix params[] = {w, b};
  return layer_forward(LayerKind::gcn, g, h, params, activate, nullptr);
}

Matrix sage_layer(const MessageGraph& g, const Matrix& h, const Matrix& w_self, const Matrix& w_neigh,
                  const Matrix& b, bool activate) {
  expect_nodes(g, h);
  expect_shape(w_self, h.cols(), w_self.cols(), "W_self");
  expect_shape(w_neigh, h.cols(), w_self.cols(), "W_neigh");
  expect_shape(b, 1, w_self.cols(), "b");
  const Matrix params[] = {w_self, w_neigh, b};
  return layer_forward(LayerKind::sage, g, h, params, activate, nullptr);
}

Matrix gin_layer(const MessageGraph& g, const Matrix& h, const Matrix& w1, const Matrix& b1, const Matrix& w2,
                 const Matrix& b2, bool activate, double eps) {
  expect_nodes(g, h);
  expect_shape(w1, h.cols(), w1.cols(), "W1");
  expect_shape(b1, 1, w1.cols(), "b1");
  expect_shape(w2, w1.cols(), w2.cols(), "W2");
  expect_shape(b2, 1, w2.cols(), "b2");
  const Matrix agg = (1.0 + eps) * h + neighbour_sum(g, h);
  const Matrix inner = relu((agg * w1).rowwise() + b1.row(0));
  const Matrix out = (inner * w2).rowwise() + b2.row(0);
  return activate ? relu(out) : out;
}

Matrix gat_layer(const MessageGraph& g, const Matrix& h, const Matrix& w, const Matrix& attn_src,
                 const Matrix& attn_dst, bool activate, double leaky_slope) {
  expect_nodes(g, h);
  expect_shape(w, h.cols(), w.cols(), "W");
  expect_shape(attn_src, 1, w.cols(), "attn_src");
  expect_shape(attn_dst, 1, w.cols(), "attn_dst");
  LayerCache c;
  const Matrix out = gat_forward(g, h, w, attn_src, attn_dst, leaky_slope, c);
  return activate ? relu(out) : out;
}

RowVector readout_mean(const Matrix& h) {
  if (h.rows() == 0) throw EmptyGraph("readout over zero nodes");
  return h.colwise().mean();
}

}  // namespace flowguard::gnn
