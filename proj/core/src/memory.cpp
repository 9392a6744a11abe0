#include "memheat/memory.hpp"

#include "memheat/error.hpp"

#include <algorithm>
#include <cmath>

namespace memheat {

HistoryBuffer::HistoryBuffer(const Mesh& mesh, int components)
    : mesh_(mesh),
      components_(components),
      node_dofs_(mesh.node_count() * static_cast<std::size_t>(components)),
      edge_dofs_(mesh.edge_count() * static_cast<std::size_t>(components)) {}

void HistoryBuffer::push(double t, const Field& u) {
  if (!(u.mesh == mesh_) || u.components != components_) {
    throw Error(ErrorKind::ShapeMismatch, "snapshot does not match the history layout");
  }
  if (!times_.empty() && !(t > times_.back())) {
    throw Error(ErrorKind::NonMonotoneTime, "stamp " + std::to_string(t) +
                                                " does not follow " + std::to_string(times_.back()));
  }
  times_.push_back(t);
  const std::size_t lap_off = lap_.size();
  lap_.resize(lap_off + node_dofs_);
  apply_laplacian(mesh_, components_, u.values, std::span<double>(lap_).subspan(lap_off, node_dofs_));
  const std::size_t grad_off = grad_.size();
  grad_.resize(grad_off + edge_dofs_);
  auto g = std::span<double>(grad_).subspan(grad_off, edge_dofs_);
  edge_gradients(mesh_, components_, u.values, g);
  grad_sq_.push_back(edge_sq_norm(mesh_, g));
}

std::span<const double> HistoryBuffer::laplacian(std::size_t j) const {
  return std::span<const double>(lap_).subspan((j - base_) * node_dofs_, node_dofs_);
}

std::span<const double> HistoryBuffer::gradient(std::size_t j) const {
  return std::span<const double>(grad_).subspan((j - base_) * edge_dofs_, edge_dofs_);
}

void HistoryBuffer::release_before(std::size_t j) {
  j = std::min(j, times_.size());
  if (j <= base_) return;
  const std::size_t drop = j - base_;
  lap_.erase(lap_.begin(), lap_.begin() + static_cast<std::ptrdiff_t>(drop * node_dofs_));
  grad_.erase(grad_.begin(), grad_.begin() + static_cast<std::ptrdiff_t>(drop * edge_dofs_));
  base_ = j;
}

namespace {

// Visits the history intervals [first, n): interval j runs from s_j to
// s_{j+1} (to t for the last one). fn(j, length, age_of_midpoint).
template <class Fn>
void for_each_interval(const HistoryBuffer& h, std::size_t first, double t, Fn&& fn) {
  const std::size_t n = h.size();
  for (std::size_t j = first; j < n; ++j) {
    const double left = h.time(j);
    const double right = j + 1 < n ? h.time(j + 1) : t;
    const double len = right - left;
    if (len <= 0.0) continue;
    fn(j, len, t - 0.5 * (left + right));
  }
}

void direct_convolution(const HistoryBuffer& h, const RelaxationKernel& kernel, std::size_t first,
                        double t, std::span<double> out) {
  const std::size_t nd = h.node_dofs();
  for_each_interval(h, first, t, [&](std::size_t j, double len, double age) {
    const double w = kernel.value(age) * len;
    const auto lap = h.laplacian(j);
    for (std::size_t i = 0; i < nd; ++i) out[i] += w * lap[i];
  });
}

MemoryModuli direct_moduli(const HistoryBuffer& h, const RelaxationKernel& kernel, std::size_t first,
                           double t, std::span<const double> current) {
  const std::size_t ne = h.edge_dofs();
  const double vol = h.mesh().cell_volume();
  MemoryModuli m;
  for_each_interval(h, first, t, [&](std::size_t j, double len, double age) {
    const auto past = h.gradient(j);
    double d = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      const double diff = current[e] - past[e];
      d += diff * diff;
    }
    d *= vol * len;
    const auto [g, dg] = kernel.value_and_derivative(age);
    m.g_circ += g * d;
    m.g_prime_circ += dg * d;
  });
  return m;
}

void check_time(const HistoryBuffer& h, double t) {
  if (!h.empty() && t < h.last_time()) {
    throw Error(ErrorKind::NonMonotoneTime, "evaluation time precedes the last stamp");
  }
}

}  // namespace

Field memory_convolution(const HistoryBuffer& buffer, const RelaxationKernel& kernel, double t) {
  check_time(buffer, t);
  Field out(buffer.mesh(), buffer.components());
  if (buffer.empty()) return out;
  direct_convolution(buffer, kernel, buffer.first_retained(), t, out.values);
  return out;
}

double g_circ_grad(const HistoryBuffer& buffer, const RelaxationKernel& kernel, double t,
                   const Field& current) {
  check_time(buffer, t);
  if (buffer.empty()) return 0.0;
  const auto edges = edge_gradients(current);
  return direct_moduli(buffer, kernel, buffer.first_retained(), t, edges).g_circ;
}

// ---------------------------------------------------------------------------

double CompressedKernel::value(double t) const {
  double s = 0.0;
  for (const auto& m : modes) s += m.weight * std::exp(-m.rate * (t - window_start));
  return s;
}

double CompressedKernel::derivative(double t) const {
  double s = 0.0;
  for (const auto& m : modes) s -= m.weight * m.rate * std::exp(-m.rate * (t - window_start));
  return s;
}

MemoryEngine::MemoryEngine(const Mesh& mesh, int components, RelaxationKernel kernel,
                           std::optional<CompressedKernel> compressed)
    : history_(mesh, components), kernel_(std::move(kernel)), compressed_(std::move(compressed)) {
  if (compressed_) {
    near_field_ = compressed_->window_start;
    const std::size_t k = compressed_->modes.size();
    conv_sum_.assign(k * history_.node_dofs(), 0.0);
    grad_sum_.assign(k * history_.edge_dofs(), 0.0);
    mass_sum_.assign(k, 0.0);
    sq_sum_.assign(k, 0.0);
  }
}

void MemoryEngine::push(double t, const Field& u) { history_.push(t, u); }

void MemoryEngine::fold(double t) {
  const std::size_t n = history_.size();
  const auto& modes = compressed_->modes;
  const std::size_t nd = history_.node_dofs();
  const std::size_t ne = history_.edge_dofs();
  bool rescaled = false;
  while (folded_ + 1 < n) {
    const double left = history_.time(folded_);
    const double right = history_.time(folded_ + 1);
    const double age = t - 0.5 * (left + right);
    if (age < near_field_) break;
    if (!rescaled && t != t_ref_) {
      for (std::size_t k = 0; k < modes.size(); ++k) {
        const double f = std::exp(-modes[k].rate * (t - t_ref_));
        for (std::size_t i = 0; i < nd; ++i) conv_sum_[k * nd + i] *= f;
        for (std::size_t e = 0; e < ne; ++e) grad_sum_[k * ne + e] *= f;
        mass_sum_[k] *= f;
        sq_sum_[k] *= f;
      }
      t_ref_ = t;
    }
    rescaled = true;
    const double len = right - left;
    const auto lap = history_.laplacian(folded_);
    const auto grad = history_.gradient(folded_);
    const double sq = history_.gradient_sq_norm(folded_);
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double w = std::exp(-modes[k].rate * (age - near_field_)) * len;
      if (w == 0.0) continue;
      for (std::size_t i = 0; i < nd; ++i) conv_sum_[k * nd + i] += w * lap[i];
      for (std::size_t e = 0; e < ne; ++e) grad_sum_[k * ne + e] += w * grad[e];
      mass_sum_[k] += w;
      sq_sum_[k] += w * sq;
    }
    ++folded_;
  }
  history_.release_before(folded_);
}

void MemoryEngine::convolution(double t, std::span<double> out) {
  check_time(history_, t);
  std::fill(out.begin(), out.end(), 0.0);
  if (history_.empty()) return;
  if (compressed_) {
    fold(t);
    const auto& modes = compressed_->modes;
    const std::size_t nd = history_.node_dofs();
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double f = modes[k].weight * std::exp(-modes[k].rate * (t - t_ref_));
      if (f == 0.0) continue;
      for (std::size_t i = 0; i < nd; ++i) out[i] += f * conv_sum_[k * nd + i];
    }
  }
  direct_convolution(history_, kernel_, folded_, t, out);
}

MemoryModuli MemoryEngine::moduli(double t, std::span<const double> current) {
  check_time(history_, t);
  if (history_.empty()) return {};
  MemoryModuli far;
  if (compressed_) {
    fold(t);
    const auto& modes = compressed_->modes;
    const std::size_t ne = history_.edge_dofs();
    const double vol = history_.mesh().cell_volume();
    double a_sq = 0.0;
    for (std::size_t e = 0; e < ne; ++e) a_sq += current[e] * current[e];
    a_sq *= vol;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      const double f = std::exp(-modes[k].rate * (t - t_ref_));
      if (f == 0.0) continue;
      double cross = 0.0;
      for (std::size_t e = 0; e < ne; ++e) cross += current[e] * grad_sum_[k * ne + e];
      // sum_j w_j ||a - b_j||^2 expanded into the three running sums
      const double term = f * (a_sq * mass_sum_[k] - 2.0 * vol * cross + sq_sum_[k]);
      far.g_circ += modes[k].weight * term;
      far.g_prime_circ -= modes[k].weight * modes[k].rate * term;
    }
  }
  MemoryModuli near = direct_moduli(history_, kernel_, folded_, t, current);
  near.g_circ = std::max(0.0, near.g_circ + far.g_circ);
  near.g_prime_circ += far.g_prime_circ;
  return near;
}

}  // namespace memheat
