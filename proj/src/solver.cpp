#include "icb/solver.hpp"

#include <algorithm>
#include <cmath>

namespace icb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void InnerProblem::validate() const {
  if (op == nullptr) throw std::invalid_argument("InnerProblem: missing operator");
  if (data.size() != op->range_size())
    throw std::invalid_argument("InnerProblem: data size does not match operator range");
  if (!(alpha > 0.0)) throw std::invalid_argument("InnerProblem: alpha must be positive");
  if (!(own_weight > 0.0)) throw std::invalid_argument("InnerProblem: own weight must be positive");
  double row_sum = own_weight;
  for (const auto& fc : foreign) {
    if (fc.weight < 0.0) throw std::invalid_argument("InnerProblem: negative coupling weight");
    if (fc.q == nullptr) throw std::invalid_argument("InnerProblem: missing foreign subgradient");
    row_sum += fc.weight;
  }
  if (std::abs(row_sum - 1.0) > 1e-12)
    throw std::invalid_argument("InnerProblem: weight row does not sum to 1");
  if (fidelity == Fidelity::kl) {
    for (double v : data)
      if (v < 0.0) throw std::invalid_argument("InnerProblem: negative entry in count data");
  }
}

namespace {

// Number of difference-matrix entries incident to each pixel (<= 4).
std::vector<double> gradient_column_sums(int w, int h) {
  std::vector<double> inc(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x < w - 1) inc[i] += 1.0;
      if (x > 0) inc[i] += 1.0;
      if (y < h - 1) inc[i] += 1.0;
      if (y > 0) inc[i] += 1.0;
    }
  return inc;
}

}  // namespace

Preconditioner build_preconditioner(const InnerProblem& problem) {
  problem.validate();
  const LinearOperator& op = *problem.op;
  const int w = op.image_width(), h = op.image_height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t m = op.range_size();
  const int n_foreign = static_cast<int>(problem.foreign.size());

  Preconditioner pre;
  const std::vector<double> ginc = gradient_column_sums(w, h);

  std::vector<double> k_col(n, 0.0);
  if (op.nonnegative_entries()) {
    // Probing with ones gives the exact absolute sums.
    Image ones(w, h, 1.0);
    std::vector<double> row_sums = op.apply(ones);
    pre.sigma1.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      if (row_sums[i] > 0.0) {
        pre.sigma1[i] = 1.0 / row_sums[i];
      } else {
        pre.sigma1[i] = 1.0;
        ++pre.flagged;
      }
    }
    std::vector<double> ones_m(m, 1.0);
    Image col_img = op.adjoint(ones_m);
    k_col = std::move(col_img.values);
  } else {
    // Dense operators (masked unitary DFT): fall back to the operator-norm
    // budget sigma1 * |K|^2 <= 1 with sigma1 = 1.
    pre.sigma1_scalar = 1.0;
    const double norm_bound = 1.0;  // masked unitary transform
    std::fill(k_col.begin(), k_col.end(), pre.sigma1_scalar * norm_bound * norm_bound);
  }

  pre.tau_u.resize(n);
  pre.tau_z.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double cu = k_col[i] + ginc[i] * (1.0 + n_foreign);
    if (cu > 0.0) {
      pre.tau_u[i] = 1.0 / cu;
    } else {
      pre.tau_u[i] = 1.0;
      ++pre.flagged;
    }
    const double cz = 2.0 * ginc[i];
    pre.tau_z[i] = cz > 0.0 ? 1.0 / cz : 1.0;
  }
  return pre;
}

double fidelity_value(Fidelity kind, double alpha, std::span<const double> w,
                      std::span<const double> data) {
  if (kind == Fidelity::quadratic) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double d = w[i] - data[i];
      s += d * d;
    }
    return 0.5 * alpha * s;
  }
  // KL: alpha * sum(w - f log w), with 0 log 0 := 0.
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    s += w[i];
    if (data[i] > 0.0) {
      if (w[i] <= 0.0) return kInf;
      s -= data[i] * std::log(w[i]);
    }
  }
  return alpha * s;
}

double fidelity_conjugate_value(Fidelity kind, double alpha, std::span<const double> y,
                                std::span<const double> data) {
  if (kind == Fidelity::quadratic) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += 0.5 * y[i] * y[i] / alpha + y[i] * data[i];
    return s;
  }
  // KL conjugate: sum over f > 0 of alpha f (log(alpha f / (alpha - y)) - 1);
  // bins with f = 0 contribute 0 (and require y <= alpha).
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (data[i] > 0.0) {
      const double denom = alpha - y[i];
      if (denom <= 0.0) return kInf;
      s += alpha * data[i] * (std::log(alpha * data[i] / denom) - 1.0);
    } else if (y[i] > alpha) {
      return kInf;
    }
  }
  return s;
}

GapReport compute_gap(const InnerState& state, const InnerProblem& problem) {
  const LinearOperator& op = *problem.op;
  const std::size_t n_pixels = state.u.size();
  GapReport report;

  std::vector<double> ku = op.apply(state.u);
  double gap = fidelity_value(problem.fidelity, problem.alpha, ku, problem.data);
  gap += fidelity_conjugate_value(problem.fidelity, problem.alpha, state.y1, problem.data);

  const VectorField gu = gradient(state.u);
  double own = total_variation(state.u);
  if (problem.own_q != nullptr) own -= inner_product(*problem.own_q, gu);
  gap += problem.own_weight * own;

  for (std::size_t j = 0; j < problem.foreign.size(); ++j) {
    const auto& fc = problem.foreign[j];
    const Image diff = axpy(-1.0, state.z[j], state.u);
    gap += fc.weight * (total_variation(diff) - inner_product(*fc.q, gradient(diff)));
    gap += fc.weight * (total_variation(state.z[j]) + inner_product(*fc.q, gradient(state.z[j])));
  }
  report.gap_per_pixel = gap / static_cast<double>(n_pixels);

  // Range constraint K* y1 - div y2 - sum_j div y3_j in C.
  Image kty = op.adjoint(state.y1);
  Image residual = axpy(-1.0, divergence(state.y2), kty);
  for (std::size_t j = 0; j < problem.foreign.size(); ++j)
    residual = axpy(-1.0, divergence(state.y3[j]), residual);
  double violation = 0.0;
  if (problem.nonneg) {
    for (double v : residual.values) violation = std::max(violation, -v);
  } else {
    for (double v : residual.values) violation = std::max(violation, std::abs(v));
  }
  report.range_constraint_violation = violation;

  double div_con = 0.0;
  for (std::size_t j = 0; j < problem.foreign.size(); ++j) {
    const Image d = axpy(-1.0, divergence(state.y4[j]), divergence(state.y3[j]));
    div_con = std::max(div_con, norm2(d.values));
  }
  report.divergence_constraint = div_con;
  return report;
}

namespace {

void apply_fidelity_prox(Fidelity kind, double alpha, std::span<double> y,
                         std::span<const double> sigma, double sigma_scalar,
                         std::span<const double> data) {
  if (kind == Fidelity::kl) {
    if (sigma.empty()) {
      prox_kl_conjugate_inplace(y, sigma_scalar, alpha, data);
    } else {
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - alpha;
        y[i] = 0.5 * (alpha + y[i]) - std::sqrt(0.25 * d * d + sigma[i] * alpha * data[i]);
      }
    }
  } else {
    if (sigma.empty()) {
      prox_quadratic_conjugate_inplace(y, sigma_scalar, alpha, data);
    } else {
      for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = alpha * (y[i] - sigma[i] * data[i]) / (alpha + sigma[i]);
    }
  }
}

bool state_finite(const InnerState& s) {
  if (!all_finite(s.u.values) || !all_finite(s.y1) || !all_finite(s.y2.x) ||
      !all_finite(s.y2.y))
    return false;
  for (const auto& z : s.z)
    if (!all_finite(z.values)) return false;
  return true;
}

}  // namespace

InnerResult inner_solve(const InnerProblem& problem, const SolveOptions& options) {
  problem.validate();
  const LinearOperator& op = *problem.op;
  const int w = op.image_width(), h = op.image_height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t m = op.range_size();
  const int nf = static_cast<int>(problem.foreign.size());

  const Preconditioner pre = build_preconditioner(problem);

  InnerState st;
  st.u = op.adjoint(problem.data);
  if (problem.nonneg) project_nonnegative_inplace(st.u.values);
  st.y1.assign(m, 0.0);
  st.y2 = VectorField(w, h);
  st.z.assign(nf, Image(w, h));
  st.y3.assign(nf, VectorField(w, h));
  st.y4.assign(nf, VectorField(w, h));

  Image ubar = st.u;
  std::vector<Image> zbar(nf, Image(w, h));

  // Work buffers.
  std::vector<double> ku(m);
  Image kty(w, h);
  VectorField gubar(w, h), scratch_field(w, h);
  std::vector<VectorField> gzbar(nf, VectorField(w, h));
  Image div2(w, h), div_acc(w, h), div4(w, h);
  std::vector<Image> div3(nf, Image(w, h));

  InnerResult result;
  GapReport best = {};
  best.gap_per_pixel = kInf;
  Image best_u = st.u;
  VectorField best_y2 = st.y2;
  std::vector<Image> best_z = st.z;
  std::vector<VectorField> best_y3 = st.y3, best_y4 = st.y4;

  const double wi = problem.own_weight;

  for (int it = 1; it <= options.max_iters; ++it) {
    // Dual updates.
    op.apply(ubar, ku);
    for (std::size_t i = 0; i < m; ++i)
      ku[i] = st.y1[i] + (pre.sigma1.empty() ? pre.sigma1_scalar : pre.sigma1[i]) * ku[i];
    std::swap(st.y1, ku);
    apply_fidelity_prox(problem.fidelity, problem.alpha, st.y1, pre.sigma1, pre.sigma1_scalar,
                        problem.data);

    gradient_into(ubar, gubar);
    for (std::size_t i = 0; i < n; ++i) {
      st.y2.x[i] += pre.sigma2 * gubar.x[i];
      st.y2.y[i] += pre.sigma2 * gubar.y[i];
    }
    project_shifted_ball_inplace(st.y2, problem.own_q, wi, wi);

    for (int j = 0; j < nf; ++j) {
      const auto& fc = problem.foreign[j];
      gradient_into(zbar[j], gzbar[j]);
      for (std::size_t i = 0; i < n; ++i) {
        st.y3[j].x[i] += pre.sigma3 * (gubar.x[i] - gzbar[j].x[i]);
        st.y3[j].y[i] += pre.sigma3 * (gubar.y[i] - gzbar[j].y[i]);
      }
      project_shifted_ball_inplace(st.y3[j], fc.q, fc.weight, fc.weight);
      for (std::size_t i = 0; i < n; ++i) {
        st.y4[j].x[i] += pre.sigma4 * gzbar[j].x[i];
        st.y4[j].y[i] += pre.sigma4 * gzbar[j].y[i];
      }
      project_shifted_ball_inplace(st.y4[j], fc.q, -fc.weight, fc.weight);
    }

    // Primal updates with overrelaxation folded in:
    // unew = proj_C(u - tau (K* y1 - div y2 - sum div y3)), ubar = 2 unew - u.
    op.adjoint(st.y1, kty);
    divergence_into(st.y2, div2);
    for (std::size_t i = 0; i < n; ++i) div_acc.values[i] = kty.values[i] - div2.values[i];
    for (int j = 0; j < nf; ++j) {
      divergence_into(st.y3[j], div3[j]);
      for (std::size_t i = 0; i < n; ++i) div_acc.values[i] -= div3[j].values[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double unew = st.u.values[i] - pre.tau_u[i] * div_acc.values[i];
      if (problem.nonneg && unew < 0.0) unew = 0.0;
      ubar.values[i] = 2.0 * unew - st.u.values[i];
      st.u.values[i] = unew;
    }
    for (int j = 0; j < nf; ++j) {
      divergence_into(st.y4[j], div4);
      for (std::size_t i = 0; i < n; ++i) {
        const double znew =
            st.z[j].values[i] - pre.tau_z[i] * (div3[j].values[i] - div4.values[i]);
        zbar[j].values[i] = 2.0 * znew - st.z[j].values[i];
        st.z[j].values[i] = znew;
      }
    }

    if (it % options.check_every == 0 || it == options.max_iters) {
      if (!state_finite(st)) {
        result.report.diverged = true;
        result.report.inner_iterations = it;
        break;
      }
      GapReport report = compute_gap(st, problem);
      report.inner_iterations = it;
      if (options.record_history)
        result.gap_history.emplace_back(it, report.gap_per_pixel);
      if (report.gap_per_pixel < best.gap_per_pixel) {
        best = report;
        best_u = st.u;
        best_y2 = st.y2;
        best_z = st.z;
        best_y3 = st.y3;
        best_y4 = st.y4;
      }
      if (report.gap_per_pixel <= options.tol_gap &&
          report.range_constraint_violation <= options.tol_constraint &&
          report.divergence_constraint <= options.tol_constraint) {
        report.converged = true;
        result.report = report;
        result.u = std::move(st.u);
        result.y2 = std::move(st.y2);
        result.z = std::move(st.z);
        result.y3 = std::move(st.y3);
        result.y4 = std::move(st.y4);
        return result;
      }
    }
  }

  // Not converged: hand back the best state seen, flagged.
  if (!result.report.diverged) {
    result.report = best;
    result.report.inner_iterations = options.max_iters;
  }
  result.u = std::move(best_u);
  result.y2 = std::move(best_y2);
  result.z = std::move(best_z);
  result.y3 = std::move(best_y3);
  result.y4 = std::move(best_y4);
  return result;
}

SubgradientUpdate update_subgradient(const SubgradientState& q_old, const VectorField& y2,
                                     double w_i) {
  if (!(w_i > 0.0)) throw std::invalid_argument("update_subgradient: w_i must be positive");
  require_same_shape(q_old.q, y2);
  SubgradientUpdate upd;
  upd.state.q = VectorField(y2.width, y2.height);
  upd.state.channel_id = q_old.channel_id;
  upd.state.bregman_iteration = q_old.bregman_iteration + 1;
  const double slack = SubgradientState::magnitude_slack;
  for (std::size_t i = 0; i < y2.size(); ++i) {
    double qx = q_old.q.x[i] + y2.x[i] / w_i;
    double qy = q_old.q.y[i] + y2.y[i] / w_i;
    const double mag = std::hypot(qx, qy);
    upd.max_magnitude = std::max(upd.max_magnitude, mag);
    if (mag > 1.0 + slack) {
      qx /= mag;
      qy /= mag;
      ++upd.clamped_pixels;
      upd.warned = true;
    }
    upd.state.q.x[i] = qx;
    upd.state.q.y[i] = qy;
  }
  return upd;
}

}  // namespace icb
