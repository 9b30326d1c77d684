#include "icb/driver.hpp"

#include <algorithm>
#include <cmath>

#include "icb/metrics.hpp"

namespace icb {

namespace {

double channel_ssim(const ChannelSpec& spec, const Image& u) {
  if (spec.ground_truth == nullptr) return std::numeric_limits<double>::quiet_NaN();
  if (spec.ssim_roi != nullptr)
    return ssim(u, *spec.ground_truth, spec.ssim_dynamic_range, *spec.ssim_roi);
  return ssim(u, *spec.ground_truth, spec.ssim_dynamic_range);
}

}  // namespace

JointResult run_joint(const std::vector<ChannelSpec>& channels, const JointRunConfig& config) {
  const std::size_t nc = channels.size();
  if (nc == 0) throw std::invalid_argument("run_joint: no channels");
  if (config.n_bregman < 1) throw std::invalid_argument("run_joint: n_bregman < 1");
  for (const auto& ch : channels) {
    if (ch.op == nullptr) throw std::invalid_argument("run_joint: channel without operator");
    if (ch.weight_row.size() != nc)
      throw std::invalid_argument("run_joint: weight row length mismatch");
  }
  const int w = channels[0].op->image_width();
  const int h = channels[0].op->image_height();

  JointResult result;
  result.channels.resize(nc);
  std::vector<SubgradientState> q(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    q[i] = SubgradientState(w, h, static_cast<int>(i));
    result.channels[i].image = Image(w, h);
  }
  const bool track_ssim =
      std::all_of(channels.begin(), channels.end(),
                  [](const ChannelSpec& c) { return c.ground_truth != nullptr; });
  const bool keep_history = config.keep_history || config.stop_on_ssim_decline;
  std::vector<double> prev_ssim(nc, -2.0);

  for (int k = 0; k < config.n_bregman; ++k) {
    int order = 0;
    for (std::size_t i = 0; i < nc; ++i) {
      const ChannelSpec& spec = channels[i];
      InnerProblem problem;
      problem.op = spec.op;
      problem.data = spec.data;
      problem.fidelity = spec.fidelity;
      problem.alpha = spec.alpha;
      problem.own_weight = spec.weight_row[i];
      problem.own_q = &q[i].q;
      for (std::size_t j = 0; j < nc; ++j) {
        if (j == i || spec.weight_row[j] == 0.0) continue;
        problem.foreign.push_back({spec.weight_row[j], &q[j].q});
      }
      problem.nonneg = spec.nonneg;

      InnerResult inner = inner_solve(problem, config.inner);

      SolveReport report;
      report.bregman_iteration = k;
      report.channel = static_cast<int>(i);
      report.channel_name = spec.name;
      report.update_order = order++;
      report.gap = inner.report;
      if (inner.report.diverged) {
        result.reports.push_back(report);
        result.halted_on_divergence = true;
        return result;
      }

      SubgradientUpdate upd = update_subgradient(q[i], inner.y2, problem.own_weight);
      q[i] = std::move(upd.state);
      report.q_max_magnitude = upd.max_magnitude;
      report.q_clamped_pixels = upd.clamped_pixels;
      const SubgradientCheck check = validate_subgradient(q[i].q, inner.u, 1e-3);
      report.q_valid = check.is_valid;
      report.q_alignment_defect = check.alignment_defect;

      std::vector<double> ku = spec.op->apply(inner.u);
      report.fidelity = fidelity_value(spec.fidelity, spec.alpha, ku, spec.data);
      report.tv = total_variation(inner.u);
      report.ssim = channel_ssim(spec, inner.u);

      result.channels[i].image = std::move(inner.u);
      result.reports.push_back(std::move(report));
    }
    if (keep_history)
      for (std::size_t i = 0; i < nc; ++i)
        result.channels[i].history.push_back(result.channels[i].image);
    result.completed_bregman = k + 1;

    if (config.stop_on_ssim_decline && track_ssim && k > 0) {
      bool all_declined = true;
      for (std::size_t i = 0; i < nc; ++i) {
        const double s = channel_ssim(channels[i], result.channels[i].image);
        if (!(s < prev_ssim[i])) all_declined = false;
      }
      if (all_declined) {
        for (std::size_t i = 0; i < nc; ++i)
          result.channels[i].image = result.channels[i].history[k - 1];
        result.stopped_on_ssim_decline = true;
        break;
      }
    }
    for (std::size_t i = 0; i < nc; ++i)
      prev_ssim[i] = channel_ssim(channels[i], result.channels[i].image);
  }

  for (std::size_t i = 0; i < nc; ++i) result.channels[i].q = std::move(q[i]);
  return result;
}

Image reconstruct_mlem(const Sinogram& data, const LinearOperator& op, int iterations,
                       std::vector<double>* loglik_history) {
  if (iterations < 0) throw std::invalid_argument("reconstruct_mlem: negative iterations");
  for (double v : data.values)
    if (v < 0.0) throw std::invalid_argument("reconstruct_mlem: negative count data");
  const int w = op.image_width(), h = op.image_height();
  const std::size_t m = op.range_size();
  if (data.size() != m) throw std::invalid_argument("reconstruct_mlem: data size mismatch");

  Image u(w, h, 1.0);
  Image sens(w, h);
  {
    std::vector<double> ones(m, 1.0);
    op.adjoint(ones, sens);
  }
  // Pixels the operator never sees stay at zero and are excluded from updates.
  for (std::size_t i = 0; i < u.size(); ++i)
    if (sens.values[i] <= 0.0) u.values[i] = 0.0;

  std::vector<double> ku(m), ratio(m);
  Image back(w, h);
  for (int it = 0; it < iterations; ++it) {
    op.apply(u, ku);
    if (loglik_history != nullptr) {
      double ll = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        ll -= ku[i];
        if (data.values[i] > 0.0 && ku[i] > 0.0) ll += data.values[i] * std::log(ku[i]);
      }
      loglik_history->push_back(ll);
    }
    for (std::size_t i = 0; i < m; ++i)
      ratio[i] = ku[i] > 0.0 ? data.values[i] / ku[i] : 0.0;
    op.adjoint(ratio, back);
    for (std::size_t i = 0; i < u.size(); ++i)
      if (sens.values[i] > 0.0) u.values[i] *= back.values[i] / sens.values[i];
  }
  if (loglik_history != nullptr && iterations > 0) {
    op.apply(u, ku);
    double ll = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ll -= ku[i];
      if (data.values[i] > 0.0 && ku[i] > 0.0) ll += data.values[i] * std::log(ku[i]);
    }
    loglik_history->push_back(ll);
  }
  u.lower_bound = 0.0;
  return u;
}

Image reconstruct_zero_fill(const ComplexGrid& g, const Dft2Operator& op) {
  return project_nonnegative(op.back(g));
}

InnerResult reconstruct_tv(const LinearOperator& op, std::span<const double> data,
                           Fidelity fidelity, double alpha, bool nonneg,
                           const SolveOptions& options) {
  InnerProblem problem;
  problem.op = &op;
  problem.data = data;
  problem.fidelity = fidelity;
  problem.alpha = alpha;
  problem.own_weight = 1.0;
  problem.nonneg = nonneg;
  return inner_solve(problem, options);
}

JtvResult reconstruct_jtv(const ChannelSpec& a, const ChannelSpec& b,
                          const SolveOptions& options) {
  const LinearOperator& A = *a.op;
  const LinearOperator& B = *b.op;
  if (A.image_width() != B.image_width() || A.image_height() != B.image_height())
    throw std::invalid_argument("reconstruct_jtv: channels on different grids");
  const int w = A.image_width(), h = A.image_height();
  const std::size_t n = static_cast<std::size_t>(w) * h;

  // Per-channel sigma1/tau contributions, reusing the single-channel recipe.
  auto sub_problem = [](const ChannelSpec& c) {
    InnerProblem p;
    p.op = c.op;
    p.data = c.data;
    p.fidelity = c.fidelity;
    p.alpha = c.alpha;
    p.own_weight = 1.0;
    p.nonneg = c.nonneg;
    return p;
  };
  const Preconditioner pa = build_preconditioner(sub_problem(a));
  const Preconditioner pb = build_preconditioner(sub_problem(b));
  const double sigma_g = 0.5;

  Image u = A.adjoint(a.data);
  Image v = B.adjoint(b.data);
  if (a.nonneg) project_nonnegative_inplace(u.values);
  if (b.nonneg) project_nonnegative_inplace(v.values);
  Image ubar = u, vbar = v;
  std::vector<double> ya(A.range_size(), 0.0), yb(B.range_size(), 0.0);
  VectorField gu(w, h), gv(w, h);  // joint dual (4 components per pixel)
  VectorField gradbuf(w, h);
  Image divu(w, h), divv(w, h);
  std::vector<double> ka(A.range_size()), kb(B.range_size());
  Image ktya(w, h), ktyb(w, h);

  JtvResult out;
  for (int it = 1; it <= options.max_iters; ++it) {
    A.apply(ubar, ka);
    for (std::size_t i = 0; i < ka.size(); ++i)
      ya[i] += (pa.sigma1.empty() ? pa.sigma1_scalar : pa.sigma1[i]) * ka[i];
    if (a.fidelity == Fidelity::kl) {
      for (std::size_t i = 0; i < ya.size(); ++i) {
        const double s = pa.sigma1.empty() ? pa.sigma1_scalar : pa.sigma1[i];
        const double d = ya[i] - a.alpha;
        ya[i] = 0.5 * (a.alpha + ya[i]) - std::sqrt(0.25 * d * d + s * a.alpha * a.data[i]);
      }
    } else {
      for (std::size_t i = 0; i < ya.size(); ++i) {
        const double s = pa.sigma1.empty() ? pa.sigma1_scalar : pa.sigma1[i];
        ya[i] = a.alpha * (ya[i] - s * a.data[i]) / (a.alpha + s);
      }
    }
    B.apply(vbar, kb);
    for (std::size_t i = 0; i < kb.size(); ++i)
      yb[i] += (pb.sigma1.empty() ? pb.sigma1_scalar : pb.sigma1[i]) * kb[i];
    if (b.fidelity == Fidelity::kl) {
      for (std::size_t i = 0; i < yb.size(); ++i) {
        const double s = pb.sigma1.empty() ? pb.sigma1_scalar : pb.sigma1[i];
        const double d = yb[i] - b.alpha;
        yb[i] = 0.5 * (b.alpha + yb[i]) - std::sqrt(0.25 * d * d + s * b.alpha * b.data[i]);
      }
    } else {
      for (std::size_t i = 0; i < yb.size(); ++i) {
        const double s = pb.sigma1.empty() ? pb.sigma1_scalar : pb.sigma1[i];
        yb[i] = b.alpha * (yb[i] - s * b.data[i]) / (b.alpha + s);
      }
    }

    gradient_into(ubar, gradbuf);
    for (std::size_t i = 0; i < n; ++i) {
      gu.x[i] += sigma_g * gradbuf.x[i];
      gu.y[i] += sigma_g * gradbuf.y[i];
    }
    gradient_into(vbar, gradbuf);
    for (std::size_t i = 0; i < n; ++i) {
      gv.x[i] += sigma_g * gradbuf.x[i];
      gv.y[i] += sigma_g * gradbuf.y[i];
    }
    // Projection onto the unit Euclidean ball of the stacked 4-vector.
    for (std::size_t i = 0; i < n; ++i) {
      const double mag = std::sqrt(gu.x[i] * gu.x[i] + gu.y[i] * gu.y[i] +
                                   gv.x[i] * gv.x[i] + gv.y[i] * gv.y[i]);
      if (mag > 1.0) {
        gu.x[i] /= mag;
        gu.y[i] /= mag;
        gv.x[i] /= mag;
        gv.y[i] /= mag;
      }
    }

    A.adjoint(ya, ktya);
    B.adjoint(yb, ktyb);
    divergence_into(gu, divu);
    divergence_into(gv, divv);
    for (std::size_t i = 0; i < n; ++i) {
      double unew = u.values[i] - pa.tau_u[i] * (ktya.values[i] - divu.values[i]);
      if (a.nonneg && unew < 0.0) unew = 0.0;
      ubar.values[i] = 2.0 * unew - u.values[i];
      u.values[i] = unew;
      double vnew = v.values[i] - pb.tau_u[i] * (ktyb.values[i] - divv.values[i]);
      if (b.nonneg && vnew < 0.0) vnew = 0.0;
      vbar.values[i] = 2.0 * vnew - v.values[i];
      v.values[i] = vnew;
    }

    if (it % options.check_every == 0 || it == options.max_iters) {
      A.apply(u, ka);
      B.apply(v, kb);
      double gap = fidelity_value(a.fidelity, a.alpha, ka, a.data) +
                   fidelity_value(b.fidelity, b.alpha, kb, b.data) +
                   fidelity_conjugate_value(a.fidelity, a.alpha, ya, a.data) +
                   fidelity_conjugate_value(b.fidelity, b.alpha, yb, b.data);
      const VectorField gtu = gradient(u), gtv = gradient(v);
      for (std::size_t i = 0; i < n; ++i)
        gap += std::sqrt(gtu.x[i] * gtu.x[i] + gtu.y[i] * gtu.y[i] +
                         gtv.x[i] * gtv.x[i] + gtv.y[i] * gtv.y[i]);
      const double gap_pp = gap / static_cast<double>(2 * n);
      A.adjoint(ya, ktya);
      B.adjoint(yb, ktyb);
      divergence_into(gu, divu);
      divergence_into(gv, divv);
      double viol = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double ru = ktya.values[i] - divu.values[i];
        const double rv = ktyb.values[i] - divv.values[i];
        viol = std::max(viol, a.nonneg ? -ru : std::abs(ru));
        viol = std::max(viol, b.nonneg ? -rv : std::abs(rv));
      }
      out.report.gap_per_pixel = gap_pp;
      out.report.range_constraint_violation = viol;
      out.report.divergence_constraint = 0.0;
      out.report.inner_iterations = it;
      if (gap_pp <= options.tol_gap && viol <= options.tol_constraint) {
        out.report.converged = true;
        break;
      }
    }
  }
  out.u = std::move(u);
  out.v = std::move(v);
  return out;
}

std::vector<double> balance_fidelity_weights(std::vector<ChannelSpec>& channels,
                                             const SolveOptions& options, double tolerance,
                                             int max_rounds) {
  if (channels.size() < 2) return {};
  std::vector<double> ratios(channels.size(), 1.0);
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<double> fid(channels.size());
    for (std::size_t i = 0; i < channels.size(); ++i) {
      const auto& c = channels[i];
      InnerResult r = reconstruct_tv(*c.op, c.data, c.fidelity, c.alpha, c.nonneg, options);
      std::vector<double> ku = c.op->apply(r.u);
      fid[i] = fidelity_value(c.fidelity, c.alpha, ku, c.data);
    }
    bool balanced = true;
    for (std::size_t i = 1; i < channels.size(); ++i) {
      ratios[i] = fid[i] / fid[0];
      if (std::abs(ratios[i] - 1.0) > tolerance) {
        balanced = false;
        channels[i].alpha /= ratios[i];
      }
    }
    if (balanced) break;
  }
  return ratios;
}

}  // namespace icb
