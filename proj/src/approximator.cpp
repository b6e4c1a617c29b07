#include "sparsetd/approximator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sparsetd/errors.hpp"

namespace sparsetd {

const char* to_string(ArchKind kind) {
  switch (kind) {
    case ArchKind::Linear: return "linear";
    case ArchKind::Regular: return "regular";
    case ArchKind::Kwta: return "kwta";
  }
  return "?";
}

ArchKind arch_kind_from_string(const std::string& name) {
  if (name == "linear") return ArchKind::Linear;
  if (name == "regular") return ArchKind::Regular;
  if (name == "kwta") return ArchKind::Kwta;
  throw InvalidValue("unknown architecture kind '" + name + "'");
}

void ArchSpec::validate() const {
  if (n_in < 1) throw InvalidValue("ArchSpec: n_in must be >= 1");
  if (n_out < 1) throw InvalidValue("ArchSpec: n_out must be >= 1");
  if (kind == ArchKind::Linear) {
    if (n_hidden != 0) throw InvalidValue("ArchSpec: Linear nets have n_hidden = 0");
  } else {
    if (n_hidden < 1) throw InvalidValue("ArchSpec: hidden layer needs n_hidden >= 1");
  }
  if (kind == ArchKind::Kwta) {
    if (kwta.k < 1 || kwta.k >= n_hidden) {
      throw InvalidValue("ArchSpec: kwta.k must satisfy 1 <= k < n_hidden");
    }
    if (!(kwta.q > 0.0 && kwta.q < 1.0)) {
      throw InvalidValue("ArchSpec: kwta.q must be in (0, 1)");
    }
  }
}

bool ApproximatorParams::all_finite() const {
  return w_ih.allFinite() && b_ih.allFinite() && w_ho.allFinite() && b_ho.allFinite();
}

long ApproximatorParams::parameter_count() const {
  return w_ih.size() + b_ih.size() + w_ho.size() + b_ho.size();
}

namespace {

// Row-major fill so the draw order is part of the determinism contract.
void fill_uniform(Eigen::MatrixXd& m, std::uniform_real_distribution<double>& dist,
                  std::mt19937_64& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
}

void fill_uniform(Eigen::VectorXd& v, std::uniform_real_distribution<double>& dist,
                  std::mt19937_64& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = dist(rng);
}

inline double logistic_offset(double x) { return 1.0 / (1.0 + std::exp(-(x - 1.0))); }

}  // namespace

ApproximatorParams init_params(const ArchSpec& arch, std::mt19937_64& rng) {
  arch.validate();
  std::uniform_real_distribution<double> dist(-0.05, 0.05);
  ApproximatorParams p;
  if (arch.kind == ArchKind::Linear) {
    p.w_ih.resize(0, 0);
    p.b_ih.resize(0);
    p.w_ho.resize(arch.n_out, arch.n_in);
    p.b_ho.resize(arch.n_out);
  } else {
    p.w_ih.resize(arch.n_hidden, arch.n_in);
    p.b_ih.resize(arch.n_hidden);
    p.w_ho.resize(arch.n_out, arch.n_hidden);
    p.b_ho.resize(arch.n_out);
    fill_uniform(p.w_ih, dist, rng);
    fill_uniform(p.b_ih, dist, rng);
  }
  fill_uniform(p.w_ho, dist, rng);
  fill_uniform(p.b_ho, dist, rng);
  return p;
}

void forward(const ApproximatorParams& params, const ArchSpec& arch,
             const Eigen::VectorXd& input, ForwardTrace& trace) {
  if (input.size() != arch.n_in) {
    throw DimensionMismatch("forward: input size " + std::to_string(input.size()) +
                            " vs n_in " + std::to_string(arch.n_in));
  }
  trace.input = input;
  if (arch.kind == ArchKind::Linear) {
    trace.eta.resize(0);
    trace.eta_adj.resize(0);
    trace.h.resize(0);
    trace.q.noalias() = params.w_ho * input;
    trace.q += params.b_ho;
  } else {
    trace.eta.noalias() = params.w_ih * input;
    trace.eta += params.b_ih;
    if (arch.kind == ArchKind::Kwta) {
      const double b = kwta_bias(trace.eta, arch.kwta);
      trace.eta_adj = trace.eta.array() - b;
    } else {
      trace.eta_adj = trace.eta;
    }
    trace.h = (1.0 + (-(trace.eta_adj.array() - 1.0)).exp()).inverse();
    trace.q.noalias() = params.w_ho * trace.h;
    trace.q += params.b_ho;
  }
  if (!trace.q.allFinite()) {
    throw NonFiniteResult("forward: non-finite state-action value");
  }
}

ForwardTrace forward(const ApproximatorParams& params, const ArchSpec& arch,
                     const Eigen::VectorXd& input) {
  ForwardTrace trace;
  forward(params, arch, input, trace);
  return trace;
}

void td_update(ApproximatorParams& params, const ArchSpec& arch,
               const ForwardTrace& trace, int action, double delta, double alpha) {
  if (action < 0 || action >= arch.n_out) {
    throw InvalidAction("td_update: action " + std::to_string(action));
  }
  if (!std::isfinite(delta)) {
    throw NonFiniteResult("td_update: non-finite TD error");
  }
  const double scale = alpha * delta;
  if (arch.kind == ArchKind::Linear) {
    params.w_ho.row(action) += scale * trace.input.transpose();
    params.b_ho(action) += scale;
    return;
  }
  // Hidden-layer gradient uses the output weights before they move.
  Eigen::VectorXd dh = scale * params.w_ho.row(action).transpose().array() *
                       trace.h.array() * (1.0 - trace.h.array());
  params.w_ho.row(action) += scale * trace.h.transpose();
  params.b_ho(action) += scale;
  params.w_ih.noalias() += dh * trace.input.transpose();
  params.b_ih += dh;
}

namespace {

// Naive scalar evaluation of q(s, action), independent of forward(). When
// fixed_bias is non-null the kWTA subtraction uses that constant.
double eval_q(const ApproximatorParams& p, const ArchSpec& arch,
              const Eigen::VectorXd& input, int action, const double* fixed_bias) {
  if (arch.kind == ArchKind::Linear) {
    double q = p.b_ho(action);
    for (int i = 0; i < arch.n_in; ++i) q += p.w_ho(action, i) * input(i);
    return q;
  }
  std::vector<double> eta(static_cast<size_t>(arch.n_hidden));
  for (int j = 0; j < arch.n_hidden; ++j) {
    double e = p.b_ih(j);
    for (int i = 0; i < arch.n_in; ++i) e += p.w_ih(j, i) * input(i);
    eta[static_cast<size_t>(j)] = e;
  }
  double bias = 0.0;
  if (arch.kind == ArchKind::Kwta) bias = *fixed_bias;
  double q = p.b_ho(action);
  for (int j = 0; j < arch.n_hidden; ++j) {
    const double x = eta[static_cast<size_t>(j)] - bias;
    q += p.w_ho(action, j) * logistic_offset(x);
  }
  return q;
}

// Full-sort bias computation, used only to pin the frozen bias here.
double sorted_bias(const ApproximatorParams& p, const ArchSpec& arch,
                   const Eigen::VectorXd& input) {
  std::vector<double> eta(static_cast<size_t>(arch.n_hidden));
  for (int j = 0; j < arch.n_hidden; ++j) {
    double e = p.b_ih(j);
    for (int i = 0; i < arch.n_in; ++i) e += p.w_ih(j, i) * input(i);
    eta[static_cast<size_t>(j)] = e;
  }
  std::sort(eta.begin(), eta.end(), std::greater<double>());
  const double eta_k = eta[static_cast<size_t>(arch.kwta.k - 1)];
  const double eta_k1 = eta[static_cast<size_t>(arch.kwta.k)];
  return eta_k - arch.kwta.q * (eta_k - eta_k1);
}

}  // namespace

ApproximatorParams finite_difference_gradient(const ApproximatorParams& params,
                                              const ArchSpec& arch,
                                              const Eigen::VectorXd& input,
                                              int action, double h) {
  if (h <= 0.0) throw InvalidValue("finite_difference_gradient: h must be > 0");
  double bias = 0.0;
  const double* fixed_bias = nullptr;
  if (arch.kind == ArchKind::Kwta) {
    bias = sorted_bias(params, arch, input);
    fixed_bias = &bias;
  }

  ApproximatorParams grad = params;  // same shapes
  ApproximatorParams work = params;
  auto central = [&](double& slot, double& grad_slot) {
    const double saved = slot;
    slot = saved + h;
    const double plus = eval_q(work, arch, input, action, fixed_bias);
    slot = saved - h;
    const double minus = eval_q(work, arch, input, action, fixed_bias);
    slot = saved;
    grad_slot = (plus - minus) / (2.0 * h);
  };

  for (Eigen::Index r = 0; r < work.w_ih.rows(); ++r)
    for (Eigen::Index c = 0; c < work.w_ih.cols(); ++c)
      central(work.w_ih(r, c), grad.w_ih(r, c));
  for (Eigen::Index i = 0; i < work.b_ih.size(); ++i)
    central(work.b_ih(i), grad.b_ih(i));
  for (Eigen::Index r = 0; r < work.w_ho.rows(); ++r)
    for (Eigen::Index c = 0; c < work.w_ho.cols(); ++c)
      central(work.w_ho(r, c), grad.w_ho(r, c));
  for (Eigen::Index i = 0; i < work.b_ho.size(); ++i)
    central(work.b_ho(i), grad.b_ho(i));
  return grad;
}

}  // namespace sparsetd
