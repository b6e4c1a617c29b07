#pragma once

#include <Eigen/Core>
#include <random>
#include <string>

#include "sparsetd/kwta.hpp"

namespace sparsetd {

enum class ArchKind { Linear, Regular, Kwta };

const char* to_string(ArchKind kind);
ArchKind arch_kind_from_string(const std::string& name);

struct ArchSpec {
  ArchKind kind = ArchKind::Regular;
  int n_in = 0;
  int n_hidden = 0;  // 0 for Linear
  int n_out = 0;
  KwtaSpec kwta;     // used only when kind == Kwta

  void validate() const;
};

// All learnable parameters. For Linear nets, w_ho is the single
// [n_out x n_in] input-to-output matrix and the hidden arrays are empty.
struct ApproximatorParams {
  Eigen::MatrixXd w_ih;  // [n_hidden x n_in]
  Eigen::VectorXd b_ih;  // [n_hidden]
  Eigen::MatrixXd w_ho;  // [n_out x n_hidden] (or [n_out x n_in] for Linear)
  Eigen::VectorXd b_ho;  // [n_out]

  bool all_finite() const;
  long parameter_count() const;
};

// Per-step record of one forward evaluation; carries everything the TD
// update needs.
struct ForwardTrace {
  Eigen::VectorXd input;
  Eigen::VectorXd eta;      // hidden net inputs (empty for Linear)
  Eigen::VectorXd eta_adj;  // net inputs after bias subtraction (== eta for Regular)
  Eigen::VectorXd h;        // hidden activations
  Eigen::VectorXd q;        // state-action values
};

// Weights and biases i.i.d. uniform on [-0.05, 0.05], deterministic in rng.
ApproximatorParams init_params(const ArchSpec& arch, std::mt19937_64& rng);

// Hidden units use a logistic activation with unit gain and an offset of -1:
// h = 1 / (1 + exp(-(x - 1))), so x = 1 gives 0.5 and x = 0 gives 1/(1+e).
// Output units are linear.
void forward(const ApproximatorParams& params, const ArchSpec& arch,
             const Eigen::VectorXd& input, ForwardTrace& trace);
ForwardTrace forward(const ApproximatorParams& params, const ArchSpec& arch,
                     const Eigen::VectorXd& input);

// params += alpha * delta * grad_w q(s, action). The kWTA bias is treated as
// a constant in the backward pass (no gradient through the selection).
void td_update(ApproximatorParams& params, const ArchSpec& arch,
               const ForwardTrace& trace, int action, double delta, double alpha);

// Central-difference estimate of grad_w q(s, action), computed with plain
// loops independent of forward(). For Kwta the bias is frozen at its
// unperturbed value, matching the quantity td_update differentiates.
// Test oracle; not used by training.
ApproximatorParams finite_difference_gradient(const ApproximatorParams& params,
                                              const ArchSpec& arch,
                                              const Eigen::VectorXd& input,
                                              int action, double h);

}  // namespace sparsetd
