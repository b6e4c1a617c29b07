#pragma once

#include <array>
#include <initializer_list>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "sparsetd/encoding.hpp"

namespace sparsetd {

// Continuous environment state, at most four dimensions.
struct EnvState {
  std::array<double, 4> v{};
  int dim = 0;

  static EnvState of(std::initializer_list<double> xs);
  double operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

struct StepResult {
  EnvState next;
  double reward = 0.0;
  bool terminal = false;
};

// ---- Puddle-world ---------------------------------------------------------
// Unit square with two capsule-shaped puddles and the goal in the northeast
// corner. Actions 0..3 = North, South, East, West, each moving 0.05. Stepping
// out of the square clamps the position and costs -2 instead of -1; puddle
// penalty -400 * depth is added on top; reaching the goal region yields 0.

inline constexpr double kPuddleGoalMin = 0.95;

// Depth inside the puddle region: max over capsules of (radius - distance to
// the capsule's axis segment), floored at zero.
double puddle_depth(double x, double y);
bool puddle_goal(double x, double y);
StepResult puddle_step(const EnvState& s, int action);
// The 21x21 grid points minus puddle interiors and the goal region.
std::vector<EnvState> puddle_start_lattice();

// ---- Mountain-car ----------------------------------------------------------
// Actions 0..2 = backward, neutral, forward (throttle -1, 0, +1). Position in
// [-1.2, 0.5], velocity in [-0.07, 0.07]; hitting the left wall zeroes the
// velocity; the goal is x >= 0.5.
StepResult mountain_step(const EnvState& s, int action);

// ---- Acrobot ----------------------------------------------------------------
struct AcrobotParams {
  double m1 = 1.0, m2 = 1.0;
  double l1 = 1.0, l2 = 1.0;
  double lc1 = 0.5, lc2 = 0.5;
  double I1 = 1.0, I2 = 1.0;
  double g = 9.8;
  double dt = 0.05;
  int substeps = 4;
};

// Joint accelerations for the given torque on the second joint.
void acrobot_accel(const EnvState& s, double torque, const AcrobotParams& p,
                   double& ddtheta1, double& ddtheta2);

// One action interval: `substeps` explicit Euler steps of size dt with the
// torque held fixed; angular velocities clipped to [-4pi, 4pi] and
// [-9pi, 9pi] after each substep; angles wrapped to [-pi, pi]. Terminal when
// the tip height -cos(th1) - cos(th1 + th2) reaches 1.
StepResult acrobot_step(const EnvState& s, int action, const AcrobotParams& p);

// ---- Common contract ---------------------------------------------------------
class Environment {
 public:
  virtual ~Environment() = default;
  virtual const char* name() const = 0;
  virtual int num_actions() const = 0;
  virtual int state_dim() const = 0;
  // Per-dimension encoding grids; sigma <= 0 selects the 1/n_div default.
  virtual std::vector<GridSpec> grids(int n_div, double sigma) const = 0;
  virtual EnvState reset(std::mt19937_64& rng) const = 0;
  virtual StepResult step(const EnvState& s, int action) const = 0;
  virtual bool is_goal(const EnvState& s) const = 0;
};

class PuddleWorld final : public Environment {
 public:
  const char* name() const override { return "puddle"; }
  int num_actions() const override { return 4; }
  int state_dim() const override { return 2; }
  std::vector<GridSpec> grids(int n_div, double sigma) const override;
  EnvState reset(std::mt19937_64& rng) const override;
  StepResult step(const EnvState& s, int action) const override;
  bool is_goal(const EnvState& s) const override;
};

class MountainCar final : public Environment {
 public:
  const char* name() const override { return "mountain"; }
  int num_actions() const override { return 3; }
  int state_dim() const override { return 2; }
  std::vector<GridSpec> grids(int n_div, double sigma) const override;
  EnvState reset(std::mt19937_64& rng) const override;
  StepResult step(const EnvState& s, int action) const override;
  bool is_goal(const EnvState& s) const override;
};

class Acrobot final : public Environment {
 public:
  explicit Acrobot(AcrobotParams params = {}) : params_(params) {}
  const char* name() const override { return "acrobot"; }
  int num_actions() const override { return 3; }
  int state_dim() const override { return 4; }
  std::vector<GridSpec> grids(int n_div, double sigma) const override;
  EnvState reset(std::mt19937_64& rng) const override;
  StepResult step(const EnvState& s, int action) const override;
  bool is_goal(const EnvState& s) const override;
  const AcrobotParams& params() const { return params_; }

 private:
  AcrobotParams params_;
};

// "puddle", "mountain" or "acrobot".
std::unique_ptr<Environment> make_environment(const std::string& name);

}  // namespace sparsetd
