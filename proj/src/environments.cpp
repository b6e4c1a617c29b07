#include "sparsetd/environments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparsetd/errors.hpp"

namespace sparsetd {

namespace {

constexpr double kPi = std::numbers::pi;

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// Wraps an angle into [-pi, pi).
double wrap_pi(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

double point_segment_distance(double px, double py, double ax, double ay, double bx,
                              double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len_sq = dx * dx + dy * dy;
  double t = len_sq > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len_sq : 0.0;
  t = clamp(t, 0.0, 1.0);
  const double cx = ax + t * dx, cy = ay + t * dy;
  return std::hypot(px - cx, py - cy);
}

// Two capsules of radius 0.1: a horizontal one and a vertical one.
constexpr double kPuddleRadius = 0.1;
constexpr double kSeg1[4] = {0.1, 0.75, 0.45, 0.75};
constexpr double kSeg2[4] = {0.45, 0.4, 0.45, 0.8};

constexpr double kPuddleStepSize = 0.05;

// Positions accumulate rounding dust along a trajectory (0.15 - 0.05 - 0.05
// lands at -7e-18, not 0). Wall and goal comparisons ignore excursions far
// below the step size so rewards depend on the cell, not on the arithmetic
// history.
constexpr double kEdgeTolerance = 1e-9;

constexpr double kMinPos = -1.2, kMaxPos = 0.5;
constexpr double kMaxVel = 0.07;

}  // namespace

EnvState EnvState::of(std::initializer_list<double> xs) {
  EnvState s;
  for (double x : xs) s.v[static_cast<size_t>(s.dim++)] = x;
  return s;
}

// ---- Puddle-world -----------------------------------------------------------

double puddle_depth(double x, double y) {
  const double d1 = point_segment_distance(x, y, kSeg1[0], kSeg1[1], kSeg1[2], kSeg1[3]);
  const double d2 = point_segment_distance(x, y, kSeg2[0], kSeg2[1], kSeg2[2], kSeg2[3]);
  return std::max(0.0, kPuddleRadius - std::min(d1, d2));
}

bool puddle_goal(double x, double y) {
  return x >= kPuddleGoalMin - kEdgeTolerance && y >= kPuddleGoalMin - kEdgeTolerance;
}

StepResult puddle_step(const EnvState& s, int action) {
  double dx = 0.0, dy = 0.0;
  switch (action) {
    case 0: dy = kPuddleStepSize; break;   // North
    case 1: dy = -kPuddleStepSize; break;  // South
    case 2: dx = kPuddleStepSize; break;   // East
    case 3: dx = -kPuddleStepSize; break;  // West
    default:
      throw InvalidAction("puddle_step: action " + std::to_string(action));
  }
  double nx = s[0] + dx;
  double ny = s[1] + dy;
  const bool hit_wall = nx < -kEdgeTolerance || nx > 1.0 + kEdgeTolerance ||
                        ny < -kEdgeTolerance || ny > 1.0 + kEdgeTolerance;
  nx = clamp(nx, 0.0, 1.0);
  ny = clamp(ny, 0.0, 1.0);
  StepResult r;
  r.next = EnvState::of({nx, ny});
  if (puddle_goal(nx, ny)) {
    r.reward = 0.0;
    r.terminal = true;
    return r;
  }
  r.reward = (hit_wall ? -2.0 : -1.0) - 400.0 * puddle_depth(nx, ny);
  r.terminal = false;
  return r;
}

std::vector<EnvState> puddle_start_lattice() {
  std::vector<EnvState> starts;
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      const double x = i / 20.0;
      const double y = j / 20.0;
      if (puddle_goal(x, y)) continue;
      if (puddle_depth(x, y) > 0.0) continue;
      starts.push_back(EnvState::of({x, y}));
    }
  }
  return starts;
}

std::vector<GridSpec> PuddleWorld::grids(int n_div, double sigma) const {
  return {GridSpec{0.0, 1.0, n_div, sigma}, GridSpec{0.0, 1.0, n_div, sigma}};
}

EnvState PuddleWorld::reset(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x, y;
  do {
    x = u(rng);
    y = u(rng);
  } while (puddle_goal(x, y));
  return EnvState::of({x, y});
}

StepResult PuddleWorld::step(const EnvState& s, int action) const {
  return puddle_step(s, action);
}

bool PuddleWorld::is_goal(const EnvState& s) const { return puddle_goal(s[0], s[1]); }

// ---- Mountain-car -------------------------------------------------------------

StepResult mountain_step(const EnvState& s, int action) {
  if (action < 0 || action > 2) {
    throw InvalidAction("mountain_step: action " + std::to_string(action));
  }
  const double a = static_cast<double>(action - 1);  // throttle -1, 0, +1
  double v = s[1] + 0.0001 * a - 0.0025 * std::cos(3.0 * s[0]);
  v = clamp(v, -kMaxVel, kMaxVel);
  double x = clamp(s[0] + v, kMinPos, kMaxPos);
  if (x == kMinPos) v = 0.0;  // left wall absorbs all momentum
  StepResult r;
  r.next = EnvState::of({x, v});
  if (x >= kMaxPos) {
    r.reward = 0.0;
    r.terminal = true;
  } else {
    r.reward = -1.0;
    r.terminal = false;
  }
  return r;
}

std::vector<GridSpec> MountainCar::grids(int n_div, double sigma) const {
  return {GridSpec{kMinPos, kMaxPos, n_div, sigma},
          GridSpec{-kMaxVel, kMaxVel, n_div, sigma}};
}

EnvState MountainCar::reset(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> pos(kMinPos, kMaxPos);
  std::uniform_real_distribution<double> vel(-kMaxVel, kMaxVel);
  const double x = pos(rng);
  const double v = vel(rng);
  return EnvState::of({x, v});
}

StepResult MountainCar::step(const EnvState& s, int action) const {
  return mountain_step(s, action);
}

bool MountainCar::is_goal(const EnvState& s) const { return s[0] >= kMaxPos; }

// ---- Acrobot --------------------------------------------------------------------

void acrobot_accel(const EnvState& s, double torque, const AcrobotParams& p,
                   double& ddtheta1, double& ddtheta2) {
  const double th1 = s[0], th2 = s[1], w1 = s[2], w2 = s[3];
  const double c2 = std::cos(th2), s2 = std::sin(th2);

  const double d1 = p.m1 * p.lc1 * p.lc1 +
                    p.m2 * (p.l1 * p.l1 + p.lc2 * p.lc2 + 2.0 * p.l1 * p.lc2 * c2) +
                    p.I1 + p.I2;
  const double d2 = p.m2 * (p.lc2 * p.lc2 + p.l1 * p.lc2 * c2) + p.I2;
  const double phi2 = p.m2 * p.lc2 * p.g * std::cos(th1 + th2 - kPi / 2.0);
  const double phi1 = -p.m2 * p.l1 * p.lc2 * w2 * w2 * s2 -
                      2.0 * p.m2 * p.l1 * p.lc2 * w2 * w1 * s2 +
                      (p.m1 * p.lc1 + p.m2 * p.l1) * p.g * std::cos(th1 - kPi / 2.0) +
                      phi2;
  if (std::abs(d1) <= 1e-9) {
    throw NonFiniteResult("acrobot_accel: singular inertia term");
  }
  ddtheta2 = (torque + (d2 / d1) * phi1 - p.m2 * p.l1 * p.lc2 * w1 * w1 * s2 - phi2) /
             (p.m2 * p.lc2 * p.lc2 + p.I2 - d2 * d2 / d1);
  ddtheta1 = -(d2 * ddtheta2 + phi1) / d1;
}

StepResult acrobot_step(const EnvState& s, int action, const AcrobotParams& p) {
  if (action < 0 || action > 2) {
    throw InvalidAction("acrobot_step: action " + std::to_string(action));
  }
  const double torque = static_cast<double>(action - 1);
  EnvState cur = s;
  for (int i = 0; i < p.substeps; ++i) {
    double a1, a2;
    acrobot_accel(cur, torque, p, a1, a2);
    double w1 = cur[2] + p.dt * a1;
    double w2 = cur[3] + p.dt * a2;
    w1 = clamp(w1, -4.0 * kPi, 4.0 * kPi);
    w2 = clamp(w2, -9.0 * kPi, 9.0 * kPi);
    const double th1 = wrap_pi(cur[0] + p.dt * w1);
    const double th2 = wrap_pi(cur[1] + p.dt * w2);
    cur = EnvState::of({th1, th2, w1, w2});
  }
  StepResult r;
  r.next = cur;
  const double tip = -std::cos(cur[0]) - std::cos(cur[0] + cur[1]);
  if (tip >= 1.0) {
    r.reward = 0.0;
    r.terminal = true;
  } else {
    r.reward = -1.0;
    r.terminal = false;
  }
  return r;
}

std::vector<GridSpec> Acrobot::grids(int n_div, double sigma) const {
  return {GridSpec{-kPi, kPi, n_div, sigma}, GridSpec{-kPi, kPi, n_div, sigma},
          GridSpec{-4.0 * kPi, 4.0 * kPi, n_div, sigma},
          GridSpec{-9.0 * kPi, 9.0 * kPi, n_div, sigma}};
}

EnvState Acrobot::reset(std::mt19937_64&) const {
  return EnvState::of({0.0, 0.0, 0.0, 0.0});  // hanging straight down, at rest
}

StepResult Acrobot::step(const EnvState& s, int action) const {
  return acrobot_step(s, action, params_);
}

bool Acrobot::is_goal(const EnvState& s) const {
  return -std::cos(s[0]) - std::cos(s[0] + s[1]) >= 1.0;
}

std::unique_ptr<Environment> make_environment(const std::string& name) {
  if (name == "puddle") return std::make_unique<PuddleWorld>();
  if (name == "mountain") return std::make_unique<MountainCar>();
  if (name == "acrobot") return std::make_unique<Acrobot>();
  throw UnsupportedEnv("unknown environment '" + name + "'");
}

}  // namespace sparsetd
