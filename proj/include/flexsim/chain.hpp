#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexsim/dynamics.hpp"

namespace flexsim {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tait-Bryan joint R_pk = R_s0(a0) R_s1(a1) R_s2(a2); translation fully constrained.
struct JointSpec {
  int parent = -1;  // -1 is the ground
  std::array<int, 3> sequence{2, 1, 0};
  std::array<bool, 3> free{true, true, false};
  std::array<double, 3> motor_inertia{0.0, 0.0, 0.0};

  int n_free() const;
  int n_constrained_rot() const { return 3 - n_free(); }
  int n_rows() const { return 3 + n_constrained_rot(); }

  // Child-frame rotational projector diag(0,1,1) style: 1 marks a free body axis.
  static JointSpec from_projection(int parent, const Mat3& P, const std::array<double, 3>& motor_inertia_by_axis);
};

Mat3 tait_bryan(const std::array<int, 3>& seq, const Vec3& angles);
Vec3 tait_bryan_angles(const std::array<int, 3>& seq, const Mat3& R);
// omega_rel (child frame) = E * angle rates.
Mat3 euler_rate_map(const std::array<int, 3>& seq, const Vec3& angles);

struct LinkState {
  Vec3 theta = Vec3::Zero();
  Vec3 p = Vec3::Zero();
  Twist V = Twist::Zero();
  VecX q;
  VecX qd;

  Mat3 R() const { return exp_so3(theta); }
  LinkMotion motion() const { return {R(), V, q, qd}; }
};

struct ChainState {
  double t = 0.0;
  std::vector<LinkState> links;
};

struct Baumgarte {
  double omega = 50.0;
  double zeta = 1.0;
};

struct Chain {
  std::vector<LinkModel> links;
  std::vector<JointSpec> joints;  // joints[i] connects links[i] to its parent
  Vec3 g_eq = Vec3::Zero();
  Baumgarte baumgarte;
  bool project_velocities = true;

  int n_links() const { return static_cast<int>(links.size()); }
};

// Applied inputs held constant over one step.
struct ChainInputs {
  std::vector<VecX> joint_torques;  // per joint, one entry per free angle
  std::vector<Wrench> extra;        // optional extra wrench per link
};

ChainInputs zero_inputs(const Chain& chain);

struct JointGeometry {
  Mat3 R_pk = Mat3::Identity();
  Vec3 angles = Vec3::Zero();
  Mat3 E = Mat3::Identity();
  Mat3 Einv = Mat3::Identity();
  Vec3 r_tip = Vec3::Zero();   // parent tip point r_ib(c), parent frame
  MatX Phi_tip;                // parent 3 x n shapes at c
  Mat3 R_parent = Mat3::Identity();
  Vec3 p_parent_tip = Vec3::Zero();
};

JointGeometry joint_geometry(const Chain& chain, const ChainState& s, int j);

// Motor axes in the child frame, one per free angle.
std::vector<Vec3> motor_axes(const JointSpec& spec, const JointGeometry& jg);

struct Evaluation {
  std::vector<Twist> Vdot;
  std::vector<VecX> qdd;
  std::vector<VecX> lambda;
  std::vector<Wrench> W_applied;    // per link, body frame
  std::vector<Wrench> W_J;          // per link interaction wrench as in M Vdot + ... + W_J = W
  std::vector<VecX> Q_J;            // per link modal joint forces
  std::vector<Wrench> W_base_view;  // per joint, child frame at the joint
  std::vector<Wrench> W_tip_view;   // per joint, parent frame at the parent's tip point
  std::vector<VecX> velocity_residual;
  std::vector<VecX> position_error;
  double condition = 0.0;
};

Evaluation evaluate(const Chain& chain, const ChainState& s, const ChainInputs& in);

// Joint-side rows of the velocity constraint (G x) per joint.
std::vector<VecX> constraint_residuals(const Chain& chain, const ChainState& s);

struct StepResult {
  ChainState next;
  Evaluation eval;  // at the start of the step
};

StepResult solve_constrained_step(const Chain& chain, const ChainState& s, const ChainInputs& in, double dt);

// Removes the constraint-violating part of the velocities (least squares).
void project_velocities(const Chain& chain, ChainState& s);

// Initial state from joint angles (per joint, full Tait-Bryan triple), at rest and undeformed.
ChainState initial_state(const Chain& chain, const std::vector<Vec3>& joint_angles);

// Joint angle triples of the current configuration.
std::vector<Vec3> joint_angles(const Chain& chain, const ChainState& s);

double kinetic_energy(const Chain& chain, const ChainState& s);
double potential_energy(const Chain& chain, const ChainState& s);

// Inertial position of a point xi on link i including deformation.
Vec3 point_position(const Chain& chain, const ChainState& s, int i, double xi);

}  // namespace flexsim
