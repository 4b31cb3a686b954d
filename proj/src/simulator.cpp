#include "tacgraph/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "tacgraph/errors.hpp"

namespace tacgraph {

namespace {

constexpr double kPenetrationTol = 1e-12;
constexpr double kReleaseTol = 1e-9;
constexpr double kGradTol = 1e-11;
constexpr double kSlipStep = 1e-4;  // max anchor move per slip sub-step, m

// Moment transport from the compliance center to the gripper origin.
Mat6 eta_shift(const Vec3& eta) {
  Mat6 b = Mat6::Identity();
  b.bottomLeftCorner<3, 3>() = -hat(eta);
  return b;
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  return Eigen::Quaterniond::FromTwoVectors(from, to).toRotationMatrix();
}

}  // namespace

// ---- ObjectModel -----------------------------------------------------------

bool ObjectModel::valid() const {
  if (vertices.empty()) return false;
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= static_cast<int>(vertices.size()) ||
        b >= static_cast<int>(vertices.size()))
      return false;
  }
  return grasp_height > 0.0;
}

double ObjectModel::shortest_edge() const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : edges)
    best = std::min(best, (vertices[a] - vertices[b]).norm());
  return best;
}

ObjectModel ObjectModel::rectangle() {
  ObjectModel m;
  m.name = "rectangle";
  double hx = 0.035 / 2.0, hy = 0.050 / 2.0;
  m.vertices = {{hx, hy, 0}, {-hx, hy, 0}, {-hx, -hy, 0}, {hx, -hy, 0}};
  m.edges = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  return m;
}

ObjectModel ObjectModel::hexagon() {
  ObjectModel m;
  m.name = "hexagon";
  double a = 0.0175;  // edge length = circumradius for a regular hexagon
  for (int i = 0; i < 6; ++i) {
    double ang = M_PI / 3.0 * i;
    m.vertices.push_back(Vec3(a * std::cos(ang), a * std::sin(ang), 0));
    m.edges.push_back({i, (i + 1) % 6});
  }
  return m;
}

ObjectModel ObjectModel::irregular(int index) {
  ObjectModel m;
  m.name = "irregular" + std::to_string(index);
  std::mt19937_64 rng(1000 + index);
  std::uniform_real_distribution<double> uj(-0.25, 0.25);
  std::uniform_real_distribution<double> ur(0.018, 0.030);
  int n = 5 + (index % 3);
  for (int i = 0; i < n; ++i) {
    double ang = 2.0 * M_PI * (i + uj(rng)) / n;
    double r = ur(rng);
    m.vertices.push_back(Vec3(r * std::cos(ang), r * std::sin(ang), 0));
    m.edges.push_back({i, (i + 1) % n});
  }
  // Recentre on the footprint centroid.
  Vec3 c = Vec3::Zero();
  for (const auto& v : m.vertices) c += v;
  c /= double(n);
  for (auto& v : m.vertices) v -= c;
  return m;
}

ObjectModel ObjectModel::by_name(const std::string& name) {
  if (name == "rectangle") return rectangle();
  if (name == "hexagon") return hexagon();
  if (name.rfind("irregular", 0) == 0) {
    int idx = std::atoi(name.c_str() + 9);
    if (idx < 1 || idx > 9) throw ConfigError("unknown object: " + name);
    return irregular(idx);
  }
  throw ConfigError("unknown object: " + name);
}

// ---- ContactSimulator -------------------------------------------------------

ContactSimulator::ContactSimulator(ObjectModel object, Params params,
                                   const Pose& rest_in_gripper,
                                   const Pose& initial_gripper)
    : model_(std::move(object)),
      params_(std::move(params)),
      rest_in_gripper_(rest_in_gripper),
      gripper_(initial_gripper) {
  if (!model_.valid()) throw ConfigError("invalid object model");
  if (!params_.grasp.valid())
    throw ConfigError("true grasp stiffness must be positive");
  object_ = resting();
  resolve_contacts(gripper_, object_, anchors_, forces_);
}

Vec6 ContactSimulator::shifted_displacement(const Pose& g,
                                            const Pose& o) const {
  Vec6 d = log_se3(rest_in_gripper_ * o.inverse() * g);
  return eta_shift(params_.grasp.eta) * d;
}

double ContactSimulator::elastic_of(const Pose& g, const Pose& o) const {
  Vec6 dh = shifted_displacement(g, o);
  Vec6 dh2 = dh.cwiseAbs2();
  return 0.5 * dh2.dot(params_.grasp.stiffness()) +
         0.25 * dh2.cwiseProduct(dh2).dot(params_.stiffening);
}

double ContactSimulator::energy_of(const Pose& g, const Pose& o) const {
  double e = elastic_of(g, o);
  if (params_.weight > 0.0) e += params_.weight * o.act(model_.com).z();
  return e;
}

Vec6 ContactSimulator::generalized_force(const Pose& g, const Pose& o) const {
  Vec6 d = log_se3(rest_in_gripper_ * o.inverse() * g);
  Mat6 b = eta_shift(params_.grasp.eta);
  Vec6 dh = b * d;
  Vec6 w_raw = params_.grasp.stiffness().cwiseProduct(dh) +
               params_.stiffening.cwiseProduct(dh.cwiseAbs2().cwiseProduct(dh));
  // Spring wrench on the object about the world origin.
  Vec6 w = g.inverse().adjoint().transpose() *
           (right_jacobian_inv_se3(d).transpose() * (b.transpose() * w_raw));
  if (params_.weight > 0.0) {
    Vec3 x = o.act(model_.com);
    w.head<3>() -= params_.weight * hat(x) * Vec3::UnitZ();
    w.tail<3>() -= params_.weight * Vec3::UnitZ();
  }
  return w;
}

ContactSimulator::Reduced ContactSimulator::reduced_basis(
    const std::vector<Anchor>& anchors) const {
  Reduced r;
  if (anchors.empty()) {
    r.basis = Mat6::Identity();
    r.dof = 6;
  } else if (anchors.size() == 1) {
    r.basis = MatX(6, 3);
    r.basis.topRows<3>() = Mat3::Identity();
    r.basis.bottomRows<3>() = hat(anchors[0].world);
    r.dof = 3;
  } else if (anchors.size() == 2) {
    Vec3 u = (anchors[1].world - anchors[0].world).normalized();
    r.basis = MatX(6, 1);
    r.basis.col(0).head<3>() = u;
    r.basis.col(0).tail<3>() = anchors[0].world.cross(u);
    r.dof = 1;
  } else {
    r.basis = MatX(6, 0);
    r.dof = 0;
  }
  return r;
}

Pose ContactSimulator::project_to_anchors(
    const Pose& o, const std::vector<Anchor>& anchors) const {
  if (anchors.empty()) return o;
  if (anchors.size() == 1) {
    const Vec3& p = model_.vertices[anchors[0].vertex];
    return Pose(o.rotation(), anchors[0].world - o.rotation() * p);
  }
  if (anchors.size() == 2) {
    const Vec3& p0 = model_.vertices[anchors[0].vertex];
    const Vec3& p1 = model_.vertices[anchors[1].vertex];
    Vec3 v_obj = o.rotation() * (p1 - p0);
    Vec3 v_world = anchors[1].world - anchors[0].world;
    Mat3 fix = rotation_between(v_obj, v_world);
    Mat3 rot = fix * o.rotation();
    return Pose(rot, anchors[0].world - rot * p0);
  }
  // Patch: rigid alignment of all anchored vertices (Kabsch).
  Vec3 pc = Vec3::Zero(), ac = Vec3::Zero();
  for (const auto& a : anchors) {
    pc += model_.vertices[a.vertex];
    ac += a.world;
  }
  pc /= double(anchors.size());
  ac /= double(anchors.size());
  Mat3 h = Mat3::Zero();
  for (const auto& a : anchors)
    h += (model_.vertices[a.vertex] - pc) * (a.world - ac).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rot = svd.matrixV() * svd.matrixU().transpose();
  if (rot.determinant() < 0) {
    Mat3 v = svd.matrixV();
    v.col(2) *= -1;
    rot = v * svd.matrixU().transpose();
  }
  return Pose(rot, ac - rot * pc);
}

Pose ContactSimulator::minimize(const Pose& g, Pose o,
                                const std::vector<Anchor>& anchors,
                                std::optional<int> touchdown_vertex) const {
  Reduced red = reduced_basis(anchors);
  o = project_to_anchors(o, anchors);
  if (red.dof == 0) return o;

  const Vec6 s = params_.grasp.stiffness();
  const Mat6 b = eta_shift(params_.grasp.eta);
  double lambda = 1e-9;
  double merit_penalty = 1e3;

  auto merit = [&](const Pose& cand) {
    double m = energy_of(g, cand);
    if (touchdown_vertex)
      m += merit_penalty *
           std::abs(cand.act(model_.vertices[*touchdown_vertex]).z());
    return m;
  };

  double current = merit(o);
  for (int iter = 0; iter < 200; ++iter) {
    Vec6 d = log_se3(rest_in_gripper_ * o.inverse() * g);
    Vec6 dh = b * d;
    Vec6 w_res = s.cwiseProduct(dh) +
                 params_.stiffening.cwiseProduct(dh.cwiseAbs2().cwiseProduct(dh));
    Vec6 w_stiff =
        s + 3.0 * params_.stiffening.cwiseProduct(dh.cwiseAbs2());
    // d(dh)/d(theta) through the left perturbation of o.
    MatX jd = -(right_jacobian_inv_se3(d) * g.inverse().adjoint()) * red.basis;
    MatX jdh = b * jd;
    VecX grad = jdh.transpose() * w_res;
    MatX h = jdh.transpose() * w_stiff.asDiagonal() * jdh;
    if (params_.weight > 0.0) {
      Vec3 x = o.act(model_.com);
      Vec6 gg;
      gg.head<3>() = hat(x) * Vec3::UnitZ();
      gg.tail<3>() = Vec3::UnitZ();
      grad += params_.weight * red.basis.transpose() * gg;
    }

    VecX delta;
    double zk = 0.0;
    if (touchdown_vertex) {
      Vec3 x = o.act(model_.vertices[*touchdown_vertex]);
      zk = x.z();
      MatX dz = Eigen::RowVector3d(0, 0, 1) *
                ((MatX(3, 6) << -hat(x), Mat3::Identity()).finished() *
                 red.basis);
      MatX kkt = MatX::Zero(red.dof + 1, red.dof + 1);
      kkt.topLeftCorner(red.dof, red.dof) =
          h + lambda * MatX::Identity(red.dof, red.dof);
      kkt.topRightCorner(red.dof, 1) = dz.transpose();
      kkt.bottomLeftCorner(1, red.dof) = dz;
      VecX rhs(red.dof + 1);
      rhs << -grad, -zk;
      delta = kkt.colPivHouseholderQr().solve(rhs).head(red.dof);
    } else {
      MatX hd = h + lambda * MatX::Identity(red.dof, red.dof);
      delta = hd.ldlt().solve(-grad);
    }

    if (grad.norm() < kGradTol && std::abs(zk) < kPenetrationTol &&
        iter > 0)
      break;

    Pose cand =
        project_to_anchors(exp_se3(Vec6(red.basis * delta)) * o, anchors);
    double m_cand = merit(cand);
    if (m_cand <= current + 1e-18) {
      o = cand;
      current = m_cand;
      lambda = std::max(lambda / 3.0, 1e-12);
    } else {
      lambda *= 10.0;
      if (lambda > 1e8) break;
    }
  }
  return o;
}

std::vector<Vec3> ContactSimulator::distribute_forces(
    const Pose& g, const Pose& o, const std::vector<Anchor>& anchors) const {
  std::vector<Vec3> forces(anchors.size(), Vec3::Zero());
  if (anchors.empty()) return forces;
  int n = static_cast<int>(anchors.size());
  MatX a = MatX::Zero(6, 3 * n);
  for (int j = 0; j < n; ++j) {
    a.block<3, 3>(0, 3 * j) = hat(anchors[j].world);  // torque rows
    a.block<3, 3>(3, 3 * j) = Mat3::Identity();       // force rows
  }
  Vec6 b = -generalized_force(g, o);
  VecX f = a.completeOrthogonalDecomposition().solve(b);
  for (int j = 0; j < n; ++j) forces[j] = f.segment<3>(3 * j);
  return forces;
}

void ContactSimulator::resolve_contacts(const Pose& g, Pose& o,
                                        std::vector<Anchor>& anchors,
                                        std::vector<Vec3>& forces) const {
  for (int outer = 0; outer < 16; ++outer) {
    o = minimize(g, o, anchors, std::nullopt);

    // Contact gain: most-penetrating inactive vertex.
    int worst = -1;
    double worst_z = -kPenetrationTol;
    for (int k = 0; k < static_cast<int>(model_.vertices.size()); ++k) {
      bool anchored = std::any_of(anchors.begin(), anchors.end(),
                                  [&](const Anchor& a) { return a.vertex == k; });
      if (anchored) continue;
      double z = o.act(model_.vertices[k]).z();
      if (z < worst_z) {
        worst_z = z;
        worst = k;
      }
    }
    if (worst >= 0) {
      if (reduced_basis(anchors).dof > 0) {
        o = minimize(g, o, anchors, worst);
      }
      Vec3 x = o.act(model_.vertices[worst]);
      if (x.z() < -1e-6)
        throw Error("simulator: unresolvable penetration at vertex " +
                    std::to_string(worst));
      anchors.push_back(Anchor{worst, Vec3(x.x(), x.y(), 0.0)});
      continue;
    }

    // Release: anchors pulling down on the object cannot stick.
    forces = distribute_forces(g, o, anchors);
    int release = -1;
    double most_negative = -kReleaseTol;
    for (int j = 0; j < static_cast<int>(anchors.size()); ++j) {
      if (forces[j].z() < most_negative) {
        most_negative = forces[j].z();
        release = j;
      }
    }
    if (release >= 0) {
      anchors.erase(anchors.begin() + release);
      continue;
    }
    return;
  }
  throw Error("simulator: active-set resolution did not settle");
}

void ContactSimulator::apply_friction() {
  forces_ = distribute_forces(gripper_, object_, anchors_);
  // Patch contact: motion is frozen by protocol; no slip model needed there.
  if (anchors_.empty() || anchors_.size() >= 3) return;
  const double mu = params_.mu;
  const double k_ref = params_.grasp.k.mean();
  for (int iter = 0; iter < 3000; ++iter) {
    bool moved = false;
    for (size_t j = 0; j < anchors_.size(); ++j) {
      double fn = std::max(forces_[j].z(), 0.0);
      Vec2 ft(forces_[j].x(), forces_[j].y());
      double excess = ft.norm() - mu * fn;
      if (excess > std::max(1e-12, mu * fn * 1e-9) && ft.norm() > 1e-12) {
        // The vertex slides along the grasp pull, opposite the friction
        // force, far enough to bring the force back to the cone boundary.
        double step = std::clamp(0.9 * excess / k_ref, 1e-9, kSlipStep);
        Vec2 dir = -ft.normalized();
        anchors_[j].world.x() += step * dir.x();
        anchors_[j].world.y() += step * dir.y();
        moved = true;
      }
    }
    if (!moved) return;
    if (getenv("TG_DBG") && iter % 50 == 0) {
      for (size_t j = 0; j < anchors_.size(); ++j)
        fprintf(stderr, "slip iter=%d j=%zu f=(%.5f,%.5f,%.5f) a=(%.5f,%.5f)\n",
                iter, j, forces_[j].x(), forces_[j].y(), forces_[j].z(),
                anchors_[j].world.x(), anchors_[j].world.y());
    }
    if (anchors_.size() == 2) {
      // Keep the anchor pair rigidly consistent with the object edge.
      double len = (model_.vertices[anchors_[1].vertex] -
                    model_.vertices[anchors_[0].vertex])
                       .norm();
      Vec3 u = (anchors_[1].world - anchors_[0].world).normalized();
      anchors_[1].world = anchors_[0].world + len * u;
      anchors_[1].world.z() = 0.0;
    }
    resolve_contacts(gripper_, object_, anchors_, forces_);
    forces_ = distribute_forces(gripper_, object_, anchors_);
    if (anchors_.size() >= 3 || anchors_.empty()) return;
  }
  throw Error("simulator: slip iteration did not converge");
}

void ContactSimulator::step(const Pose& gripper) {
  gripper_ = gripper;
  resolve_contacts(gripper_, object_, anchors_, forces_);
  apply_friction();
  forces_ = distribute_forces(gripper_, object_, anchors_);
  // Slip metrics relative to the first anchoring of each vertex.
  for (const auto& a : anchors_) {
    if (!first_anchor_.count(a.vertex)) first_anchor_[a.vertex] = a.world;
  }
  if (anchors_.size() >= 2 && !line_reference_) {
    Vec3 u = anchors_[1].world - anchors_[0].world;
    line_reference_ = std::atan2(u.y(), u.x());
  }
  ++step_index_;
}

ContactSimulator::Probe ContactSimulator::probe(const Pose& gripper) const {
  Probe out;
  Pose o = object_;
  std::vector<Anchor> anchors = anchors_;
  std::vector<Vec3> forces;
  resolve_contacts(gripper, o, anchors, forces);
  out.object = o;
  out.energy = elastic_of(gripper, o);
  out.in_contact = !anchors.empty();
  for (const auto& f : forces) out.net_force += f;
  return out;
}

MeasurementSample ContactSimulator::measure(const MeasurementNoise& noise,
                                            std::mt19937_64& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec6 gn;
  for (int i = 0; i < 3; ++i) gn(i) = noise.gripper_rot * gauss(rng);
  for (int i = 3; i < 6; ++i) gn(i) = noise.gripper_trn * gauss(rng);
  Vec6 tn;
  for (int i = 0; i < 6; ++i) tn(i) = noise.tactile * gauss(rng);
  MeasurementSample s;
  s.gripper = gripper_.retract(gn);
  s.tactile = Twist(Vec6(tactile().vector() + tn));
  s.step = step_index_;
  return s;
}

Vec6 ContactSimulator::ft_ground_truth() const {
  Vec6 w = Vec6::Zero();
  for (size_t j = 0; j < anchors_.size(); ++j) {
    w.head<3>() += anchors_[j].world.cross(forces_[j]);
    w.tail<3>() += forces_[j];
  }
  return w;
}

Formation ContactSimulator::formation() const {
  if (anchors_.size() <= 1) return Formation::Point;
  if (anchors_.size() == 2) return Formation::Line;
  return Formation::Patch;
}

Vec6 ContactSimulator::intrinsic_wrench() const {
  Vec6 d = log_se3(rest_in_gripper_ * object_.inverse() * gripper_);
  Mat6 b = eta_shift(params_.grasp.eta);
  Vec6 dh = b * d;
  Vec6 w_raw = params_.grasp.stiffness().cwiseProduct(dh) +
               params_.stiffening.cwiseProduct(dh.cwiseAbs2().cwiseProduct(dh));
  // Wrench transmitted at the compliance center, gripper-frame components.
  Mat6 b_inv_t = eta_shift(params_.grasp.eta).inverse().transpose();
  return b_inv_t * right_jacobian_inv_se3(d).transpose() * b.transpose() *
         w_raw;
}

Twist ContactSimulator::tactile() const {
  return tactile_displacement(gripper_, resting(), object_);
}

double ContactSimulator::zeta() const {
  if (anchors_.empty()) return 0.0;
  Pose c(Mat3::Identity(), anchors_[0].world);
  return offset_distance(resting(), object_, c);
}

double ContactSimulator::elastic_energy() const {
  return elastic_of(gripper_, object_);
}

double ContactSimulator::tangential_normal_ratio() const {
  Vec6 ft = ft_ground_truth();
  double fn = ft.tail<3>().z();
  if (fn <= 1e-12) return 0.0;
  return std::hypot(ft(3), ft(4)) / fn;
}

double ContactSimulator::balance_residual() const {
  if (anchors_.empty()) return generalized_force(gripper_, object_).norm();
  Vec6 contact = ft_ground_truth();
  return (generalized_force(gripper_, object_) + contact).norm();
}

double ContactSimulator::min_vertex_height() const {
  double z = std::numeric_limits<double>::infinity();
  for (const auto& p : model_.vertices)
    z = std::min(z, object_.act(p).z());
  return z;
}

bool ContactSimulator::energy_minimality_check(std::mt19937_64& rng,
                                               int samples,
                                               double magnitude) const {
  Reduced red = reduced_basis(anchors_);
  if (red.dof == 0) return true;
  double e0 = energy_of(gripper_, object_);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < samples; ++i) {
    VecX theta(red.dof);
    for (int j = 0; j < red.dof; ++j) theta(j) = gauss(rng);
    theta *= magnitude / std::max(theta.norm(), 1e-12);
    Pose pert = project_to_anchors(
        exp_se3(Vec6(red.basis * theta)) * object_, anchors_);
    if (energy_of(gripper_, pert) < e0 - 1e-14) return false;
  }
  return true;
}

double ContactSimulator::slipped_distance() const {
  if (first_anchor_.empty()) return 0.0;
  double total = 0.0;
  int n = 0;
  for (const auto& a : anchors_) {
    auto it = first_anchor_.find(a.vertex);
    if (it == first_anchor_.end()) continue;
    total += (a.world - it->second).head<2>().norm();
    ++n;
  }
  return n > 0 ? total / n : 0.0;
}

double ContactSimulator::slipped_rotation() const {
  if (!line_reference_ || anchors_.size() < 2) return 0.0;
  Vec3 u = anchors_[1].world - anchors_[0].world;
  double ang = std::atan2(u.y(), u.x()) - *line_reference_;
  while (ang > M_PI) ang -= 2 * M_PI;
  while (ang < -M_PI) ang += 2 * M_PI;
  return std::abs(ang);
}

}  // namespace tacgraph
