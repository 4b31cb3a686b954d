#include "tacgraph/noise.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tacgraph/errors.hpp"

namespace tacgraph {

namespace {

using nlohmann::json;

Vec6 vec6(double rot, double trn) {
  Vec6 v;
  v << rot, rot, rot, trn, trn, trn;
  return v;
}

json to_json_vec(const VecX& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VecX from_json_vec(const json& a) {
  VecX v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

json entries_to_json(const NoiseEntries& e) {
  return json{{"prior_grasp", to_json_vec(e.prior_grasp)},
              {"prior_object", to_json_vec(e.prior_object)},
              {"gripper_pose", to_json_vec(e.gripper_pose)},
              {"tactile_total", to_json_vec(e.tactile_total)},
              {"tactile_incremental", to_json_vec(e.tactile_incremental)},
              {"contact_in_object", to_json_vec(e.contact_in_object)},
              {"contact_on_env", to_json_vec(e.contact_on_env)},
              {"torque", to_json_vec(e.torque)},
              {"wrench_total", to_json_vec(e.wrench_total)},
              {"wrench_incremental", to_json_vec(e.wrench_incremental)},
              {"rest_rigidity", to_json_vec(e.rest_rigidity)},
              {"contact_convention", to_json_vec(e.contact_convention)},
              {"desired_rotation", to_json_vec(e.desired_rotation)},
              {"motion_effort", to_json_vec(e.motion_effort)},
              {"tactile_energy", to_json_vec(e.tactile_energy)},
              {"contact_maintenance", e.contact_maintenance},
              {"detection_scale", e.detection_scale}};
}

NoiseEntries entries_from_json(const json& j, NoiseEntries base) {
  auto fixed = [&](const char* name, auto& field) {
    if (j.contains(name)) {
      VecX v = from_json_vec(j.at(name));
      if (v.size() != field.size())
        throw ConfigError(std::string("noise entry '") + name +
                          "' has wrong dimension");
      field = v;
    }
  };
  fixed("prior_grasp", base.prior_grasp);
  fixed("prior_object", base.prior_object);
  fixed("gripper_pose", base.gripper_pose);
  fixed("tactile_total", base.tactile_total);
  fixed("tactile_incremental", base.tactile_incremental);
  fixed("contact_in_object", base.contact_in_object);
  fixed("contact_on_env", base.contact_on_env);
  fixed("wrench_total", base.wrench_total);
  fixed("wrench_incremental", base.wrench_incremental);
  fixed("rest_rigidity", base.rest_rigidity);
  fixed("desired_rotation", base.desired_rotation);
  fixed("motion_effort", base.motion_effort);
  fixed("tactile_energy", base.tactile_energy);
  if (j.contains("torque")) base.torque = from_json_vec(j.at("torque"));
  if (j.contains("contact_convention"))
    base.contact_convention = from_json_vec(j.at("contact_convention"));
  if (j.contains("contact_maintenance"))
    base.contact_maintenance = j.at("contact_maintenance").get<double>();
  if (j.contains("detection_scale"))
    base.detection_scale = j.at("detection_scale").get<double>();
  if (!base.all_positive())
    throw ConfigError("noise profile entries must be positive");
  return base;
}

}  // namespace

bool NoiseEntries::all_positive() const {
  auto ok = [](const VecX& v) { return (v.array() > 0.0).all(); };
  return ok(prior_grasp) && ok(prior_object) && ok(gripper_pose) &&
         ok(tactile_total) && ok(tactile_incremental) &&
         ok(contact_in_object) && ok(contact_on_env) &&
         (torque.size() == 0 || ok(torque)) && ok(wrench_total) &&
         ok(wrench_incremental) && ok(rest_rigidity) &&
         ok(contact_convention) && ok(desired_rotation) && ok(motion_effort) &&
         ok(tactile_energy) && contact_maintenance > 0.0 &&
         detection_scale > 0.0;
}

NoiseProfile NoiseProfile::defaults() {
  NoiseEntries e;
  e.prior_grasp << 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.005, 0.005, 0.005;
  e.prior_object = vec6(0.2, 0.05);
  e.gripper_pose = vec6(1e-4, 1e-4);
  e.tactile_total = vec6(1e-4, 1e-4);
  e.tactile_incremental = vec6(1e-4, 1e-4);
  e.contact_in_object = vec6(1e-5, 1e-5);
  // Strong cost perpendicular to the surface, loose tangentially.
  e.contact_on_env = Vec6();
  e.contact_on_env << 1e-3, 1e-3, 1e-3, 1e-3, 1e-3, 1e-5;
  e.torque = VecX::Constant(3, 1e-2);
  e.wrench_total = vec6(2e-2, 2e-2);
  e.wrench_incremental = vec6(1e-3, 1e-3);
  e.rest_rigidity = vec6(1e-6, 1e-6);
  e.contact_convention = VecX::Constant(3, 1e-6);
  e.desired_rotation = Vec3::Constant(1e-2);
  // Weak on rotation so the commanded pivot is not suppressed; tight on
  // translation at the contact to prevent scrubbing.
  e.motion_effort = vec6(1e-1, 1e-3);
  e.tactile_energy = vec6(1e-2, 1e-2);
  e.contact_maintenance = 1e-4;
  e.detection_scale = 1e-2;

  NoiseProfile p;
  p.point = e;

  p.line = e;
  p.line.torque = VecX::Constant(1, 1e-2);
  p.line.contact_convention = VecX::Constant(2, 1e-6);

  p.patch = e;
  p.patch.torque = VecX();
  p.patch.contact_convention = VecX::Constant(2, 1e-6);
  return p;
}

void NoiseProfile::scale_tactile_energy(double factor) {
  point.tactile_energy *= factor;
  line.tactile_energy *= factor;
  patch.tactile_energy *= factor;
}

void NoiseProfile::remove_wrench_slack() {
  point.wrench_total = point.wrench_incremental;
  line.wrench_total = line.wrench_incremental;
  patch.wrench_total = patch.wrench_incremental;
}

std::string NoiseProfile::to_json() const {
  json j{{"point", entries_to_json(point)},
         {"line", entries_to_json(line)},
         {"patch", entries_to_json(patch)}};
  return j.dump(2);
}

NoiseProfile NoiseProfile::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("noise profile parse error: ") + e.what());
  }
  NoiseProfile p = defaults();
  if (j.contains("point")) p.point = entries_from_json(j["point"], p.point);
  if (j.contains("line")) p.line = entries_from_json(j["line"], p.line);
  if (j.contains("patch")) p.patch = entries_from_json(j["patch"], p.patch);
  return p;
}

NoiseProfile NoiseProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open noise profile: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

}  // namespace tacgraph
