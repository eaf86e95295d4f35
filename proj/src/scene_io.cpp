#include "dexfit/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace dexfit {

namespace fs = std::filesystem;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

namespace {

Json vec(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vec_from(const Json& j, Eigen::Index expected = -1) {
  if (!j.is_array()) throw Error("expected a number array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected)
    throw Error("expected " + std::to_string(expected) + " numbers, got " + std::to_string(j.size()));
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j[i].get<double>();
  return v;
}

Vec3 vec3_from(const Json& j) { return vec_from(j, 3); }

Json matrix(const Eigen::MatrixXd& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>(), cols = j.at("cols").get<Eigen::Index>();
  const Eigen::VectorXd data = vec_from(j.at("data"), rows * cols);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  return m;
}

Json anchor_json(const std::optional<SurfaceAnchor>& a) {
  if (!a) return nullptr;
  return Json{{"face", a->face}, {"bary", vec(a->bary)}};
}

std::optional<SurfaceAnchor> anchor_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return SurfaceAnchor{j.at("face").get<int>(), vec3_from(j.at("bary"))};
}

Json keypoint_json(const Keypoint2D& k) {
  return Json::array({k.pixel.x(), k.pixel.y(), k.visible ? 1 : 0});
}

Keypoint2D keypoint_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw Error("keypoint must be [u, v, visible]");
  return {Vec2(j[0].get<double>(), j[1].get<double>()), j[2].get<int>() != 0};
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const char* what) {
  if (!j.is_object()) throw Error(std::string(what) + " must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw Error(std::string("unknown key '") + key + "' in " + what);
  }
}

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void read_opt_vec3(const Json& j, const char* key, Vec3& out) {
  if (j.contains(key)) out = vec3_from(j.at(key));
}

}  // namespace

Json to_json(const CameraView& v) {
  Json rot = Json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(v.rotation()(r, c));
  return Json{{"fx", v.fx()},         {"fy", v.fy()},         {"cx", v.cx()},
              {"cy", v.cy()},         {"width", v.width()},   {"height", v.height()},
              {"rotation", rot},      {"translation", vec(v.translation())}};
}

CameraView camera_from_json(const Json& j) {
  const Eigen::VectorXd r = vec_from(j.at("rotation"), 9);
  Mat3 rot;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) rot(a, b) = r[3 * a + b];
  return CameraView(j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("cx").get<double>(),
                    j.at("cy").get<double>(), j.at("width").get<int>(), j.at("height").get<int>(),
                    rot, vec3_from(j.at("translation")));
}

Json to_json(const RigidPose& p) {
  return Json{{"rotation", vec(p.rotation)}, {"translation", vec(p.translation)}};
}

RigidPose rigid_pose_from_json(const Json& j) {
  return RigidPose{vec3_from(j.at("rotation")), vec3_from(j.at("translation"))};
}

Json to_json(const ScenePose& pose) {
  Json hands = Json::array(), objects = Json::array();
  for (const auto& h : pose.hands) hands.push_back(vec(h));
  for (const auto& o : pose.objects) objects.push_back(to_json(o));
  return Json{{"hands", hands}, {"objects", objects}};
}

ScenePose scene_pose_from_json(const Json& j) {
  ScenePose pose;
  for (const auto& h : j.at("hands")) pose.hands.push_back(vec_from(h));
  for (const auto& o : j.at("objects")) pose.objects.push_back(rigid_pose_from_json(o));
  return pose;
}

Json to_json(const AnnotationSet& ann) {
  Json views = Json::array();
  for (const auto& v : ann.views) {
    Json hands = Json::array(), objects = Json::array();
    for (const auto& h : v.hands) {
      Json kps = Json::array();
      for (const auto& k : h) kps.push_back(keypoint_json(k));
      hands.push_back(kps);
    }
    for (const auto& o : v.objects) {
      Json kps = Json::array();
      for (const auto& k : o) kps.push_back(keypoint_json(k));
      objects.push_back(kps);
    }
    views.push_back(Json{{"hands", hands}, {"objects", objects}});
  }
  Json anchors = Json::array();
  for (const auto& a : ann.anchors) anchors.push_back(Json::array({anchor_json(a[0]), anchor_json(a[1])}));
  return Json{{"views", views}, {"anchors", anchors}};
}

AnnotationSet annotations_from_json(const Json& j) {
  AnnotationSet ann;
  for (const auto& v : j.at("views")) {
    AnnotationSet::View view;
    for (const auto& h : v.at("hands")) {
      if (h.size() != kJointCount) throw Error("hand annotation needs 21 keypoints");
      HandKeypoints kps;
      for (int i = 0; i < kJointCount; ++i) kps[i] = keypoint_from(h[i]);
      view.hands.push_back(kps);
    }
    for (const auto& o : v.at("objects")) {
      if (o.size() != kObjectKeypoints) throw Error("object annotation needs 2 keypoints");
      ObjectKeypoints kps;
      for (int i = 0; i < kObjectKeypoints; ++i) kps[i] = keypoint_from(o[i]);
      view.objects.push_back(kps);
    }
    ann.views.push_back(std::move(view));
  }
  for (const auto& a : j.at("anchors")) {
    if (a.size() != kObjectKeypoints) throw Error("each object needs 2 anchor slots");
    ann.anchors.push_back({anchor_from(a[0]), anchor_from(a[1])});
  }
  return ann;
}

Json to_json(const GraspSet& grasps) {
  Json out = Json::array();
  for (const auto& g : grasps)
    out.push_back(Json{{"t", vec(g.t)}, {"q", Json::array({g.q.w(), g.q.x(), g.q.y(), g.q.z()})}});
  return out;
}

GraspSet grasps_from_json(const Json& j) {
  GraspSet out;
  for (const auto& g : j) {
    const Eigen::VectorXd q = vec_from(g.at("q"), 4);
    Grasp grasp;
    grasp.t = vec3_from(g.at("t"));
    grasp.q = Eigen::Quaterniond(q[0], q[1], q[2], q[3]);
    if (std::abs(grasp.q.norm() - 1.0) > 1e-6) throw Error("grasp quaternion is not unit length");
    grasp.q.normalize();
    out.push_back(grasp);
  }
  return out;
}

Json to_json(const GripperTemplate& gripper) {
  Json pts = Json::array();
  for (const auto& p : gripper.points) pts.push_back(vec(p));
  return Json{{"points", pts}};
}

GripperTemplate gripper_from_json(const Json& j) {
  GripperTemplate g;
  for (const auto& p : j.at("points")) g.points.push_back(vec3_from(p));
  if (g.points.empty()) throw Error("gripper template has no points");
  return g;
}

Json to_json(const SolveConfig& c) {
  return Json{{"learning_rate", c.learning_rate}, {"iterations", c.iterations}, {"beta1", c.beta1},
              {"beta2", c.beta2},                 {"eps", c.eps}};
}

SolveConfig solve_config_from_json(const Json& j) {
  check_keys(j, {"learning_rate", "iterations", "beta1", "beta2", "eps"}, "solver config");
  SolveConfig c;
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "iterations", c.iterations);
  read_opt(j, "beta1", c.beta1);
  read_opt(j, "beta2", c.beta2);
  read_opt(j, "eps", c.eps);
  c.validate();
  return c;
}

Json to_json(const SceneSpec& s) {
  Json objects = Json::array(), hands = Json::array();
  for (const auto& o : s.objects)
    objects.push_back(Json{{"shape", o.shape},
                           {"size", o.size},
                           {"pose", to_json(o.pose)},
                           {"velocity", vec(o.velocity)},
                           {"angular_velocity", vec(o.angular_velocity)}});
  for (const auto& h : s.hands)
    hands.push_back(Json{{"root_rotation", vec(h.root_rotation)},
                         {"root_translation", vec(h.root_translation)},
                         {"articulation", h.articulation},
                         {"velocity", vec(h.velocity)},
                         {"beta", vec(h.beta)},
                         {"sides", h.sides},
                         {"rings", h.rings}});
  const auto& r = s.rig;
  return Json{{"seed", s.seed},
              {"frames", s.frames},
              {"rig",
               {{"views", r.views},
                {"radius", r.radius},
                {"height", r.height},
                {"target", vec(r.target)},
                {"fx", r.fx},
                {"fy", r.fy},
                {"width", r.width},
                {"height_px", r.height_px}}},
              {"noise", {{"depth_mm", s.noise.depth_mm}, {"keypoint_px", s.noise.keypoint_px}}},
              {"objects", objects},
              {"hands", hands},
              {"grasp_candidates", s.grasp_candidates},
              {"grasps", s.grasps}};
}

SceneSpec scene_spec_from_json(const Json& j) {
  check_keys(j, {"seed", "frames", "rig", "noise", "objects", "hands", "grasp_candidates", "grasps"},
             "scene spec");
  SceneSpec s = SceneSpec::default_scene();
  read_opt(j, "seed", s.seed);
  read_opt(j, "frames", s.frames);
  read_opt(j, "grasp_candidates", s.grasp_candidates);
  read_opt(j, "grasps", s.grasps);
  if (j.contains("rig")) {
    const Json& r = j.at("rig");
    check_keys(r, {"views", "radius", "height", "target", "fx", "fy", "width", "height_px"}, "rig");
    read_opt(r, "views", s.rig.views);
    read_opt(r, "radius", s.rig.radius);
    read_opt(r, "height", s.rig.height);
    read_opt_vec3(r, "target", s.rig.target);
    read_opt(r, "fx", s.rig.fx);
    read_opt(r, "fy", s.rig.fy);
    read_opt(r, "width", s.rig.width);
    read_opt(r, "height_px", s.rig.height_px);
  }
  if (j.contains("noise")) {
    const Json& n = j.at("noise");
    check_keys(n, {"depth_mm", "keypoint_px"}, "noise");
    read_opt(n, "depth_mm", s.noise.depth_mm);
    read_opt(n, "keypoint_px", s.noise.keypoint_px);
  }
  if (j.contains("objects")) {
    s.objects.clear();
    for (const auto& o : j.at("objects")) {
      check_keys(o, {"shape", "size", "pose", "velocity", "angular_velocity"}, "object");
      ObjectSpec spec;
      read_opt(o, "shape", spec.shape);
      read_opt(o, "size", spec.size);
      if (o.contains("pose")) spec.pose = rigid_pose_from_json(o.at("pose"));
      read_opt_vec3(o, "velocity", spec.velocity);
      read_opt_vec3(o, "angular_velocity", spec.angular_velocity);
      s.objects.push_back(spec);
    }
  }
  if (j.contains("hands")) {
    s.hands.clear();
    for (const auto& h : j.at("hands")) {
      check_keys(h, {"root_rotation", "root_translation", "articulation", "velocity", "beta", "sides", "rings"},
                 "hand");
      HandSpec spec;
      read_opt_vec3(h, "root_rotation", spec.root_rotation);
      read_opt_vec3(h, "root_translation", spec.root_translation);
      read_opt(h, "articulation", spec.articulation);
      read_opt_vec3(h, "velocity", spec.velocity);
      if (h.contains("beta")) spec.beta = vec_from(h.at("beta"), kShapeCount);
      read_opt(h, "sides", spec.sides);
      read_opt(h, "rings", spec.rings);
      s.hands.push_back(spec);
    }
  }
  if (s.frames < 1) throw Error("frames must be >= 1");
  if (s.noise.depth_mm < 0.0 || s.noise.keypoint_px < 0.0) throw Error("noise levels must be >= 0");
  return s;
}

Json to_json(const EnergyReport& r) {
  return Json{{"e_depth", r.e_depth},     {"e_kpt_hand", r.e_kpt_hand}, {"e_kpt_object", r.e_kpt_object},
              {"e_reg", r.e_reg},         {"e_total", r.e_total}};
}

Json to_json(const std::vector<FrameSolution>& solutions) {
  Json frames = Json::array();
  for (const auto& s : solutions) {
    Json trace = Json::array();
    for (const auto& r : s.trace) trace.push_back(to_json(r));
    frames.push_back(Json{{"init", to_json(s.init)}, {"pose", to_json(s.pose)}, {"trace", trace}});
  }
  return Json{{"frames", frames}};
}

std::vector<FrameSolution> solutions_from_json(const Json& j) {
  std::vector<FrameSolution> out;
  for (const auto& f : j.at("frames")) {
    FrameSolution s;
    s.init = scene_pose_from_json(f.at("init"));
    s.pose = scene_pose_from_json(f.at("pose"));
    for (const auto& r : f.at("trace")) {
      EnergyReport e;
      e.e_depth = r.at("e_depth").get<double>();
      e.e_kpt_hand = r.at("e_kpt_hand").get<double>();
      e.e_kpt_object = r.at("e_kpt_object").get<double>();
      e.e_reg = r.at("e_reg").get<double>();
      e.e_total = r.at("e_total").get<double>();
      s.trace.push_back(e);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_hand_model(const fs::path& mesh_path, const fs::path& sidecar_path,
                      const HandModel& model) {
  write_text_atomic(mesh_path, format_mesh(model.rest_mesh()));
  Json joints = Json::array(), weights = Json::array();
  for (const auto& p : model.rest_joints()) joints.push_back(vec(p));
  for (std::size_t v = 0; v < model.weights().size(); ++v)
    for (const auto& w : model.weights()[v]) weights.push_back(Json::array({v, w.joint, w.weight}));
  Json pose_basis = model.identity_basis() ? Json("identity") : matrix(model.pose_basis());
  write_json(sidecar_path, Json{{"parents", model.parents()},
                                {"rest_joints", joints},
                                {"weights", weights},
                                {"pose_basis", pose_basis},
                                {"shape_basis", matrix(model.shape_basis())},
                                {"beta", vec(model.beta())}});
}

HandModel read_hand_model(const fs::path& mesh_path, const fs::path& sidecar_path) {
  TriMesh mesh = read_mesh(mesh_path.string());
  const Json j = read_json(sidecar_path);
  const auto parents_v = j.at("parents").get<std::vector<int>>();
  if (parents_v.size() != kJointCount) throw Error("hand sidecar needs 21 parents");
  std::array<int, kJointCount> parents{};
  std::copy(parents_v.begin(), parents_v.end(), parents.begin());
  const Json& rj = j.at("rest_joints");
  if (rj.size() != kJointCount) throw Error("hand sidecar needs 21 rest joints");
  std::array<Vec3, kJointCount> joints;
  for (int i = 0; i < kJointCount; ++i) joints[i] = vec3_from(rj[i]);
  std::vector<std::vector<VertexWeight>> weights(mesh.vertex_count());
  for (const auto& w : j.at("weights")) {
    const auto v = w.at(0).get<std::size_t>();
    if (v >= weights.size()) throw Error("skinning weight refers to a missing vertex");
    weights[v].push_back({w.at(1).get<int>(), w.at(2).get<double>()});
  }
  const Json& pb = j.at("pose_basis");
  Eigen::MatrixXd pose_basis = pb.is_string() && pb.get<std::string>() == "identity"
                                   ? Eigen::MatrixXd::Identity(kPoseParamCount, kPoseParamCount)
                                   : matrix_from(pb);
  return HandModel(std::move(mesh), parents, joints, std::move(weights), std::move(pose_basis),
                   matrix_from(j.at("shape_basis")), vec_from(j.at("beta"), kShapeCount));
}

namespace {

static_assert(std::endian::native == std::endian::little, "binary images assume little-endian");

template <typename T>
void write_image(const fs::path& path, const char* tag, int w, int h, const std::vector<T>& values) {
  std::string data = std::string(tag) + " " + std::to_string(w) + " " + std::to_string(h) + "\n";
  const std::size_t offset = data.size();
  data.resize(offset + values.size() * sizeof(T));
  std::memcpy(data.data() + offset, values.data(), values.size() * sizeof(T));
  write_text_atomic(path, data);
}

template <typename T>
std::vector<T> read_image(const fs::path& path, const char* tag, int& w, int& h) {
  const std::string data = read_text(path);
  const auto nl = data.find('\n');
  if (nl == std::string::npos) throw Error(path.string() + ": missing header");
  std::istringstream header(data.substr(0, nl));
  std::string got;
  if (!(header >> got >> w >> h) || got != tag || w <= 0 || h <= 0)
    throw Error(path.string() + ": bad header");
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (data.size() - nl - 1 != n * sizeof(T)) throw Error(path.string() + ": wrong payload size");
  std::vector<T> values(n);
  std::memcpy(values.data(), data.data() + nl + 1, n * sizeof(T));
  return values;
}

}  // namespace

void write_depth(const fs::path& path, const DepthMap& depth) {
  std::vector<float> values(depth.depth.begin(), depth.depth.end());
  write_image(path, "DEPTH", depth.width, depth.height, values);
}

DepthMap read_depth(const fs::path& path) {
  int w = 0, h = 0;
  const auto values = read_image<float>(path, "DEPTH", w, h);
  DepthMap out(w, h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0f) throw Error(path.string() + ": invalid depth value");
    out.depth[i] = values[i];
  }
  return out;
}

void write_labels(const fs::path& path, int width, int height, const std::vector<int>& labels) {
  std::vector<std::int32_t> values(labels.begin(), labels.end());
  write_image(path, "LABEL", width, height, values);
}

std::vector<int> read_labels(const fs::path& path, int width, int height) {
  int w = 0, h = 0;
  const auto values = read_image<std::int32_t>(path, "LABEL", w, h);
  if (w != width || h != height) throw Error(path.string() + ": label size does not match depth");
  return {values.begin(), values.end()};
}

std::vector<fs::path> write_scene(const fs::path& dir, const StoredScene& s) {
  std::vector<fs::path> written;
  auto json_file = [&](const fs::path& rel, const Json& j) {
    write_json(dir / rel, j);
    written.push_back(dir / rel);
  };
  json_file("scene.json", to_json(s.spec));
  Json cams = Json::array();
  for (const auto& v : s.views) cams.push_back(to_json(v));
  json_file("cameras.json", cams);
  for (std::size_t o = 0; o < s.models.objects.size(); ++o) {
    const fs::path p = dir / "objects" / ("obj_" + std::to_string(o) + ".mesh");
    write_text_atomic(p, format_mesh(s.models.objects[o]));
    written.push_back(p);
  }
  for (std::size_t h = 0; h < s.models.hands.size(); ++h) {
    const std::string stem = "hand_" + std::to_string(h);
    write_hand_model(dir / "hand" / (stem + ".mesh"), dir / "hand" / (stem + ".json"), s.models.hands[h]);
    written.push_back(dir / "hand" / (stem + ".mesh"));
    written.push_back(dir / "hand" / (stem + ".json"));
  }
  Json gt = Json::array();
  for (const auto& p : s.gt) gt.push_back(to_json(p));
  json_file("gt_poses.json", gt);
  Json ann = Json::array();
  for (std::size_t t = 0; t < s.frames.size(); ++t) {
    const auto& f = s.frames[t];
    for (std::size_t c = 0; c < f.depths.size(); ++c) {
      const fs::path fd = dir / "frames" / std::to_string(t);
      write_depth(fd / ("depth_" + std::to_string(c) + ".bin"), f.depths[c]);
      write_labels(fd / ("label_" + std::to_string(c) + ".bin"), f.depths[c].width, f.depths[c].height,
                   f.labels[c]);
      written.push_back(fd / ("depth_" + std::to_string(c) + ".bin"));
      written.push_back(fd / ("label_" + std::to_string(c) + ".bin"));
    }
    ann.push_back(to_json(f.obs.annotations));
  }
  json_file("annotations.json", ann);
  for (std::size_t o = 0; o < s.object_grasps.size(); ++o)
    json_file(fs::path("grasps") / ("obj_" + std::to_string(o) + ".json"), to_json(s.object_grasps[o]));
  json_file("gripper.json", to_json(s.gripper));
  return written;
}

StoredScene read_scene(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("scene directory not found: " + dir.string());
  StoredScene s;
  s.spec = scene_spec_from_json(read_json(dir / "scene.json"));
  for (const auto& c : read_json(dir / "cameras.json")) s.views.push_back(camera_from_json(c));
  for (std::size_t o = 0; o < s.spec.objects.size(); ++o)
    s.models.objects.push_back(read_mesh((dir / "objects" / ("obj_" + std::to_string(o) + ".mesh")).string()));
  for (std::size_t h = 0; h < s.spec.hands.size(); ++h) {
    const std::string stem = "hand_" + std::to_string(h);
    s.models.hands.push_back(read_hand_model(dir / "hand" / (stem + ".mesh"), dir / "hand" / (stem + ".json")));
  }
  for (const auto& p : read_json(dir / "gt_poses.json")) s.gt.push_back(scene_pose_from_json(p));
  const Json ann = read_json(dir / "annotations.json");
  if (ann.size() != s.gt.size()) throw Error("annotation and ground-truth frame counts differ");
  const int nh = static_cast<int>(s.models.hands.size());
  for (std::size_t t = 0; t < s.gt.size(); ++t) {
    FrameData f;
    const fs::path fd = dir / "frames" / std::to_string(t);
    for (std::size_t c = 0; c < s.views.size(); ++c) {
      f.depths.push_back(read_depth(fd / ("depth_" + std::to_string(c) + ".bin")));
      f.labels.push_back(read_labels(fd / ("label_" + std::to_string(c) + ".bin"), f.depths.back().width,
                                     f.depths.back().height));
    }
    f.obs.views = s.views;
    f.obs.cloud = merge_point_clouds(s.views, f.depths);
    f.obs.annotations = annotations_from_json(ann[t]);
    f.hand_cloud = hand_point_cloud(s.views, f.depths, f.labels, nh);
    s.frames.push_back(std::move(f));
  }
  for (std::size_t o = 0; o < s.models.objects.size(); ++o) {
    const fs::path p = dir / "grasps" / ("obj_" + std::to_string(o) + ".json");
    s.object_grasps.push_back(fs::exists(p) ? grasps_from_json(read_json(p)) : GraspSet{});
  }
  s.gripper = gripper_from_json(read_json(dir / "gripper.json"));
  return s;
}

}  // namespace dexfit
