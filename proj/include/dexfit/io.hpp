#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "dexfit/camera.hpp"
#include "dexfit/energy.hpp"
#include "dexfit/grasp.hpp"
#include "dexfit/solver.hpp"
#include "dexfit/synth.hpp"

namespace dexfit {

using Json = nlohmann::ordered_json;

std::string read_text(const std::filesystem::path& path);
/// Writes to a sibling temporary file, then renames over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(const CameraView& view);
CameraView camera_from_json(const Json& j);

Json to_json(const RigidPose& pose);
RigidPose rigid_pose_from_json(const Json& j);
Json to_json(const ScenePose& pose);
ScenePose scene_pose_from_json(const Json& j);

Json to_json(const AnnotationSet& ann);
AnnotationSet annotations_from_json(const Json& j);

Json to_json(const GraspSet& grasps);
GraspSet grasps_from_json(const Json& j);
Json to_json(const GripperTemplate& gripper);
GripperTemplate gripper_from_json(const Json& j);

Json to_json(const SolveConfig& config);
/// Missing keys keep their defaults; unknown keys are rejected.
SolveConfig solve_config_from_json(const Json& j);

Json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const Json& j);

Json to_json(const EnergyReport& r);
Json to_json(const std::vector<FrameSolution>& solutions);
std::vector<FrameSolution> solutions_from_json(const Json& j);

/// Hand model as rest mesh file plus JSON sidecar.
void write_hand_model(const std::filesystem::path& mesh_path,
                      const std::filesystem::path& sidecar_path, const HandModel& model);
HandModel read_hand_model(const std::filesystem::path& mesh_path,
                          const std::filesystem::path& sidecar_path);

/// Binary image: ASCII header "DEPTH w h\n" then w*h little-endian float32.
void write_depth(const std::filesystem::path& path, const DepthMap& depth);
DepthMap read_depth(const std::filesystem::path& path);
/// Same layout with header "LABEL w h\n" and int32 values.
void write_labels(const std::filesystem::path& path, int width, int height,
                  const std::vector<int>& labels);
std::vector<int> read_labels(const std::filesystem::path& path, int width, int height);

/// A scene directory as written by gen-scene.
struct StoredScene {
  SceneSpec spec;
  SceneModels models;
  std::vector<CameraView> views;
  std::vector<ScenePose> gt;
  std::vector<FrameData> frames;
  std::vector<GraspSet> object_grasps;  // object frame
  GripperTemplate gripper;
};

/// Writes scene.json, cameras.json, objects/, hand/, gt_poses.json,
/// frames/<t>/, annotations.json, grasps/ and gripper.json.
std::vector<std::filesystem::path> write_scene(const std::filesystem::path& dir,
                                               const StoredScene& scene);
StoredScene read_scene(const std::filesystem::path& dir);

}  // namespace dexfit
