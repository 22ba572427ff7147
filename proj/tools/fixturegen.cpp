// Renders the synthetic fixture scenes: a ray-cast image, depth map, object
// masks, landmark detections and the recorded program responses.
#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>

#include <Eigen/Geometry>

#include "parallax/camera.hpp"
#include "parallax/image_io.hpp"
#include "parallax/json.hpp"
#include "parallax/scene_io.hpp"
#include "parallax/services.hpp"

namespace {

using namespace parallax;
using Eigen::Vector3d;
namespace fs = std::filesystem;

constexpr int kWidth = 256;
constexpr int kHeight = 192;
constexpr double kFloorY = 1.6;  // camera height above the floor; y points down
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Hit {
  double t = kInf;
  Vector3d normal = Vector3d::Zero();
  int object = 0;
};

struct Surface {
  int object = 0;
  std::function<std::optional<std::pair<double, Vector3d>>(const Vector3d& dir)> intersect;
  std::function<Vector3d(const Vector3d& point)> albedo;
};

std::optional<std::pair<double, Vector3d>> ray_sphere(const Vector3d& dir, const Vector3d& c, double r) {
  const double b = dir.dot(c);
  const double disc = b * b - (c.squaredNorm() - r * r);
  if (disc < 0.0) return std::nullopt;
  const double t = b - std::sqrt(disc);
  if (t <= 1e-6) return std::nullopt;
  return std::pair{t, ((t * dir) - c).normalized()};
}

// Vertical cylinder (axis along y) between y_top and y_bottom.
std::optional<std::pair<double, Vector3d>> ray_cylinder(const Vector3d& dir, double cx, double cz, double r,
                                                        double y_top, double y_bottom) {
  const double a = dir.x() * dir.x() + dir.z() * dir.z();
  const double b = -2.0 * (dir.x() * cx + dir.z() * cz);
  const double c = cx * cx + cz * cz - r * r;
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0 || a == 0.0) return std::nullopt;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  const Vector3d p = t * dir;
  if (t <= 1e-6 || p.y() < y_top || p.y() > y_bottom) return std::nullopt;
  return std::pair{t, Vector3d(p.x() - cx, 0.0, p.z() - cz).normalized()};
}

struct Bone {
  Vector3d a, b;
  double radius;
};

// Union of spheres swept along each bone.
std::optional<std::pair<double, Vector3d>> ray_bones(const Vector3d& dir, const std::vector<Bone>& bones) {
  std::optional<std::pair<double, Vector3d>> best;
  for (const Bone& bone : bones) {
    const int steps = std::max(1, static_cast<int>(std::ceil((bone.b - bone.a).norm() / (0.5 * bone.radius))));
    for (int i = 0; i <= steps; ++i) {
      const Vector3d c = bone.a + (bone.b - bone.a) * (static_cast<double>(i) / steps);
      if (auto h = ray_sphere(dir, c, bone.radius); h && (!best || h->first < best->first)) best = h;
    }
  }
  return best;
}

Surface floor_surface(int object) {
  return {object,
          [](const Vector3d& dir) -> std::optional<std::pair<double, Vector3d>> {
            if (dir.y() <= 1e-9) return std::nullopt;
            const double t = kFloorY / dir.y();
            const Vector3d p = t * dir;
            if (p.z() > 14.0) return std::nullopt;
            return std::pair{t, Vector3d(0.0, -1.0, 0.0)};
          },
          [](const Vector3d& p) {
            const bool dark = (static_cast<int>(std::floor(p.x())) + static_cast<int>(std::floor(p.z()))) % 2 == 0;
            return dark ? Vector3d(0.45, 0.42, 0.38) : Vector3d(0.72, 0.70, 0.64);
          }};
}

Surface wall_surface(int object, Vector3d color) {
  return {object,
          [](const Vector3d& dir) -> std::optional<std::pair<double, Vector3d>> {
            const double t = 14.0 / dir.z();
            const Vector3d p = t * dir;
            if (p.y() < -3.0 || p.y() > kFloorY) return std::nullopt;
            return std::pair{t, Vector3d(0.0, 0.0, -1.0)};
          },
          [color](const Vector3d& p) {
            const double row = std::floor(p.y() / 0.5);
            const double shift = std::fmod(row, 2.0) == 0.0 ? 0.0 : 0.5;
            const bool mortar = std::fmod(p.y() - row * 0.5, 0.5) < 0.05 ||
                                std::fmod(std::abs(p.x() + shift), 1.0) < 0.05;
            return mortar ? Vector3d(0.8, 0.8, 0.78) : color;
          }};
}

Surface solid(int object, Vector3d color,
              std::function<std::optional<std::pair<double, Vector3d>>(const Vector3d&)> intersect) {
  return {object, std::move(intersect), [color](const Vector3d&) { return color; }};
}

struct Landmark3 {
  std::string name;
  Vector3d p;
};

struct FixtureSpec {
  std::string name;
  std::vector<Surface> surfaces;
  std::map<std::string, int> prompts;  // segmentation prompt -> object id
  std::map<int, std::vector<Landmark3>> skeletons;
  std::map<int, std::vector<Landmark3>> faces;
  std::vector<GeneratedProgram> programs;
  std::vector<std::string> expected_kinds;
  std::vector<std::pair<int, std::string>> expected_diagnostics;
  std::uint64_t noise_seed = 0;
};

// Joints of a standing figure at `base` (feet on the floor) turned by `yaw`.
std::vector<Landmark3> figure_joints(const Vector3d& base, double yaw, double stride) {
  const Eigen::Matrix3d rot = Eigen::AngleAxisd(yaw, Vector3d::UnitY()).toRotationMatrix();
  auto at = [&](double x, double up, double z) { return Vector3d(base + rot * Vector3d(x, -up, z)); };
  // Local frame: +x toward the subject's left, +z away from the camera before yaw.
  return {
      {"nose", at(0.0, 1.62, -0.12)},         {"left_eye", at(0.04, 1.67, -0.1)},
      {"right_eye", at(-0.04, 1.67, -0.1)},   {"left_ear", at(0.08, 1.65, 0.0)},
      {"right_ear", at(-0.08, 1.65, 0.0)},    {"left_shoulder", at(0.2, 1.42, 0.0)},
      {"right_shoulder", at(-0.2, 1.42, 0.0)}, {"left_elbow", at(0.26, 1.15, stride)},
      {"right_elbow", at(-0.26, 1.15, -stride)}, {"left_wrist", at(0.28, 0.9, 1.6 * stride)},
      {"right_wrist", at(-0.28, 0.9, -1.6 * stride)}, {"left_hip", at(0.12, 0.92, 0.0)},
      {"right_hip", at(-0.12, 0.92, 0.0)},    {"left_knee", at(0.13, 0.5, -stride)},
      {"right_knee", at(-0.13, 0.5, stride)}, {"left_ankle", at(0.13, 0.08, -1.5 * stride)},
      {"right_ankle", at(-0.13, 0.08, 1.5 * stride)},
  };
}

std::vector<Bone> figure_bones(const std::vector<Landmark3>& joints) {
  std::map<std::string, Vector3d> j;
  for (const auto& l : joints) j[l.name] = l.p;
  const Vector3d neck = 0.5 * (j["left_shoulder"] + j["right_shoulder"]);
  const Vector3d pelvis = 0.5 * (j["left_hip"] + j["right_hip"]);
  const Vector3d head = 0.5 * (j["left_ear"] + j["right_ear"]);
  return {
      {head, head, 0.12},
      {neck, pelvis, 0.17},
      {j["left_shoulder"], j["right_shoulder"], 0.08},
      {j["left_hip"], j["right_hip"], 0.1},
      {j["left_shoulder"], j["left_elbow"], 0.06},
      {j["left_elbow"], j["left_wrist"], 0.05},
      {j["right_shoulder"], j["right_elbow"], 0.06},
      {j["right_elbow"], j["right_wrist"], 0.05},
      {j["left_hip"], j["left_knee"], 0.08},
      {j["left_knee"], j["left_ankle"], 0.06},
      {j["right_hip"], j["right_knee"], 0.08},
      {j["right_knee"], j["right_ankle"], 0.06},
  };
}

// Face landmarks on the front of a head sphere facing the camera.
std::vector<Landmark3> face_points(const Vector3d& center, double r) {
  auto on_sphere = [&](double right, double up) {
    // right/up are offsets in units of r; the point is pushed onto the front of the sphere.
    const double x = right * r, y = -up * r;
    const double z = -std::sqrt(std::max(0.0, r * r - x * x - y * y));
    return Vector3d(center + Vector3d(x, y, z));
  };
  // The subject faces the camera, so their left is image right (+x).
  return {
      {"left_eye", on_sphere(0.35, 0.25)},   {"right_eye", on_sphere(-0.35, 0.25)},
      {"nose_tip", on_sphere(0.0, 0.0)},     {"chin", on_sphere(0.0, -0.7)},
      {"forehead", on_sphere(0.0, 0.65)},    {"mouth_left", on_sphere(0.25, -0.4)},
      {"mouth_right", on_sphere(-0.25, -0.4)},
  };
}

GeneratedProgram program(std::string text, std::string rationale) { return {std::move(text), std::move(rationale)}; }

std::vector<FixtureSpec> fixture_specs() {
  std::vector<FixtureSpec> out;

  {
    FixtureSpec s;
    s.name = "train";
    s.noise_seed = 11;
    const auto joints = figure_joints({1.3, kFloorY, 6.5}, -0.8, 0.18);
    const auto bones = figure_bones(joints);
    s.surfaces = {floor_surface(1), wall_surface(2, {0.62, 0.33, 0.25}),
                  solid(3, {0.66, 0.64, 0.6}, [](const Vector3d& d) { return ray_cylinder(d, -2.2, 8.0, 0.7, -2.8, kFloorY); }),
                  solid(4, {0.85, 0.2, 0.35}, [bones](const Vector3d& d) { return ray_bones(d, bones); })};
    s.prompts = {{"ground", 1}, {"the pillar", 3}, {"the runner", 4}};
    s.skeletons[4] = joints;
    s.programs = {
        program("MASK_0=Text2Mask(prompt = \"ground\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "PLANE_0=Pointcloud2Plane(Pointcloud = POINTCLOUD_0)\nPLANAR_0=Planar(plane = PLANE_0)\n",
                "Lay the title flat on the ground in front of the runner."),
        program("MASK_0=Text2Mask(prompt = \"the pillar\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "CYLINDER_0=Pointcloud2Cylinder(Pointcloud = POINTCLOUD_0, direction = NULL)\n"
                "CYLINDRICAL_0=Cylindrical(cylinder = CYLINDER_0)\n",
                "Wrap a text ring around the stone pillar."),
        program("MASK_0=Text2Mask(prompt = \"the runner\")\nSKELETON_0=SkeletonExtraction(mask = MASK_0)\n"
                "PLANAR_0=Planar(plane = SKELETON_0.median)\n",
                "Run a slogan alongside the runner, parallel to the running direction."),
    };
    s.expected_kinds = {"Planar", "Cylindrical", "Planar"};
    out.push_back(std::move(s));
  }

  {
    FixtureSpec s;
    s.name = "mixed";
    s.noise_seed = 23;
    const Vector3d head(1.2, -0.35, 5.0);
    s.surfaces = {floor_surface(1), wall_surface(2, {0.3, 0.42, 0.6}),
                  solid(3, {0.95, 0.55, 0.12}, [](const Vector3d& d) { return ray_sphere(d, {-1.6, kFloorY - 0.8, 6.5}, 0.8); }),
                  solid(4, {0.87, 0.68, 0.55}, [head](const Vector3d& d) { return ray_sphere(d, head, 0.3); }),
                  solid(5, {0.2, 0.25, 0.3}, [head](const Vector3d& d) {
                    return ray_bones(d, {{head + Vector3d(0, 0.55, 0.05), head + Vector3d(0, 1.6, 0.05), 0.3}});
                  })};
    s.prompts = {{"floor", 1}, {"the wall", 2}, {"the ball", 3}, {"the human face", 4}};
    s.faces[4] = face_points(head, 0.3);
    s.programs = {
        program("MASK_0=Text2Mask(prompt = \"the ball\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "SPHERE_0=Pointcloud2Sphere(Pointcloud = POINTCLOUD_0)\nSPHERICAL_0=Spherical(sphere = SPHERE_0)\n",
                "Curve a headline over the ball."),
        program("MASK_0=Text2Mask(prompt = \"the wall\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "PLANE_0=Pointcloud2PLANE(Pointcloud = POINTCLOUD_0)\nPLANAR_0=Planar(plane = PLANE_0)\n",
                "Paint the event name onto the back wall."),
        program("MASK0=Text2Mask(prompt = \"floor\")\nPointcloud0=Mask2Pointcloud(mask = MASK0)\n"
                "PLANE_0=Pointcloud2Plane(Pointcloud = Pointcloud0)\n",
                "Place text on the floor."),
        program("MASK_0=Text2Mask(prompt = \"the human face\")\nFACE_0=FaceExtraction(mask = MASK_0)\n"
                "PLANAR=Planar(plane = FACE_0.frontal)\n",
                "Float a caption in front of the face, facing the same way."),
    };
    s.expected_kinds = {"Spherical", "Planar", "Planar"};
    s.expected_diagnostics = {{2, "NotAnchorTerminal"}};
    out.push_back(std::move(s));
  }

  {
    FixtureSpec s;
    s.name = "portrait";
    s.noise_seed = 37;
    const Vector3d head(-0.2, -0.1, 3.2);
    s.surfaces = {floor_surface(1), wall_surface(2, {0.5, 0.5, 0.45}),
                  solid(4, {0.8, 0.62, 0.5}, [head](const Vector3d& d) { return ray_sphere(d, head, 0.28); }),
                  solid(5, {0.15, 0.3, 0.25}, [head](const Vector3d& d) {
                    return ray_bones(d, {{head + Vector3d(-0.3, 0.55, 0.05), head + Vector3d(0.3, 0.55, 0.05), 0.22},
                                         {head + Vector3d(0, 0.6, 0.05), head + Vector3d(0, 1.9, 0.05), 0.3}});
                  })};
    s.prompts = {{"the human head", 4}};
    s.faces[4] = face_points(head, 0.28);
    s.programs = {
        program("MASK_0=Text2Mask(prompt = \"the human head\")\nFACE_0=FaceExtraction(mask = MASK_0)\n"
                "POINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "CYLINDER_0=Pointcloud2Cylinder(Pointcloud = POINTCLOUD_0, direction = FACE_0.cranial)\n"
                "CYLINDRICAL_0=Cylindrical(cylinder = CYLINDER_0)\n",
                "Surround the head with a ring of words."),
        program("MASK_0=Text2Mask(prompt = \"the human head\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "SPHERE_0=Pointcloud2Sphere(Pointcloud = POINTCLOUD_0)\nSPHERICAL_0=Spherical(sphere = SPHERE_0)\n",
                "Wrap a band of text around the head like a halo."),
        program("MASK_0=Text2Mask(prompt = \"the human head\")\nFACE_0=FaceExtraction(mask = MASK_0)\n"
                "PLANAR=Planar(plane = FACE_0.median)\n",
                "Let the slogan stream out from the face sideways."),
    };
    s.expected_kinds = {"Cylindrical", "Spherical", "Planar"};
    out.push_back(std::move(s));
  }

  {
    FixtureSpec s;
    s.name = "allfail";
    s.noise_seed = 41;
    s.surfaces = {floor_surface(1), wall_surface(2, {0.4, 0.55, 0.35}),
                  solid(3, {0.2, 0.5, 0.8}, [](const Vector3d& d) { return ray_sphere(d, {0.5, kFloorY - 0.6, 5.5}, 0.6); })};
    s.prompts = {{"floor", 1}};
    s.programs = {
        program("MASK_0=Text2Mask(prompt = \"floor\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "LINE_0=Linear(plane = POINTCLOUD_0)\n",
                "Run a line of text along the floor."),
        program("MASK_0=Text2Mask(prompt = \"floor\")\nPOINTCLOUD_0=Mask2Pointcloud(mask = MASK_0)\n"
                "PLANE_0=Pointcloud2Plane(Pointcloud = POINTCLOUD_0)\nPLANAR_0=Planar(plane = PLANE_0.median)\n",
                "Stand text up on the floor's median plane."),
        program("MASK_0=Text2Mask(prompt = \"floor\")\nCYLINDRICAL_0=Cylindrical(cylinder = MASK_0)\n",
                "Wrap text around the floor."),
    };
    s.expected_diagnostics = {{0, "UnknownCell"}, {1, "UnknownAttribute"}, {2, "TypeMismatch"}};
    out.push_back(std::move(s));
  }
  return out;
}

Vector3d shade(const Vector3d& albedo, const Vector3d& normal) {
  const Vector3d light = Vector3d(-0.4, -0.8, -0.45).normalized();
  const double lambert = std::max(0.0, normal.dot(light));
  return albedo * (0.35 + 0.65 * lambert);
}

std::uint8_t byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

void write_text(const fs::path& path, const std::string& text) {
  write_file(path.string(), {reinterpret_cast<const std::uint8_t*>(text.data()), text.size()});
}

void generate(const FixtureSpec& spec, const fs::path& root) {
  const PinholeCamera camera = default_camera(kWidth, kHeight);
  Image image(kWidth, kHeight);
  DepthMap depth(kWidth, kHeight, std::numeric_limits<float>::quiet_NaN());
  Raster<int> ids(kWidth, kHeight, 0);
  std::mt19937_64 rng(spec.noise_seed);
  std::normal_distribution<double> noise(0.0, 0.0003);

  for (int v = 0; v < kHeight; ++v) {
    for (int u = 0; u < kWidth; ++u) {
      const Vector3d dir = unproject_pixel(camera, u, v, 1.0).normalized();
      Hit best;
      const Surface* surface = nullptr;
      for (const Surface& s : spec.surfaces) {
        if (auto h = s.intersect(dir); h && h->first < best.t) {
          best = {h->first, h->second, s.object};
          surface = &s;
        }
      }
      const double n = noise(rng);
      if (!surface) {
        const double t = static_cast<double>(v) / kHeight;
        image(u, v) = {byte(0.55 + 0.3 * t), byte(0.7 + 0.2 * t), byte(0.95), 255};
        continue;
      }
      const Vector3d p = best.t * dir;
      const Vector3d c = shade(surface->albedo(p), best.normal);
      image(u, v) = {byte(c.x()), byte(c.y()), byte(c.z()), 255};
      depth(u, v) = static_cast<float>(p.z() * (1.0 + n));
      ids(u, v) = best.object;
    }
  }

  const fs::path dir = root / spec.name;
  fs::remove_all(dir);
  fs::create_directories(dir / "masks");
  fs::create_directories(dir / "landmarks");
  write_file((dir / "image.png").string(), encode_png(image));
  Bitmap validity(kWidth, kHeight);
  for (int v = 0; v < kHeight; ++v)
    for (int u = 0; u < kWidth; ++u) validity(u, v) = std::isfinite(depth(u, v)) ? 1 : 0;
  write_file((dir / "depth.dsd").string(), encode_dsd(depth, validity));
  write_text(dir / "camera.json", camera_json(camera));

  for (const auto& [prompt, object] : spec.prompts) {
    Image mask_png(kWidth, kHeight);
    Bitmap mask(kWidth, kHeight);
    for (int v = 0; v < kHeight; ++v) {
      for (int u = 0; u < kWidth; ++u) {
        const bool on = ids(u, v) == object;
        mask(u, v) = on ? 1 : 0;
        const std::uint8_t g = on ? 255 : 0;
        mask_png(u, v) = {g, g, g, 255};
      }
    }
    write_file((dir / "masks" / (prompt_fingerprint(prompt) + ".png")).string(), encode_png(mask_png));

    auto project = [&](const std::vector<Landmark3>& points) {
      std::vector<Landmark2D> out;
      for (const auto& l : points) {
        const Eigen::Vector3d uvz = project_point(camera, l.p);
        out.push_back({l.name, uvz.x(), uvz.y()});
      }
      return out;
    };
    std::vector<Landmark2D> skeleton, face;
    if (auto it = spec.skeletons.find(object); it != spec.skeletons.end()) skeleton = project(it->second);
    if (auto it = spec.faces.find(object); it != spec.faces.end()) face = project(it->second);
    write_text(dir / "landmarks" / (mask_fingerprint(mask) + ".json"), landmarks_fixture_json(skeleton, face));
  }

  Json programs = Json::array();
  for (const auto& p : spec.programs) programs.push_back({{"text", p.text}, {"rationale", p.rationale}});
  write_text(dir / "programs.json", Json{{"programs", programs}}.dump(2) + "\n");

  Json diagnostics = Json::array();
  for (const auto& [index, kind] : spec.expected_diagnostics)
    diagnostics.push_back({{"program_index", index}, {"kind", kind}});
  const Json manifest = {{"name", spec.name},
                         {"programs_generated", spec.programs.size()},
                         {"expected_anchor_count", spec.expected_kinds.size()},
                         {"expected_kinds", spec.expected_kinds},
                         {"expected_diagnostics", diagnostics}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Writes the synthetic fixture scenes"};
  std::string out = "fixtures";
  app.add_option("-o,--out", out, "Fixture root directory");
  CLI11_PARSE(app, argc, argv);
  try {
    for (const auto& spec : fixture_specs()) {
      generate(spec, out);
      std::cout << "wrote " << (fs::path(out) / spec.name).string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
